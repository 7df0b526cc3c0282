//! Composition, involution and the envelope norm of random kernels.

use wiener_kernels::generate::{generate_kernel, Profile};
use wiener_kernels::group::Group;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::zd(2);
    let cols = g.ball(3);
    let a = generate_kernel(&g, 2, 1, Profile::Exponential { rate: 0.8, radius: 3 }, &cols)?.kernel;
    let b = generate_kernel(&g, 2, 2, Profile::Polynomial { power: 2.0, radius: 2 }, &cols)?.kernel;

    let ab = a.compose(&b)?;
    println!("|A| = {:.6}  |B| = {:.6}", a.envelope_norm(), b.envelope_norm());
    println!(
        "|AB| = {:.6} <= |A||B| = {:.6}",
        ab.envelope_norm(),
        a.envelope_norm() * b.envelope_norm()
    );
    println!("|A*| = {:.6}", a.involution().envelope_norm());

    let anti = ab.involution().max_diff(&b.involution().compose(&a.involution())?);
    println!("(AB)* - B*A* = {anti:.2e}");

    let env = a.min_envelope();
    for r in 0..=3 {
        let v = env
            .iter()
            .filter(|(s, _)| g.word_length(s) == r)
            .map(|(_, v)| v)
            .fold(0.0, f64::max);
        println!("  max envelope at word length {r}: {v:.4}");
    }
    Ok(())
}
