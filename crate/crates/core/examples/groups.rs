//! Word lengths and balls in the supported groups.

use wiener_kernels::group::Group;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["Z^2", "H3(Z)", "Z/6", "H3(Z/3)"] {
        let g: Group = name.parse()?;
        let sizes: Vec<usize> = (0..=3).map(|r| g.ball(r).len()).collect();
        println!("{:<8} |ball(r)| for r = 0..3: {sizes:?}", g.to_string());
    }

    let h = Group::heisenberg();
    let x = h.point(&[1, 0, 0])?;
    let y = h.point(&[0, 1, 0])?;
    let commutator = h.mul(&h.mul(&x, &y), &h.mul(&h.inv(&x), &h.inv(&y)));
    println!(
        "[x, y] = {:?}, word length {}",
        commutator.coords(),
        h.word_length(&commutator)
    );

    let z = h.point(&[0, 0, 9])?;
    println!("|(0,0,9)| = {} in H3(Z)", h.word_length(&z));
    Ok(())
}
