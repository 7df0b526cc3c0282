//! Spectra of f*⋆f in covariance algebras of finite groups.

use wiener_kernels::generate;
use wiener_kernels::group::Group;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for g in [Group::cyclic(3), Group::cyclic(4), Group::heisenberg_mod(3)] {
        let els = g.elements().unwrap();
        let (mut lo, mut im) = (f64::INFINITY, 0.0f64);
        for seed in 0..20 {
            let f = generate::random_covariance(&mut generate::rng(seed), &g, 2, &els, &els, 0.5);
            let square = f.cov_involution().cov_product(&f)?;
            for z in square.symmetry_spectrum()? {
                lo = lo.min(z.re);
                im = im.max(z.im.abs());
            }
        }
        println!("{:<8} min Re = {lo:+.3e}   max |Im| = {im:.3e}", g.to_string());
    }
    Ok(())
}
