//! The covariance algebra over Z/5 and the maps R, Π, W and θ.

use wiener_kernels::covariance::{w_intertwine, CovarianceElement};
use wiener_kernels::generate;
use wiener_kernels::group::Group;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::cyclic(5);
    let els = g.elements().unwrap();
    let mut rng = generate::rng(3);
    let f = generate::random_covariance(&mut rng, &g, 2, &els, &els, 0.5);
    let h = generate::random_covariance(&mut rng, &g, 2, &els, &els, 0.5);

    // R turns the twisted product into kernel composition
    let lhs = f.cov_product(&h)?.r_map();
    let rhs = f.r_map().compose(&h.r_map())?;
    println!("R(f*h) - R(f)R(h)  = {:.2e}", lhs.max_diff(&rhs));
    println!(
        "R(f*) - R(f)*      = {:.2e}",
        f.cov_involution().r_map().max_diff(&f.r_map().involution())
    );
    println!("|R(f)| - |f|_1     = {:.2e}", f.r_map().envelope_norm() - f.l1_norm());
    println!("R^-1 R f == f      : {}", CovarianceElement::r_inverse(&f.r_map()) == f);

    let xi = generate::random_pair_vector(&mut rng, &g, 2, &els);
    let left = w_intertwine(&f.r_map().apply_first(&xi)?);
    let right = f.pi_regular(&w_intertwine(&xi))?;
    println!("W (T_R(f) x id) - Pi(f) W = {:.2e}", left.max_diff(&right));

    let theta = f.cov_product(&h)?.theta_embed()?;
    let prod = f.theta_embed()?.convolve(&h.theta_embed()?)?;
    println!("theta(f*h) - theta(f)theta(h) = {:.2e}", theta.max_diff(&prod));
    Ok(())
}
