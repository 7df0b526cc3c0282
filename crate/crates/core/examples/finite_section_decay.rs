//! Inverse of 1 + K by finite sections, with the decay of its envelope.

use wiener_kernels::generate::{generate_kernel, hermitian_part, Profile};
use wiener_kernels::group::Group;
use wiener_kernels::linalg::C64;
use wiener_kernels::wiener::{self, InversionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::zd(1);
    let k = hermitian_part(&generate_kernel(&g, 2, 4, Profile::Banded { width: 1 }, &g.ball(50))?.kernel);
    let cfg = InversionConfig {
        z: C64::new(1.0 + k.envelope_norm(), 0.0),
        radii: vec![10, 20, 40],
        ..Default::default()
    };
    let (_, report) = wiener::finite_section_inverse(&k, &cfg)?;
    let (r, env) = report.largest().unwrap();
    println!("section radius {r}, inner radius {}", report.inner_radius[&r]);
    for (s, v) in env.iter().filter(|(s, _)| s.coords()[0] >= 0 && s.coords()[0] % 4 == 0) {
        println!("  beta({:>3}) = {v:.3e}", s.coords()[0]);
    }
    println!(
        "fitted rate {:.4}, r2 {:.5}, stabilized {}, residual {:.1e}",
        report.fitted_rate.unwrap_or(f64::NAN),
        report.r2.unwrap_or(f64::NAN),
        report.stabilized,
        report.residual
    );
    Ok(())
}
