//! Two independent routes to an inverse: a Neumann series and a contour
//! integral, compared against the direct section inverse.

use wiener_kernels::generate::{generate_kernel, Profile};
use wiener_kernels::group::Group;
use wiener_kernels::kernel::Kernel;
use wiener_kernels::linalg::C64;
use wiener_kernels::wiener::{self, InversionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::zd(1);
    let k = generate_kernel(&g, 1, 6, Profile::Banded { width: 1 }, &g.ball(8))?.kernel;
    let z = C64::new(1.5 * k.envelope_norm(), 0.0);
    let cfg = InversionConfig {
        z,
        radii: vec![18, 20],
        ..Default::default()
    };
    let (direct, _) = wiener::finite_section_inverse(&k, &cfg)?;
    let neu = wiener::neumann_inverse(&k, z, 80)?;
    let inner = neu
        .kernel
        .restrict_xy(|x, y| x.coords()[0].abs() <= 10 && y.coords()[0].abs() <= 10);
    println!(
        "Neumann (q = {:.3}): gap {:.2e}, tail bound {:.2e}",
        neu.q,
        inner.max_diff(&direct),
        neu.tail_bound
    );

    let z8 = Group::cyclic(8);
    let els = z8.elements().unwrap();
    let banded = generate_kernel(&z8, 2, 8, Profile::Banded { width: 1 }, &els)?.kernel;
    let a = banded.add(&Kernel::scalar_on(z8.clone(), 2, &els, C64::new(5.0, 0.0)))?;
    let cfg8 = InversionConfig {
        radii: vec![4, 5],
        inner_ratio: 1.0,
        ..Default::default()
    };
    let (direct, _) = wiener::finite_section_inverse(&a, &cfg8.with_z(C64::new(0.0, 0.0)))?;
    for nodes in [8, 16, 32, 64] {
        let via = wiener::contour_inverse(&a, 1.0, nodes, &cfg8)?;
        println!(
            "contour with {nodes:>2} nodes on Z/8: gap {:.2e}",
            via.max_diff(&direct)
        );
    }
    Ok(())
}
