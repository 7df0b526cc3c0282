//! Approximating a kernel by compactly supported and truncated pieces.

use wiener_kernels::group::{Group, GroupPoint};
use wiener_kernels::kernel::Kernel;
use wiener_kernels::linalg::{self, C64};
use wiener_kernels::wiener::{self, IdealSubspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Group::zd(1);
    let mut k = Kernel::zero(g.clone(), 1);
    for s in -30..=30i64 {
        for t in -2..=2i64 {
            k.insert(
                GroupPoint::new(&[s]),
                GroupPoint::new(&[t]),
                linalg::scalar(1, C64::new(0.5f64.powi(s.abs() as i32), 0.0)),
            );
        }
    }
    println!("{:>4} {:>12} {:>12}", "n", "|K - K_n|", "bound");
    for n in 2..=10 {
        let ideal = IdealSubspace::CompactSupport { radius: n };
        let kn = wiener::ideal_project(&k, &ideal)?;
        println!(
            "{n:>4} {:>12.4e} {:>12.4e}",
            k.sub(&kn)?.envelope_norm(),
            ideal.approximation_bound(&k)
        );
    }
    for level in [0.25, 0.1, 0.01] {
        let ideal = IdealSubspace::Truncation { level };
        let kn = wiener::ideal_project(&k, &ideal)?;
        println!("level {level:<5} |K - K_n| = {:.4e}", k.sub(&kn)?.envelope_norm());
    }
    Ok(())
}
