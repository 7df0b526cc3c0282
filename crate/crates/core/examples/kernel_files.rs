//! Writing and reading kernels, envelopes and decay reports.

use wiener_kernels::generate::{generate_kernel, Profile};
use wiener_kernels::group::Group;
use wiener_kernels::io;
use wiener_kernels::linalg::C64;
use wiener_kernels::wiener::{self, InversionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("wiener-kernel-files");
    std::fs::create_dir_all(&dir)?;

    let g = Group::heisenberg();
    let k = generate_kernel(&g, 2, 5, Profile::Exponential { rate: 1.0, radius: 1 }, &g.ball(1))?.kernel;
    let path = dir.join("kernel.json");
    io::write_kernel(&path, &k)?;
    let back = io::read_kernel(&path)?;
    println!(
        "wrote {} entries to {}, read back equal: {}",
        k.len(),
        path.display(),
        back == k
    );
    io::write_envelope(&dir.join("envelope.json"), &k.min_envelope())?;

    let z = Group::zd(1);
    let shift = generate_kernel(&z, 1, 1, Profile::Exponential { rate: 2.0, radius: 1 }, &z.ball(30))?.kernel;
    let cfg = InversionConfig {
        z: C64::new(2.0, 0.0),
        radii: vec![10, 20],
        ..Default::default()
    };
    let (_, report) = wiener::finite_section_inverse(&shift, &cfg)?;
    let mut csv = Vec::new();
    io::write_decay_csv(&mut csv, &report)?;
    let text = String::from_utf8(csv)?;
    println!("{}", text.lines().take(5).collect::<Vec<_>>().join("\n"));
    println!("{}", io::decay_summary_to_string(&report));
    Ok(())
}
