//! Batch experiments behind the `wiener` binary.
//!
//! A run is described by an [`ExperimentConfig`], usually read from a TOML
//! file:
//!
//! ```toml
//! task = "decay"
//! group = "Z^1"
//! dim = 1
//! seed = 7
//!
//! [kernel]
//! source = "shift"
//! weight = 0.5
//! window = 60
//!
//! [inversion]
//! z = [1.0, 0.0]
//! radii = [20, 40]
//! ```
//!
//! Every task produces a table of named checks; the run passes iff all of
//! them do. Report files are written to the output directory and are
//! byte-identical for identical configurations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::covariance::{w_intertwine, CovarianceElement};
use crate::error::{Error, Result};
use crate::generate::{self, generate_kernel, hermitian_part, Profile};
use crate::group::{Group, GroupPoint};
use crate::io;
use crate::kernel::{Kernel, Side};
use crate::linalg::{self, C64};
use crate::wiener::{self, IdealSubspace, InversionConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Axioms,
    CovarianceCheck,
    SymmetryCheck,
    Invert,
    Decay,
    IdealApprox,
    Contour,
    KernelIo,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Axioms => "axioms",
            Task::CovarianceCheck => "covariance-check",
            Task::SymmetryCheck => "symmetry-check",
            Task::Invert => "invert",
            Task::Decay => "decay",
            Task::IdealApprox => "ideal-approx",
            Task::Contour => "contour",
            Task::KernelIo => "kernel-io",
        }
    }
}

/// Where the kernel of an inversion-type task comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum KernelSource {
    /// `weight` on the shift by the first generator, for columns in `ball(window)`.
    Shift { weight: f64, window: u32 },
    /// `value·I` on the diagonal, for columns in `ball(window)`.
    Scalar { value: f64, window: u32 },
    /// Random kernel following `profile`, columns in `ball(window)`; the
    /// Hermitian part is taken when `hermitian` is set.
    Profile {
        profile: Profile,
        window: u32,
        #[serde(default)]
        hermitian: bool,
    },
    /// A kernel file.
    File { path: PathBuf },
}

impl Default for KernelSource {
    fn default() -> Self {
        KernelSource::Profile {
            profile: Profile::Exponential { rate: 1.0, radius: 2 },
            window: 4,
            hermitian: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub group: String,
    pub dim: usize,
    pub seed: u64,
    /// Number of seeded trials for property suites.
    pub trials: usize,
    /// Tolerance for algebraic identities (relative).
    pub tolerance: f64,
    /// Tolerance for spectral checks.
    pub spectral_tolerance: f64,
    pub kernel: KernelSource,
    /// Added as `value·I` on the diagonal over the kernel's columns.
    pub diagonal_shift: f64,
    pub inversion: InversionConfig,
    /// Expected fitted rate for `decay`, checked to `rate_tolerance`.
    pub expected_rate: Option<f64>,
    pub rate_tolerance: f64,
    pub min_r2: f64,
    /// Neumann cross-check terms for `invert` (0 disables it).
    pub neumann_terms: usize,
    pub contour_radius: f64,
    pub contour_nodes: usize,
    pub contour_tolerance: f64,
    /// Cutoff radii for `ideal-approx`.
    pub ideal_radii: Vec<u32>,
    /// Input kernel for `kernel-io`; a generated kernel is written when absent.
    pub input: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::Axioms,
            group: "Z^2".into(),
            dim: 2,
            seed: 7,
            trials: 100,
            tolerance: 1e-12,
            spectral_tolerance: 1e-9,
            kernel: KernelSource::default(),
            diagonal_shift: 0.0,
            inversion: InversionConfig::default(),
            expected_rate: None,
            rate_tolerance: 0.02,
            min_r2: 0.99,
            neumann_terms: 0,
            contour_radius: 1.0,
            contour_nodes: 64,
            contour_tolerance: 1e-6,
            ideal_radii: (2..=10).collect(),
            input: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config, filling unset keys from the defaults of its `task`
    /// (or of `axioms` when no task is named).
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let task = match table.get("task") {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?,
            None => Task::Axioms,
        };
        Self::layered(task, table)
    }

    /// Parses a config on top of the defaults for `task`; `task` wins over
    /// any task named in the text.
    pub fn from_toml_for(task: Task, text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut cfg = Self::layered(task, table)?;
        cfg.task = task;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn load_for(task: Task, path: &Path) -> Result<Self> {
        Self::from_toml_for(task, &std::fs::read_to_string(path)?)
    }

    fn layered(task: Task, user: toml::Table) -> Result<Self> {
        let parse_err = |e: String| Error::Parse(e);
        let mut base = toml::Table::try_from(Self::for_task(task)).map_err(|e| parse_err(e.to_string()))?;
        // a preset's expected rate describes the preset kernel only
        if user.contains_key("kernel") && !user.contains_key("expected_rate") {
            base.remove("expected_rate");
        }
        for (key, value) in user {
            match (base.get_mut(&key), value) {
                // nested tables merge key by key, except the kernel source,
                // whose fields depend on its variant
                (Some(toml::Value::Table(b)), toml::Value::Table(u)) if key != "kernel" => b.extend(u),
                (_, value) => {
                    base.insert(key, value);
                }
            }
        }
        base.try_into().map_err(|e: toml::de::Error| parse_err(e.to_string()))
    }

    /// Defaults tuned for `task`.
    pub fn for_task(task: Task) -> Self {
        let base = ExperimentConfig {
            task,
            ..Default::default()
        };
        match task {
            Task::Axioms | Task::KernelIo => base,
            Task::CovarianceCheck => ExperimentConfig {
                group: "Z/4".into(),
                trials: 10,
                ..base
            },
            Task::SymmetryCheck => ExperimentConfig {
                group: "Z/3".into(),
                ..base
            },
            Task::Invert | Task::Decay => ExperimentConfig {
                group: "Z^1".into(),
                dim: 1,
                kernel: KernelSource::Shift {
                    weight: 0.5,
                    window: 60,
                },
                inversion: InversionConfig {
                    radii: vec![20, 40],
                    ..Default::default()
                },
                expected_rate: Some(0.5f64.ln()),
                min_r2: 0.999,
                ..base
            },
            Task::IdealApprox => ExperimentConfig {
                group: "Z^1".into(),
                dim: 1,
                kernel: KernelSource::Profile {
                    profile: Profile::Exponential {
                        rate: std::f64::consts::LN_2,
                        radius: 30,
                    },
                    window: 2,
                    hermitian: false,
                },
                ..base
            },
            Task::Contour => ExperimentConfig {
                group: "Z/8".into(),
                dim: 1,
                kernel: KernelSource::Profile {
                    profile: Profile::Banded { width: 1 },
                    window: 4,
                    hermitian: false,
                },
                diagonal_shift: 5.0,
                inversion: InversionConfig {
                    radii: vec![4, 5],
                    inner_ratio: 1.0,
                    ..Default::default()
                },
                ..base
            },
        }
    }

    pub fn group(&self) -> Result<Group> {
        self.group.parse()
    }
}

/// One line of a pass/fail table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `observed <= limit`.
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            limit,
            pass: observed <= limit,
        }
    }

    /// Passes when `observed >= limit`.
    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            limit,
            pass: observed >= limit,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            observed: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{}  {:<40} observed={:.6e} limit={:.6e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.limit
            );
        }
        s
    }
}

/// Exit status for an error: 2 for input problems, 3 for numerical aborts.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NotInvertibleAtScale { .. }
        | Error::ContourNode { .. }
        | Error::NeumannDivergent(_)
        | Error::TooFewBuckets(_)
        | Error::EigenNoConvergence(_) => 3,
        _ => 2,
    }
}

/// Runs the configured task and writes its reports into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out)?;
    let g = cfg.group()?;
    if cfg.dim == 0 {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    let mut outcome = match cfg.task {
        Task::Axioms => axioms(cfg, &g)?,
        Task::CovarianceCheck => covariance_check(cfg, &g)?,
        Task::SymmetryCheck => symmetry_check(cfg, &g)?,
        Task::Invert => invert(cfg, &g, out, false)?,
        Task::Decay => invert(cfg, &g, out, true)?,
        Task::IdealApprox => ideal_approx(cfg, &g)?,
        Task::Contour => contour(cfg, &g)?,
        Task::KernelIo => kernel_io(cfg, &g, out)?,
    };
    let table = out.join("checks.txt");
    std::fs::write(&table, outcome.table())?;
    outcome.files.push(table);
    Ok(outcome)
}

/// Builds the kernel named by `cfg.kernel`.
pub fn build_kernel(cfg: &ExperimentConfig, g: &Group, seed: u64) -> Result<Kernel> {
    let cols = |w: u32| g.elements().unwrap_or_else(|| g.ball(w));
    let k = match &cfg.kernel {
        KernelSource::Shift { weight, window } => {
            let mut e1 = vec![0i64; g.arity()];
            e1[0] = 1;
            let s = g.point(&e1)?;
            let mut k = Kernel::zero(g.clone(), cfg.dim);
            for t in cols(*window) {
                k.insert(s.clone(), t, linalg::scalar(cfg.dim, C64::new(*weight, 0.0)));
            }
            k
        }
        KernelSource::Scalar { value, window } => {
            Kernel::scalar_on(g.clone(), cfg.dim, &cols(*window), C64::new(*value, 0.0))
        }
        KernelSource::Profile {
            profile,
            window,
            hermitian,
        } => {
            let k = generate_kernel(g, cfg.dim, seed, *profile, &cols(*window))?.kernel;
            if *hermitian {
                hermitian_part(&k)
            } else {
                k
            }
        }
        KernelSource::File { path } => io::read_kernel(path)?,
    };
    let k = if cfg.diagonal_shift != 0.0 {
        let window = k.col_support();
        k.add(&Kernel::scalar_on(
            g.clone(),
            k.dim(),
            &window,
            C64::new(cfg.diagonal_shift, 0.0),
        ))?
    } else {
        k
    };
    if k.group() != g || k.dim() != cfg.dim {
        return Err(Error::InvalidParameter(format!(
            "kernel lives on {} with dim {}, config says {} with dim {}",
            k.group(),
            k.dim(),
            g,
            cfg.dim
        )));
    }
    Ok(k)
}

fn small_support(g: &Group) -> (Vec<GroupPoint>, Vec<GroupPoint>) {
    match g.elements() {
        Some(els) => (els.clone(), els),
        None => (g.ball(2), g.ball(2)),
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn axioms(cfg: &ExperimentConfig, g: &Group) -> Result<RunOutcome> {
    let mut rng = generate::rng(cfg.seed);
    let (shifts, cols) = small_support(g);
    let density = if g.is_finite() { 0.3 } else { 0.5 };
    let d = cfg.dim;
    let mut worst = [0.0f64; 7];
    for _ in 0..cfg.trials {
        let k1 = generate::random_kernel(&mut rng, g, d, &shifts, &cols, density);
        let k2 = generate::random_kernel(&mut rng, g, d, &shifts, &cols, density);
        let k3 = generate::random_kernel(&mut rng, g, d, &shifts, &cols, density);
        let (n1, n2, n3) = (k1.envelope_norm(), k2.envelope_norm(), k3.envelope_norm());
        let k12 = k1.compose(&k2)?;

        let lhs = k12.compose(&k3)?;
        let rhs = k1.compose(&k2.compose(&k3)?)?;
        worst[0] = worst[0].max(rel(lhs.max_diff(&rhs), n1 * n2 * n3));

        let lhs = k12.involution();
        let rhs = k2.involution().compose(&k1.involution())?;
        worst[1] = worst[1].max(rel(lhs.max_diff(&rhs), n1 * n2));

        worst[2] = worst[2].max((k12.envelope_norm() - n1 * n2) / (n1 * n2).max(1.0));

        // pointwise domination by the convolved envelopes
        let conv = k1.min_envelope().convolve(&k2.min_envelope())?;
        for (s, v) in k12.min_envelope().iter() {
            worst[3] = worst[3].max((v - conv.get(s)) / conv.get(s).max(1.0));
        }

        worst[4] = worst[4].max(rel((k1.involution().envelope_norm() - n1).abs(), n1));

        let f = generate::random_test_vector(&mut rng, g, d, &cols);
        let lhs = k12.apply(&f)?;
        let rhs = k1.apply(&k2.apply(&f)?)?;
        worst[5] = worst[5].max(rel(lhs.max_diff(&rhs), n1 * n2 * f.l2_norm()));

        let start = generate::random_test_vector(&mut rng, g, d, &k1.col_support());
        let est = k1.operator_norm_estimate(&start, 100)?;
        worst[6] = worst[6].max(est - n1);
    }
    let tol = cfg.tolerance;
    Ok(RunOutcome {
        checks: vec![
            Check::at_most("associativity", worst[0], tol),
            Check::at_most("involution anti-multiplicative", worst[1], tol),
            Check::at_most("norm submultiplicative", worst[2], tol),
            Check::at_most("envelope domination", worst[3], tol),
            Check::at_most("involution isometric", worst[4], tol),
            Check::at_most("representation multiplicative", worst[5], tol),
            Check::at_most("representation contractive", worst[6], 1e-9),
        ],
        files: vec![],
    })
}

fn covariance_check(cfg: &ExperimentConfig, g: &Group) -> Result<RunOutcome> {
    let els = g.elements().ok_or_else(|| Error::GroupNotFinite(g.to_string()))?;
    let mut rng = generate::rng(cfg.seed);
    let d = cfg.dim;
    let mut worst = [0.0f64; 10];
    for _ in 0..cfg.trials {
        let f = generate::random_covariance(&mut rng, g, d, &els, &els, 0.6);
        let h = generate::random_covariance(&mut rng, g, d, &els, &els, 0.6);
        let (nf, nh) = (f.l1_norm(), h.l1_norm());
        let fh = f.cov_product(&h)?;
        let rf = f.r_map();

        worst[0] = worst[0].max(rel(fh.r_map().max_diff(&rf.compose(&h.r_map())?), nf * nh));
        worst[1] = worst[1].max(rel(f.cov_involution().r_map().max_diff(&rf.involution()), nf));
        worst[2] = worst[2].max(rel((rf.envelope_norm() - nf).abs(), nf));
        worst[3] = worst[3].max(CovarianceElement::r_inverse(&rf).max_diff(&f));
        worst[4] = worst[4].max(rel((fh.l1_norm() - nf * nh).max(0.0), nf * nh));

        let xi = generate::random_pair_vector(&mut rng, g, d, &els);
        let eta = generate::random_pair_vector(&mut rng, g, d, &els);
        let lhs = fh.pi_regular(&xi)?;
        let rhs = f.pi_regular(&h.pi_regular(&xi)?)?;
        worst[5] = worst[5].max(rel(lhs.max_diff(&rhs), nf * nh * xi.l2_norm()));

        let a = f.pi_regular(&xi)?.inner(&eta);
        let b = xi.inner(&f.cov_involution().pi_regular(&eta)?);
        worst[6] = worst[6].max(rel((a - b).norm(), nf * xi.l2_norm() * eta.l2_norm()));

        let lhs = w_intertwine(&rf.apply_first(&xi)?);
        let rhs = f.pi_regular(&w_intertwine(&xi))?;
        worst[7] = worst[7].max(rel(lhs.max_diff(&rhs), nf * xi.l2_norm()));

        let tf = f.theta_embed()?;
        let lhs = fh.theta_embed()?;
        let rhs = tf.convolve(&h.theta_embed()?)?;
        worst[8] = worst[8].max(rel(lhs.max_diff(&rhs), nf * nh));
        worst[9] = worst[9].max(rel((tf.l1_norm() - nf).abs(), nf));
    }
    let tol = cfg.tolerance;
    Ok(RunOutcome {
        checks: vec![
            Check::at_most("R multiplicative", worst[0], tol),
            Check::at_most("R preserves involution", worst[1], tol),
            Check::at_most("R isometric", worst[2], tol),
            Check::at_most("R inverse round trip", worst[3], 0.0),
            Check::at_most("covariance norm submultiplicative", worst[4], tol),
            Check::at_most("pi multiplicative", worst[5], tol),
            Check::at_most("pi adjoint", worst[6], tol),
            Check::at_most("W intertwines", worst[7], tol),
            Check::at_most("theta multiplicative", worst[8], tol),
            Check::at_most("theta isometric", worst[9], tol),
        ],
        files: vec![],
    })
}

/// `(min Re, max |Im|)` of the spectrum of `f*⋆f`.
pub fn positivity_of_square(f: &CovarianceElement) -> Result<(f64, f64)> {
    let ff = f.cov_involution().cov_product(f)?;
    let spec = ff.symmetry_spectrum()?;
    let min_re = spec.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let max_im = spec.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok((min_re, max_im))
}

fn symmetry_check(cfg: &ExperimentConfig, g: &Group) -> Result<RunOutcome> {
    let els = g.elements().ok_or_else(|| Error::GroupNotFinite(g.to_string()))?;
    let mut rng = generate::rng(cfg.seed);
    let tol = cfg.spectral_tolerance;
    let mut checks = Vec::new();
    for trial in 0..cfg.trials {
        let f = generate::random_covariance(&mut rng, g, cfg.dim, &els, &els, 0.6);
        let (min_re, max_im) = positivity_of_square(&f)?;
        checks.push(Check::at_least(
            format!("trial {trial}: min Re spec(f*f)"),
            min_re,
            -tol,
        ));
        checks.push(Check::at_most(
            format!("trial {trial}: max |Im| spec(f*f)"),
            max_im,
            tol,
        ));
    }
    Ok(RunOutcome { checks, files: vec![] })
}

fn invert(cfg: &ExperimentConfig, g: &Group, out: &Path, require_fit: bool) -> Result<RunOutcome> {
    let k = build_kernel(cfg, g, cfg.seed)?;
    let (inv, report) = wiener::finite_section_inverse(&k, &cfg.inversion)?;

    let csv_path = out.join("decay.csv");
    io::write_decay_csv(std::fs::File::create(&csv_path)?, &report)?;
    let summary_path = out.join("summary.json");
    std::fs::write(&summary_path, io::decay_summary_to_string(&report))?;
    let kernel_path = out.join("inverse_kernel.json");
    io::write_kernel(&kernel_path, &inv)?;

    let mut checks = vec![
        Check::flag("sections stabilized", report.stabilized),
        Check::at_most("unitized residual", report.residual, 1e-8),
        Check::flag(
            "partial sums nondecreasing",
            report.l1_partial_sums.windows(2).all(|w| w[1] >= w[0]),
        ),
    ];
    if require_fit {
        let (rate, r2) = wiener::fit_decay(&report)?;
        checks.push(Check::at_most("fitted rate negative", rate, 0.0));
        checks.push(Check::at_least("fit r2", r2, cfg.min_r2));
        if let Some(expected) = cfg.expected_rate {
            checks.push(Check::at_most(
                "fitted rate error",
                (rate - expected).abs(),
                cfg.rate_tolerance,
            ));
        }
    }
    if cfg.neumann_terms > 0 {
        let n = wiener::neumann_inverse(&k, cfg.inversion.z, cfg.neumann_terms)?;
        let r_in = report.inner_radius[cfg.inversion.radii.last().unwrap()];
        let window = |x: &GroupPoint, y: &GroupPoint| g.word_length(x) <= r_in && g.word_length(y) <= r_in;
        let gap = n.kernel.restrict_xy(window).max_diff(&inv);
        checks.push(Check::at_most(
            "neumann agreement",
            gap,
            n.tail_bound + cfg.inversion.stabilization_tol,
        ));
    }
    Ok(RunOutcome {
        checks,
        files: vec![csv_path, summary_path, kernel_path],
    })
}

fn ideal_approx(cfg: &ExperimentConfig, g: &Group) -> Result<RunOutcome> {
    let k = build_kernel(cfg, g, cfg.seed)?;
    let mut checks = Vec::new();
    let mut previous: Option<f64> = None;
    for &n in &cfg.ideal_radii {
        let ideal = IdealSubspace::CompactSupport { radius: n };
        let kn = wiener::ideal_project(&k, &ideal)?;
        let measured = k.sub(&kn)?.envelope_norm();
        let bound = ideal.approximation_bound(&k);
        checks.push(Check::at_most(
            format!("radius {n}: |K-K_n| - |b-b_n|"),
            measured - bound,
            cfg.tolerance,
        ));
        if let Some(p) = previous {
            checks.push(Check::at_most(
                format!("radius {n}: monotone"),
                measured - p,
                cfg.tolerance,
            ));
        }
        previous = Some(measured);
    }
    Ok(RunOutcome { checks, files: vec![] })
}

fn contour(cfg: &ExperimentConfig, g: &Group) -> Result<RunOutcome> {
    let k = build_kernel(cfg, g, cfg.seed)?;
    let via_contour = wiener::contour_inverse(&k, cfg.contour_radius, cfg.contour_nodes, &cfg.inversion)?;
    let (direct, _) = wiener::finite_section_inverse(&k, &cfg.inversion.with_z(C64::new(0.0, 0.0)))?;
    Ok(RunOutcome {
        checks: vec![Check::at_most(
            "contour vs direct section inverse",
            via_contour.max_diff(&direct),
            cfg.contour_tolerance,
        )],
        files: vec![],
    })
}

fn kernel_io(cfg: &ExperimentConfig, g: &Group, out: &Path) -> Result<RunOutcome> {
    let k = match &cfg.input {
        Some(path) => io::read_kernel(path)?,
        None => build_kernel(cfg, g, cfg.seed)?,
    };
    let kernel_path = out.join("kernel.json");
    io::write_kernel(&kernel_path, &k)?;
    let env = k.min_envelope();
    let env_path = out.join("envelope.json");
    io::write_envelope(&env_path, &env)?;
    let reread = io::read_kernel(&kernel_path)?;
    Ok(RunOutcome {
        checks: vec![
            Check::flag("kernel file round trip", reread == k),
            Check::at_least("envelope norm", env.l1_norm(), 0.0),
        ],
        files: vec![kernel_path, env_path],
    })
}

/// Checks that an envelope norm is unchanged under conjugation by `a` from
/// both sides, and that the left and right actions commute.
pub fn conjugation_invariance(k: &Kernel, a: &GroupPoint, b: &GroupPoint) -> Result<(bool, bool)> {
    let n = k.envelope_norm();
    let l = k.conjugate_by_translation(a, Side::Left)?;
    let r = k.conjugate_by_translation(a, Side::Right)?;
    let invariant = l.envelope_norm() == n && r.envelope_norm() == n;
    let lr = l.conjugate_by_translation(b, Side::Right)?;
    let rl = k
        .conjugate_by_translation(b, Side::Right)?
        .conjugate_by_translation(a, Side::Left)?;
    Ok((invariant, lr == rl))
}
