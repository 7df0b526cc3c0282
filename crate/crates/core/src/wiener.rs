//! Inverse-closedness experiments.
//!
//! For a kernel `K` and a scalar `z`, the element `z·1 + K` is inverted by
//! finite sections: the block matrix `z·I + [K(x, y)]` over a word-metric
//! ball is inverted densely, `z⁻¹·I` is removed, and the remaining kernel is
//! read off on an inner ball to avoid boundary effects. Its envelope is the
//! empirical witness that the inverse stays in the kernel algebra.
//!
//! Two independent routes cross-check the sections: a Neumann series (valid
//! when `‖K‖ < |z|`) and the contour integral
//!
//! ```text
//! a⁻¹ = (1/2πi) ∮_{|α|=ε} α⁻¹ (α·1 + a)⁻¹ dα
//! ```
//!
//! evaluated with the trapezoidal rule, which on a circle reduces to the
//! average of the resolvents over equispaced nodes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::kernel::{Envelope, Kernel};
use crate::linalg::{self, Mat, C64};

/// Buckets whose envelope is below this fraction of the largest bucket are
/// treated as round-off and left out of decay fits.
pub const FIT_NOISE_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    pub z: C64,
    pub radii: Vec<u32>,
    pub inner_ratio: f64,
    pub stabilization_tol: f64,
    pub condition_cap: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            z: C64::new(1.0, 0.0),
            radii: vec![10, 20, 40],
            inner_ratio: 0.5,
            stabilization_tol: 1e-8,
            condition_cap: 1e12,
        }
    }
}

impl InversionConfig {
    pub fn with_z(&self, z: C64) -> Self {
        InversionConfig { z, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.radii.is_empty() {
            return bad("radii must be nonempty");
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return bad("radii must be strictly increasing");
        }
        if !(self.inner_ratio > 0.0 && self.inner_ratio <= 1.0) {
            return bad("inner_ratio must lie in (0, 1]");
        }
        if self.stabilization_tol.is_nan() || self.stabilization_tol <= 0.0 {
            return bad("stabilization_tol must be > 0");
        }
        if self.condition_cap.is_nan() || self.condition_cap <= 0.0 {
            return bad("condition_cap must be > 0");
        }
        if !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return bad("z must be finite");
        }
        Ok(())
    }

    pub fn inner_radius(&self, r: u32) -> u32 {
        (self.inner_ratio * r as f64).floor() as u32
    }
}

/// Envelopes of the extracted inverse kernels and summary statistics.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub envelope_by_radius: BTreeMap<u32, Envelope>,
    /// Inner-window radius used at each section radius.
    pub inner_radius: BTreeMap<u32, u32>,
    pub fitted_rate: Option<f64>,
    pub r2: Option<f64>,
    /// Cumulative `ℓ¹` mass of the largest-radius envelope by word-length shell.
    pub l1_partial_sums: Vec<f64>,
    pub stabilized: bool,
    /// `ℓ¹` distance between the two largest radii on the common window.
    pub stabilization_gap: Option<f64>,
    /// Max-modulus defect of `(z·1 + K)(z⁻¹·1 + K⁻)` against the unit on the
    /// trusted part of the inner window.
    pub residual: f64,
}

impl DecayReport {
    pub fn largest(&self) -> Option<(u32, &Envelope)> {
        self.envelope_by_radius.iter().next_back().map(|(r, e)| (*r, e))
    }
}

/// `‖M‖₁ ‖M⁻¹‖₁`.
fn condition_estimate(m: &Mat, inv: &Mat) -> f64 {
    linalg::norm1(m) * linalg::norm1(inv)
}

fn invert_section(m: Mat, radius: u32, cap: f64) -> Result<Mat> {
    let not_inv = |condition| Error::NotInvertibleAtScale { radius, condition };
    let inv = m.clone().lu().try_inverse().ok_or(not_inv(f64::INFINITY))?;
    let cond = condition_estimate(&m, &inv);
    if !cond.is_finite() || cond > cap {
        return Err(not_inv(cond));
    }
    Ok(inv)
}

/// Largest word length among the shifts of `k`.
fn reach(k: &Kernel) -> u32 {
    let g = k.group();
    k.entries().map(|(s, _, _)| g.word_length(s)).max().unwrap_or(0)
}

/// Max-modulus of the kernel part of `(z·1 + K)(z⁻¹·1 + inv) − 1` (for `z ≠ 0`)
/// or `K·inv − 1` (for `z = 0`) over `x, y ∈ window`.
pub fn unitized_residual(k: &Kernel, z: C64, inv: &Kernel, window: &[GroupPoint]) -> Result<f64> {
    let mut prod = k.compose(inv)?;
    if z != C64::new(0.0, 0.0) {
        prod = prod.add(&inv.scale(z))?.add(&k.scale(z.inv()))?;
    }
    let id = linalg::identity(k.dim());
    let mut worst: f64 = 0.0;
    for x in window {
        for y in window {
            let mut v = prod.kernel_at(x, y);
            if z == C64::new(0.0, 0.0) && x == y {
                v -= &id;
            }
            worst = worst.max(linalg::max_abs(&v));
        }
    }
    Ok(worst)
}

/// Inverts `z·1 + K` by finite sections over the configured radii.
///
/// Returns the kernel of `(z·1 + K)⁻¹ − z⁻¹·1` (of `K⁻¹` when `z = 0`) on the
/// inner window of the largest radius, and a report with the envelopes at
/// every radius.
pub fn finite_section_inverse(k: &Kernel, cfg: &InversionConfig) -> Result<(Kernel, DecayReport)> {
    cfg.validate()?;
    let g = k.group();
    let d = k.dim();
    let z = cfg.z;
    let zero = C64::new(0.0, 0.0);
    let mut extracted: BTreeMap<u32, Kernel> = BTreeMap::new();
    let mut inner_radius = BTreeMap::new();
    for &r in &cfg.radii {
        let pts = g.ball(r);
        let mut m = k.section(&pts);
        for i in 0..m.nrows() {
            m[(i, i)] += z;
        }
        let mut inv = invert_section(m, r, cfg.condition_cap)?;
        if z != zero {
            let zi = z.inv();
            for i in 0..inv.nrows() {
                inv[(i, i)] -= zi;
            }
        }
        let r_in = cfg.inner_radius(r);
        // ball() is sorted by word length, so the inner ball is a prefix
        let n_in = pts.iter().take_while(|p| g.word_length(p) <= r_in).count();
        let sub = inv.view((0, 0), (n_in * d, n_in * d)).into_owned();
        extracted.insert(r, Kernel::from_section(g.clone(), d, &pts[..n_in], &sub, 0.0));
        inner_radius.insert(r, r_in);
    }

    let envelope_by_radius: BTreeMap<u32, Envelope> = extracted.iter().map(|(r, kr)| (*r, kr.min_envelope())).collect();

    let (stabilized, stabilization_gap) = if cfg.radii.len() >= 2 {
        let r_small = cfg.radii[cfg.radii.len() - 2];
        let r_big = *cfg.radii.last().unwrap();
        let window = inner_radius[&r_small];
        let big = extracted[&r_big].restrict_xy(|x, y| g.word_length(x) <= window && g.word_length(y) <= window);
        let gap = big.min_envelope().l1_distance(&envelope_by_radius[&r_small]);
        (gap < cfg.stabilization_tol, Some(gap))
    } else {
        (false, None)
    };

    let r_max = *cfg.radii.last().unwrap();
    let result = extracted.remove(&r_max).unwrap();
    let r_in = inner_radius[&r_max];
    let trusted = g.ball(r_in.saturating_sub(reach(k)));
    let residual = unitized_residual(k, z, &result, &trusted)?;

    let env = &envelope_by_radius[&r_max];
    let mut report = DecayReport {
        l1_partial_sums: partial_sums(env),
        envelope_by_radius,
        inner_radius,
        fitted_rate: None,
        r2: None,
        stabilized,
        stabilization_gap,
        residual,
    };
    if let Ok((rate, r2)) = fit_decay(&report) {
        report.fitted_rate = Some(rate);
        report.r2 = Some(r2);
    }
    Ok((result, report))
}

/// Cumulative envelope mass by word-length shell `0, 1, …, max`.
pub fn partial_sums(env: &Envelope) -> Vec<f64> {
    let shells = shell_sums(env);
    let mut acc = 0.0;
    shells
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Envelope mass in each word-length shell.
pub fn shell_sums(env: &Envelope) -> Vec<f64> {
    let g = env.group();
    let mut by_len: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (s, v) in env.iter() {
        by_len.entry(g.word_length(s)).or_default().push(v);
    }
    let max = by_len.keys().next_back().copied().unwrap_or(0);
    if by_len.is_empty() {
        return Vec::new();
    }
    (0..=max)
        .map(|l| by_len.remove(&l).map(linalg::ordered_sum).unwrap_or(0.0))
        .collect()
}

/// Least-squares slope of `log max β` against word length, over the buckets
/// with length at most the inner radius of the largest section.
///
/// Returns `(rate, r²)`. Needs at least five nonzero buckets above the
/// round-off floor.
pub fn fit_decay(report: &DecayReport) -> Result<(f64, f64)> {
    let (r, env) = report.largest().ok_or(Error::TooFewBuckets(0))?;
    let limit = report.inner_radius.get(&r).copied().unwrap_or(r);
    let g = env.group();
    let mut buckets: BTreeMap<u32, f64> = BTreeMap::new();
    for (s, v) in env.iter() {
        let l = g.word_length(s);
        if l <= limit {
            let slot = buckets.entry(l).or_insert(0.0);
            *slot = slot.max(v);
        }
    }
    let top = buckets.values().copied().fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = buckets
        .into_iter()
        .filter(|(_, v)| *v > FIT_NOISE_FLOOR * top)
        .map(|(l, v)| (l as f64, v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::TooFewBuckets(pts.len()));
    }
    Ok(least_squares(&pts))
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, r2)
}

/// Truncated Neumann series for `(z·1 + K)⁻¹`.
#[derive(Clone, Debug)]
pub struct NeumannInverse {
    /// Coefficient of the unit, `z⁻¹`.
    pub unit_coeff: C64,
    /// `z⁻¹ Σ_{n=1}^{terms} (−z⁻¹)ⁿ Kⁿ`.
    pub kernel: Kernel,
    /// `‖K‖ / |z|`.
    pub q: f64,
    /// `|z|⁻¹ q^{terms+1} / (1 − q)`, bounding the dropped tail in norm.
    pub tail_bound: f64,
}

pub fn neumann_tail_bound(z_abs: f64, q: f64, terms: usize) -> f64 {
    q.powi(terms as i32 + 1) / ((1.0 - q) * z_abs)
}

/// `z⁻¹ Σ_{n=0}^{terms} (−z⁻¹)ⁿ Kⁿ`, refusing when `‖K‖ >= |z|`.
pub fn neumann_inverse(k: &Kernel, z: C64, terms: usize) -> Result<NeumannInverse> {
    if terms < 1 {
        return Err(Error::InvalidParameter("terms must be >= 1".into()));
    }
    if z.norm() == 0.0 {
        return Err(Error::NeumannDivergent(f64::INFINITY));
    }
    let q = k.envelope_norm() / z.norm();
    if q >= 1.0 {
        return Err(Error::NeumannDivergent(q));
    }
    let zi = z.inv();
    let step = -zi;
    let mut power = k.scale(step); // (−z⁻¹K)ⁿ
    let mut sum = power.clone();
    for _ in 1..terms {
        power = power.compose(&k.scale(step))?;
        if power.is_empty() {
            break;
        }
        sum = sum.add(&power)?;
    }
    Ok(NeumannInverse {
        unit_coeff: zi,
        kernel: sum.scale(zi),
        q,
        tail_bound: neumann_tail_bound(z.norm(), q, terms),
    })
}

/// `a⁻¹` for `a = T_K` via the residue-corrected contour integral on
/// `|α| = radius_eps`, each resolvent from [`finite_section_inverse`].
///
/// The `α⁻¹·1` parts of the resolvents average to zero over the nodes, so the
/// returned kernel is the full inverse.
pub fn contour_inverse(k: &Kernel, radius_eps: f64, nodes: usize, cfg: &InversionConfig) -> Result<Kernel> {
    if nodes < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 nodes, got {nodes}")));
    }
    if !(radius_eps > 0.0 && radius_eps.is_finite()) {
        return Err(Error::InvalidParameter("contour radius must be positive".into()));
    }
    let mut acc = Kernel::zero(k.group().clone(), k.dim());
    for j in 0..nodes {
        let alpha = C64::from_polar(radius_eps, 2.0 * PI * j as f64 / nodes as f64);
        let (res, _) = finite_section_inverse(k, &cfg.with_z(alpha)).map_err(|e| Error::ContourNode {
            node: j,
            source: Box::new(e),
        })?;
        acc = acc.add(&res)?;
    }
    Ok(acc.scale(C64::new(1.0 / nodes as f64, 0.0)))
}

/// A family of envelopes approximating a given envelope from below.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealSubspace {
    /// `β_n = β · 1_{ball(radius)}`.
    CompactSupport { radius: u32 },
    /// `β_n = min(β, level)`. Envelopes here are finitely supported, so the
    /// compact cutoff is already in place.
    Truncation { level: f64 },
}

impl IdealSubspace {
    /// The approximant `β_n` of `beta`.
    pub fn approximate(&self, beta: &Envelope) -> Envelope {
        let g = beta.group();
        match *self {
            IdealSubspace::CompactSupport { radius } => beta.filter(|s| g.word_length(s) <= radius),
            IdealSubspace::Truncation { level } => {
                Envelope::from_values(g.clone(), beta.iter().map(|(s, v)| (s.clone(), v.min(level.max(0.0)))))
            }
        }
    }

    /// `‖β − β_n‖₁` for `β = min_envelope(k)`.
    pub fn approximation_bound(&self, k: &Kernel) -> f64 {
        let beta = k.min_envelope();
        beta.l1_distance(&self.approximate(&beta))
    }
}

/// `K_n(x, y) = a_n(x·y⁻¹) K(x, y)` with `a_n = β_n / β` (zero where `β`
/// vanishes).
pub fn ideal_project(k: &Kernel, ideal: &IdealSubspace) -> Result<Kernel> {
    let beta = k.min_envelope();
    ideal_project_with(k, &ideal.approximate(&beta))
}

/// As [`ideal_project`] with an explicit approximant `beta_n <= β`.
pub fn ideal_project_with(k: &Kernel, beta_n: &Envelope) -> Result<Kernel> {
    let beta = k.min_envelope();
    for (s, v) in beta_n.iter() {
        if v > beta.get(s) {
            return Err(Error::IdealNotDominated(s.clone()));
        }
    }
    Ok(k.scale_by_shift(|s| {
        let b = beta.get(s);
        if b == 0.0 {
            0.0
        } else {
            beta_n.get(s) / b
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn p(c: &[i64]) -> GroupPoint {
        GroupPoint::new(c)
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn shift_kernel(c: f64, window: u32) -> Kernel {
        let g = Group::zd(1);
        let mut k = Kernel::zero(g.clone(), 1);
        for t in g.ball(window) {
            k.insert(p(&[1]), t, linalg::scalar(1, re(c)));
        }
        k
    }

    #[test]
    fn zero_kernel_inverse_is_pure_unit() {
        let k = Kernel::zero(Group::zd(1), 1);
        let cfg = InversionConfig {
            z: re(2.0),
            radii: vec![4, 8],
            ..Default::default()
        };
        let (inv, report) = finite_section_inverse(&k, &cfg).unwrap();
        assert!(inv.max_abs() == 0.0);
        assert!(report.stabilized);
        assert!(fit_decay(&report).is_err());
        let n = neumann_inverse(&k, re(2.0), 5).unwrap();
        assert_eq!(n.unit_coeff, re(0.5));
        assert!(n.kernel.is_empty());
    }

    #[test]
    fn geometric_shift_inverse() {
        let k = shift_kernel(0.5, 60);
        let cfg = InversionConfig {
            radii: vec![20, 40],
            ..Default::default()
        };
        let (inv, report) = finite_section_inverse(&k, &cfg).unwrap();
        let g = Group::zd(1);
        for x in -20..=20i64 {
            for y in -20..=20i64 {
                let expected = if x > y { (-0.5f64).powi((x - y) as i32) } else { 0.0 };
                let v = inv.kernel_at(&p(&[x]), &p(&[y]))[(0, 0)];
                assert!((v - re(expected)).norm() < 1e-12);
            }
        }
        let env = report.largest().unwrap().1;
        for n in 1..=40i64 {
            assert!((env.get(&p(&[n])) - 0.5f64.powi(n as i32)).abs() < 1e-12);
        }
        assert!(report.stabilized);
        assert!(report.residual < 1e-12);
        let rate = report.fitted_rate.unwrap();
        assert!((rate - 0.5f64.ln()).abs() < 1e-9);
        assert!(report.r2.unwrap() > 0.999);
        assert!(report.l1_partial_sums.windows(2).all(|w| w[1] >= w[0]));
        let _ = g;
    }

    #[test]
    fn finite_group_sections_are_exact() {
        let g = Group::cyclic(6);
        let mut r = crate::generate::rng(11);
        let k = crate::generate::random_kernel(&mut r, &g, 2, &g.elements().unwrap(), &g.elements().unwrap(), 1.0);
        let z = re(10.0);
        let cfg = InversionConfig {
            z,
            radii: vec![3, 5],
            inner_ratio: 1.0,
            ..Default::default()
        };
        let (inv, report) = finite_section_inverse(&k, &cfg).unwrap();
        let els = g.elements().unwrap();
        let mut m = k.section(&els);
        for i in 0..m.nrows() {
            m[(i, i)] += z;
        }
        let mut direct = m.try_inverse().unwrap();
        for i in 0..direct.nrows() {
            direct[(i, i)] -= z.inv();
        }
        let direct = Kernel::from_section(g.clone(), 2, &els, &direct, 0.0);
        assert!(inv.max_diff(&direct) < 1e-12);
        assert!(report.stabilized);
    }

    #[test]
    fn singular_section_is_reported() {
        let k = Kernel::zero(Group::zd(1), 1);
        let cfg = InversionConfig {
            z: re(0.0),
            radii: vec![3],
            ..Default::default()
        };
        assert!(matches!(
            finite_section_inverse(&k, &cfg),
            Err(Error::NotInvertibleAtScale { radius: 3, .. })
        ));
    }

    #[test]
    fn bad_configs_are_rejected() {
        let k = Kernel::zero(Group::zd(1), 1);
        for cfg in [
            InversionConfig {
                radii: vec![],
                ..Default::default()
            },
            InversionConfig {
                radii: vec![3, 3],
                ..Default::default()
            },
            InversionConfig {
                inner_ratio: 0.0,
                ..Default::default()
            },
            InversionConfig {
                stabilization_tol: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                finite_section_inverse(&k, &cfg),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn neumann_refuses_divergent_series() {
        let k = shift_kernel(0.5, 3);
        assert!(matches!(
            neumann_inverse(&k, re(0.5), 10),
            Err(Error::NeumannDivergent(_))
        ));
        assert!(neumann_inverse(&k, re(0.6), 10).is_ok());
    }

    #[test]
    fn neumann_tail_squares_when_terms_double() {
        let (z, q) = (2.0, 0.3);
        for n in [3usize, 7, 12] {
            let scale = (1.0 - q) * z / q;
            let t1 = neumann_tail_bound(z, q, n) * scale;
            let t2 = neumann_tail_bound(z, q, 2 * n) * scale;
            assert!((t2 - t1 * t1).abs() <= 1e-15 * t2.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn neumann_matches_geometric_series() {
        let k = shift_kernel(0.5, 10);
        let n = neumann_inverse(&k, re(1.0), 30).unwrap();
        // (1 + cS)⁻¹ − 1 = Σ_{n>=1} (−c)ⁿ Sⁿ restricted by the column window
        let v = n.kernel.kernel_at(&p(&[3]), &p(&[0]))[(0, 0)];
        assert!((v - re(-0.125)).norm() < 1e-15);
        assert!(n.tail_bound < 1e-9);
    }

    #[test]
    fn contour_scalar_case() {
        let g = Group::zd(1);
        let k = Kernel::scalar_on(g.clone(), 1, &g.ball(6), re(2.0));
        let cfg = InversionConfig {
            radii: vec![4, 8],
            ..Default::default()
        };
        let inv = contour_inverse(&k, 1.0, 64, &cfg).unwrap();
        for x in g.ball(4) {
            let v = inv.kernel_at(&x, &x)[(0, 0)];
            assert!((v - re(0.5)).norm() < 1e-10);
        }
        assert!(matches!(
            contour_inverse(&k, 1.0, 4, &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn contour_node_failure_names_the_node() {
        let g = Group::zd(1);
        // spectrum {−1} lies on the contour |α| = 1 at α = 1
        let k = Kernel::scalar_on(g.clone(), 1, &g.ball(6), re(-1.0));
        let cfg = InversionConfig {
            radii: vec![2],
            ..Default::default()
        };
        match contour_inverse(&k, 1.0, 8, &cfg) {
            Err(Error::ContourNode { node: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ideal_projection_examples() {
        let g = Group::zd(1);
        let mut k = Kernel::zero(g.clone(), 1);
        for s in -5..=5i64 {
            k.insert(p(&[s]), p(&[0]), linalg::scalar(1, re(2f64.powi(-(s.abs() as i32)))));
        }
        let same = ideal_project(&k, &IdealSubspace::CompactSupport { radius: 5 }).unwrap();
        assert_eq!(same, k);
        let same = ideal_project(&k, &IdealSubspace::Truncation { level: 1.0 }).unwrap();
        assert_eq!(same, k);
        let cut = ideal_project(&k, &IdealSubspace::Truncation { level: 0.25 }).unwrap();
        assert_eq!(cut.min_envelope().max_value(), 0.25);
        let bad = Envelope::from_values(g.clone(), [(p(&[0]), 2.0)]);
        assert!(matches!(ideal_project_with(&k, &bad), Err(Error::IdealNotDominated(_))));
    }
}
