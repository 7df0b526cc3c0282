//! Operator-valued kernels with summable envelopes.
//!
//! A [`Kernel`] is a finitely supported map `(x, y) ↦ K(x, y)` into `d×d`
//! complex matrices. It is stored in convolution coordinates `(s, t)` with
//! `s = x·y⁻¹` and `t = y`, so the minimal dominating function is read off by
//! taking, for each `s`, the largest operator norm over `t`:
//!
//! ```text
//! β(s) = max_t ‖K(s·t, t)‖,    ‖K‖ = Σ_s β(s)
//! ```
//!
//! Kernels act on [`TestVector`]s by `(T_K f)(x) = Σ_y K(x, y) f(y)` and
//! compose as `(K₁ ⋆ K₂)(x, z) = Σ_y K₁(x, y) K₂(y, z)`. All sums run over
//! sorted supports, so results are bit-reproducible.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::linalg::{self, Mat, C64};

pub type CVec = DVector<C64>;

pub(crate) fn same_group(a: &Group, b: &Group) -> Result<()> {
    if a != b {
        return Err(Error::GroupMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::MatrixDimMismatch { expected, found });
    }
    Ok(())
}

/// A finitely supported nonnegative function on the group.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    group: Group,
    values: BTreeMap<GroupPoint, f64>,
}

impl Envelope {
    pub fn new(group: Group) -> Self {
        Envelope {
            group,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values(group: Group, values: impl IntoIterator<Item = (GroupPoint, f64)>) -> Self {
        let mut env = Envelope::new(group);
        for (s, v) in values {
            env.set(s, v);
        }
        env
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Sets `β(s)`; zero values are pruned. Negative or non-finite values
    /// panic.
    pub fn set(&mut self, s: GroupPoint, v: f64) {
        assert!(v >= 0.0 && v.is_finite(), "envelope values must be finite and >= 0");
        if v > 0.0 {
            self.values.insert(s, v);
        } else {
            self.values.remove(&s);
        }
    }

    pub fn get(&self, s: &GroupPoint) -> f64 {
        self.values.get(s).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupPoint, f64)> {
        self.values.iter().map(|(s, v)| (s, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        linalg::ordered_sum(self.values.values().copied().collect())
    }

    pub fn max_value(&self) -> f64 {
        self.values.values().copied().fold(0.0, f64::max)
    }

    /// `(β₁ ⋆ β₂)(s) = Σ_u β₁(u) β₂(u⁻¹ s)`.
    pub fn convolve(&self, other: &Envelope) -> Result<Envelope> {
        same_group(&self.group, &other.group)?;
        let g = &self.group;
        let mut acc: BTreeMap<GroupPoint, f64> = BTreeMap::new();
        for (u, a) in self.iter() {
            for (w, b) in other.iter() {
                *acc.entry(g.mul(u, w)).or_insert(0.0) += a * b;
            }
        }
        Ok(Envelope::from_values(g.clone(), acc))
    }

    /// `ℓ¹` distance between two envelopes.
    pub fn l1_distance(&self, other: &Envelope) -> f64 {
        let mut keys: Vec<&GroupPoint> = self.values.keys().chain(other.values.keys()).collect();
        keys.sort();
        keys.dedup();
        linalg::ordered_sum(keys.into_iter().map(|s| (self.get(s) - other.get(s)).abs()).collect())
    }

    /// Restriction to `s` with `keep(s)`.
    pub fn filter(&self, keep: impl Fn(&GroupPoint) -> bool) -> Envelope {
        Envelope::from_values(
            self.group.clone(),
            self.iter().filter(|(s, _)| keep(s)).map(|(s, v)| (s.clone(), v)),
        )
    }
}

/// Which translation to conjugate by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A finitely supported kernel `Γ × Γ → M_d(ℂ)` in `(s, t)` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    group: Group,
    dim: usize,
    entries: BTreeMap<(GroupPoint, GroupPoint), Mat>,
}

impl Kernel {
    /// The zero kernel.
    pub fn zero(group: Group, dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Kernel {
            group,
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// `K(x, y) = δ_{x=y}·I` for `y` in `window`.
    pub fn identity_on(group: Group, dim: usize, window: &[GroupPoint]) -> Self {
        Self::scalar_on(group, dim, window, C64::new(1.0, 0.0))
    }

    /// `K(x, y) = δ_{x=y}·c·I` for `y` in `window`.
    pub fn scalar_on(group: Group, dim: usize, window: &[GroupPoint], c: C64) -> Self {
        let mut k = Kernel::zero(group, dim);
        let e = k.group.identity();
        for t in window {
            k.insert(e.clone(), t.clone(), linalg::scalar(dim, c));
        }
        k
    }

    /// The identity kernel on the whole group; `None` for infinite groups.
    pub fn unit(group: Group, dim: usize) -> Option<Self> {
        let els = group.elements()?;
        Some(Kernel::identity_on(group, dim, &els))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored entries in sorted `(s, t)` order.
    pub fn entries(&self) -> impl Iterator<Item = (&GroupPoint, &GroupPoint, &Mat)> {
        self.entries.iter().map(|((s, t), m)| (s, t, m))
    }

    /// Stores `m` at `(s, t)`, replacing any previous entry. Zero matrices
    /// are pruned.
    pub fn insert(&mut self, s: GroupPoint, t: GroupPoint, m: Mat) {
        assert_eq!((m.nrows(), m.ncols()), (self.dim, self.dim), "entry has wrong size");
        if linalg::is_zero(&m) {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), m);
        }
    }

    /// Stores `m` as the value at `(x, y)`.
    pub fn insert_xy(&mut self, x: &GroupPoint, y: &GroupPoint, m: Mat) {
        let s = self.group.div(x, y);
        self.insert(s, y.clone(), m);
    }

    fn accumulate(acc: &mut BTreeMap<(GroupPoint, GroupPoint), Mat>, key: (GroupPoint, GroupPoint), m: Mat) {
        match acc.get_mut(&key) {
            Some(v) => *v += m,
            None => {
                acc.insert(key, m);
            }
        }
    }

    fn from_map(group: Group, dim: usize, map: BTreeMap<(GroupPoint, GroupPoint), Mat>) -> Self {
        let entries = map.into_iter().filter(|(_, m)| !linalg::is_zero(m)).collect();
        Kernel { group, dim, entries }
    }

    /// Value at `(x, y)`, i.e. the entry stored at `(x·y⁻¹, y)`.
    pub fn kernel_at(&self, x: &GroupPoint, y: &GroupPoint) -> Mat {
        let s = self.group.div(x, y);
        self.entries
            .get(&(s, y.clone()))
            .cloned()
            .unwrap_or_else(|| linalg::zeros(self.dim))
    }

    /// The entry stored at `(s, t)`.
    pub fn entry(&self, s: &GroupPoint, t: &GroupPoint) -> Option<&Mat> {
        self.entries.get(&(s.clone(), t.clone()))
    }

    /// The pointwise smallest dominating function,
    /// `β(s) = max_t ‖K(s·t, t)‖_op`.
    pub fn min_envelope(&self) -> Envelope {
        let mut env = Envelope::new(self.group.clone());
        for ((s, _), m) in &self.entries {
            let v = linalg::op_norm(m);
            if v > env.get(s) {
                env.set(s.clone(), v);
            }
        }
        env
    }

    /// `ℓ¹` norm of [`Kernel::min_envelope`].
    pub fn envelope_norm(&self) -> f64 {
        self.min_envelope().l1_norm()
    }

    fn check_compatible(&self, other: &Kernel) -> Result<()> {
        same_group(&self.group, &other.group)?;
        same_dim(self.dim, other.dim)
    }

    /// Kernel product `(K₁ ⋆ K₂)(x, z) = Σ_y K₁(x, y) K₂(y, z)`.
    pub fn compose(&self, other: &Kernel) -> Result<Kernel> {
        self.check_compatible(other)?;
        let g = &self.group;
        // entries of self grouped by their column y = t
        let mut by_col: BTreeMap<&GroupPoint, Vec<(&GroupPoint, &Mat)>> = BTreeMap::new();
        for ((s, t), m) in &self.entries {
            by_col.entry(t).or_default().push((s, m));
        }
        let mut acc = BTreeMap::new();
        for ((s2, t2), m2) in &other.entries {
            let y = g.mul(s2, t2);
            if let Some(list) = by_col.get(&y) {
                for (s1, m1) in list {
                    Self::accumulate(&mut acc, (g.mul(s1, s2), t2.clone()), *m1 * m2);
                }
            }
        }
        Ok(Kernel::from_map(g.clone(), self.dim, acc))
    }

    /// `K*(x, y) = K(y, x)^H`.
    pub fn involution(&self) -> Kernel {
        let g = &self.group;
        let entries = self
            .entries
            .iter()
            .map(|((s, t), m)| ((g.inv(s), g.mul(s, t)), m.adjoint()))
            .collect();
        Kernel {
            group: g.clone(),
            dim: self.dim,
            entries,
        }
    }

    pub fn add(&self, other: &Kernel) -> Result<Kernel> {
        self.check_compatible(other)?;
        let mut acc = self.entries.clone();
        for (k, m) in &other.entries {
            Self::accumulate(&mut acc, k.clone(), m.clone());
        }
        Ok(Kernel::from_map(self.group.clone(), self.dim, acc))
    }

    pub fn sub(&self, other: &Kernel) -> Result<Kernel> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Kernel {
        let map = self.entries.iter().map(|(k, m)| (k.clone(), m * c)).collect();
        Kernel::from_map(self.group.clone(), self.dim, map)
    }

    /// Multiplies each entry at `(s, t)` by `weight(s)`.
    pub fn scale_by_shift(&self, weight: impl Fn(&GroupPoint) -> f64) -> Kernel {
        let map = self
            .entries
            .iter()
            .map(|((s, t), m)| ((s.clone(), t.clone()), m * C64::new(weight(s), 0.0)))
            .collect();
        Kernel::from_map(self.group.clone(), self.dim, map)
    }

    /// Keeps entries whose `(x, y)` satisfies `keep`.
    pub fn restrict_xy(&self, keep: impl Fn(&GroupPoint, &GroupPoint) -> bool) -> Kernel {
        let g = &self.group;
        let entries = self
            .entries
            .iter()
            .filter(|((s, t), _)| keep(&g.mul(s, t), t))
            .map(|(k, m)| (k.clone(), m.clone()))
            .collect();
        Kernel {
            group: g.clone(),
            dim: self.dim,
            entries,
        }
    }

    /// Largest entrywise modulus over all stored matrices.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Kernel) -> f64 {
        let zero = linalg::zeros(self.dim);
        let mut worst: f64 = 0.0;
        for (k, m) in &self.entries {
            let o = other.entries.get(k).unwrap_or(&zero);
            worst = worst.max(linalg::max_abs(&(m - o)));
        }
        for (k, m) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(linalg::max_abs(m));
            }
        }
        worst
    }

    /// Rows `x = s·t` touched by the support.
    pub fn row_support(&self) -> Vec<GroupPoint> {
        let mut v: Vec<_> = self.entries.keys().map(|(s, t)| self.group.mul(s, t)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Columns `y = t` touched by the support.
    pub fn col_support(&self) -> Vec<GroupPoint> {
        let mut v: Vec<_> = self.entries.keys().map(|(_, t)| t.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `(T_K f)(x) = Σ_y K(x, y) f(y)`.
    pub fn apply(&self, f: &TestVector) -> Result<TestVector> {
        same_group(&self.group, &f.group)?;
        same_dim(self.dim, f.dim)?;
        let g = &self.group;
        let mut out = TestVector::zero(g.clone(), self.dim);
        for ((s, t), m) in &self.entries {
            if let Some(v) = f.values.get(t) {
                out.add_at(g.mul(s, t), m * v);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `T_K ⊗ id` on functions of two variables, acting in the first.
    pub fn apply_first(&self, xi: &PairVector) -> Result<PairVector> {
        same_group(&self.group, &xi.group)?;
        same_dim(self.dim, xi.dim)?;
        let g = &self.group;
        let mut by_col: BTreeMap<&GroupPoint, Vec<(&GroupPoint, &Mat)>> = BTreeMap::new();
        for ((s, t), m) in &self.entries {
            by_col.entry(t).or_default().push((s, m));
        }
        let mut out = PairVector::zero(g.clone(), self.dim);
        for ((y, z), v) in &xi.values {
            if let Some(list) = by_col.get(y) {
                for (s, m) in list {
                    out.add_at((g.mul(s, y), z.clone()), *m * v);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Conjugation by a translation.
    ///
    /// Right: `(x, y) ↦ K(x·a, y·a)`, the kernel of `ρ(a) T_K ρ(a)⁻¹`.
    /// Left: `(x, y) ↦ K(a⁻¹·x, a⁻¹·y)`, the kernel of `λ(a) T_K λ(a)⁻¹`.
    pub fn conjugate_by_translation(&self, a: &GroupPoint, side: Side) -> Result<Kernel> {
        self.group.check(a)?;
        let g = &self.group;
        let ainv = g.inv(a);
        let entries = self
            .entries
            .iter()
            .map(|((s, t), m)| {
                let key = match side {
                    // K(xa, ya) has shift s and column t·a⁻¹
                    Side::Right => (s.clone(), g.mul(t, &ainv)),
                    Side::Left => (g.mul(&g.mul(a, s), &ainv), g.mul(a, t)),
                };
                (key, m.clone())
            })
            .collect();
        Ok(Kernel {
            group: g.clone(),
            dim: self.dim,
            entries,
        })
    }

    /// Dense block matrix `[K(x, y)]_{x, y ∈ points}` of size `n·d`.
    pub fn section(&self, points: &[GroupPoint]) -> Mat {
        let d = self.dim;
        let n = points.len();
        let index: BTreeMap<&GroupPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut out = Mat::zeros(n * d, n * d);
        for ((s, t), m) in &self.entries {
            let Some(&j) = index.get(t) else { continue };
            let Some(&i) = index.get(&self.group.mul(s, t)) else {
                continue;
            };
            out.view_mut((i * d, j * d), (d, d)).copy_from(m);
        }
        out
    }

    /// Builds a kernel from a dense block matrix indexed by `points`.
    /// Blocks with every entry of modulus `<= drop_below` are skipped.
    pub fn from_section(group: Group, dim: usize, points: &[GroupPoint], m: &Mat, drop_below: f64) -> Kernel {
        let mut k = Kernel::zero(group, dim);
        for (i, x) in points.iter().enumerate() {
            for (j, y) in points.iter().enumerate() {
                let block = m.view((i * dim, j * dim), (dim, dim)).into_owned();
                if linalg::max_abs(&block) > drop_below {
                    k.insert_xy(x, y, block);
                }
            }
        }
        k
    }

    /// Power-iteration estimate of `‖T_K‖` on `ℓ²`, started from `start`.
    pub fn operator_norm_estimate(&self, start: &TestVector, iterations: usize) -> Result<f64> {
        let adj = self.involution();
        let mut v = start.clone();
        let n0 = v.l2_norm();
        if n0 == 0.0 {
            return Ok(0.0);
        }
        v = v.scale(C64::new(1.0 / n0, 0.0));
        let mut est = 0.0;
        for _ in 0..iterations {
            let w = self.apply(&v)?;
            est = w.l2_norm();
            if est == 0.0 {
                return Ok(0.0);
            }
            let u = adj.apply(&w)?;
            let nu = u.l2_norm();
            if nu == 0.0 {
                break;
            }
            v = u.scale(C64::new(1.0 / nu, 0.0));
        }
        Ok(est)
    }
}

/// A finitely supported function `Γ → ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestVector {
    group: Group,
    dim: usize,
    values: BTreeMap<GroupPoint, CVec>,
}

impl TestVector {
    pub fn zero(group: Group, dim: usize) -> Self {
        TestVector {
            group,
            dim,
            values: BTreeMap::new(),
        }
    }

    /// `δ_x ⊗ e_i`.
    pub fn basis(group: Group, dim: usize, x: GroupPoint, i: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[i] = C64::new(1.0, 0.0);
        let mut out = TestVector::zero(group, dim);
        out.set(x, v);
        out
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, x: GroupPoint, v: CVec) {
        assert_eq!(v.len(), self.dim, "vector has wrong length");
        self.values.insert(x, v);
    }

    pub fn get(&self, x: &GroupPoint) -> CVec {
        self.values.get(x).cloned().unwrap_or_else(|| CVec::zeros(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupPoint, &CVec)> {
        self.values.iter()
    }

    fn add_at(&mut self, x: GroupPoint, v: CVec) {
        match self.values.get_mut(&x) {
            Some(w) => *w += v,
            None => {
                self.values.insert(x, v);
            }
        }
    }

    fn prune(&mut self) {
        self.values.retain(|_, v| v.iter().any(|z| z.re != 0.0 || z.im != 0.0));
    }

    pub fn l2_norm(&self) -> f64 {
        linalg::ordered_sum(self.values.values().map(|v| v.norm_squared()).collect()).sqrt()
    }

    /// `⟨self, other⟩`, conjugate-linear in `other`.
    pub fn inner(&self, other: &TestVector) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (x, v) in &self.values {
            if let Some(w) = other.values.get(x) {
                acc += w.dotc(v);
            }
        }
        acc
    }

    pub fn scale(&self, c: C64) -> TestVector {
        TestVector {
            group: self.group.clone(),
            dim: self.dim,
            values: self.values.iter().map(|(x, v)| (x.clone(), v * c)).collect(),
        }
    }

    pub fn max_diff(&self, other: &TestVector) -> f64 {
        let mut keys: Vec<&GroupPoint> = self.values.keys().chain(other.values.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|x| {
                (self.get(x) - other.get(x))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `(ρ(a)φ)(x) = φ(x·a)`.
    pub fn translate_right(&self, a: &GroupPoint) -> TestVector {
        let ainv = self.group.inv(a);
        self.remap(|x| self.group.mul(x, &ainv))
    }

    /// `(λ(a)φ)(x) = φ(a⁻¹·x)`.
    pub fn translate_left(&self, a: &GroupPoint) -> TestVector {
        self.remap(|x| self.group.mul(a, x))
    }

    fn remap(&self, f: impl Fn(&GroupPoint) -> GroupPoint) -> TestVector {
        TestVector {
            group: self.group.clone(),
            dim: self.dim,
            values: self.values.iter().map(|(x, v)| (f(x), v.clone())).collect(),
        }
    }
}

/// A finitely supported function `Γ × Γ → ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairVector {
    group: Group,
    dim: usize,
    values: BTreeMap<(GroupPoint, GroupPoint), CVec>,
}

impl PairVector {
    pub fn zero(group: Group, dim: usize) -> Self {
        PairVector {
            group,
            dim,
            values: BTreeMap::new(),
        }
    }

    /// `δ_{(x, z)} ⊗ e_i`.
    pub fn basis(group: Group, dim: usize, x: GroupPoint, z: GroupPoint, i: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[i] = C64::new(1.0, 0.0);
        let mut out = PairVector::zero(group, dim);
        out.set(x, z, v);
        out
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, x: GroupPoint, z: GroupPoint, v: CVec) {
        assert_eq!(v.len(), self.dim, "vector has wrong length");
        self.values.insert((x, z), v);
    }

    pub fn get(&self, x: &GroupPoint, z: &GroupPoint) -> CVec {
        self.values
            .get(&(x.clone(), z.clone()))
            .cloned()
            .unwrap_or_else(|| CVec::zeros(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(GroupPoint, GroupPoint), &CVec)> {
        self.values.iter()
    }

    pub(crate) fn add_at(&mut self, key: (GroupPoint, GroupPoint), v: CVec) {
        match self.values.get_mut(&key) {
            Some(w) => *w += v,
            None => {
                self.values.insert(key, v);
            }
        }
    }

    pub(crate) fn prune(&mut self) {
        self.values.retain(|_, v| v.iter().any(|z| z.re != 0.0 || z.im != 0.0));
    }

    pub fn l2_norm(&self) -> f64 {
        linalg::ordered_sum(self.values.values().map(|v| v.norm_squared()).collect()).sqrt()
    }

    pub fn inner(&self, other: &PairVector) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in &self.values {
            if let Some(w) = other.values.get(k) {
                acc += w.dotc(v);
            }
        }
        acc
    }

    pub fn max_diff(&self, other: &PairVector) -> f64 {
        let mut keys: Vec<&(GroupPoint, GroupPoint)> = self.values.keys().chain(other.values.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(x, z)| {
                (self.get(x, z) - other.get(x, z))
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Relabels points; `f` must be a bijection on the support.
    pub fn remap(&self, f: impl Fn(&GroupPoint, &GroupPoint) -> (GroupPoint, GroupPoint)) -> PairVector {
        PairVector {
            group: self.group.clone(),
            dim: self.dim,
            values: self.values.iter().map(|((x, z), v)| (f(x, z), v.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> GroupPoint {
        GroupPoint::new(c)
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn z_window(r: i64) -> Vec<GroupPoint> {
        (-r..=r).map(|t| p(&[t])).collect()
    }

    fn shift_kernel(shift: i64, weight: C64, window: &[GroupPoint]) -> Kernel {
        let mut k = Kernel::zero(Group::zd(1), 1);
        for t in window {
            k.insert(p(&[shift]), t.clone(), linalg::scalar(1, weight));
        }
        k
    }

    #[test]
    fn kernel_at_reads_shift_coordinates() {
        let id = Kernel::identity_on(Group::zd(1), 2, &z_window(3));
        assert_eq!(id.kernel_at(&p(&[2]), &p(&[2])), linalg::identity(2));
        assert_eq!(id.kernel_at(&p(&[2]), &p(&[1])), linalg::zeros(2));
        assert_eq!(id.kernel_at(&p(&[9]), &p(&[9])), linalg::zeros(2));

        let mut k = Kernel::zero(Group::zd(1), 1);
        let m = linalg::scalar(1, C64::new(0.3, -0.1));
        k.insert(p(&[1]), p(&[0]), m.clone());
        assert_eq!(k.kernel_at(&p(&[1]), &p(&[0])), m);
    }

    #[test]
    fn min_envelope_examples() {
        let g = Group::heisenberg();
        let id = Kernel::identity_on(g.clone(), 2, &g.ball(2));
        let env = id.min_envelope();
        assert_eq!(env.len(), 1);
        assert_eq!(env.get(&g.identity()), 1.0);
        assert_eq!(id.envelope_norm(), 1.0);

        let mut k = Kernel::zero(Group::zd(1), 1);
        for y in -10..=10i64 {
            k.insert(p(&[1]), p(&[y]), linalg::scalar(1, c(1.0 / (1.0 + (y * y) as f64))));
        }
        let env = k.min_envelope();
        assert_eq!(env.len(), 1);
        assert_eq!(env.get(&p(&[1])), 1.0);

        let mut k = Kernel::zero(Group::zd(1), 1);
        for s in -1..=1 {
            k.insert(p(&[s]), p(&[0]), linalg::scalar(1, c(0.5)));
            k.insert(p(&[s]), p(&[3]), linalg::scalar(1, c(-0.25)));
        }
        assert!((k.envelope_norm() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn compose_of_shifts_brute_force() {
        let w = z_window(10);
        let k1 = shift_kernel(1, c(0.7), &w);
        let k2 = shift_kernel(2, c(-1.3), &w);
        let prod = k1.compose(&k2).unwrap();
        // brute-force double loop over (x, y, z)
        let range = -15..=15i64;
        for x in range.clone() {
            for z in range.clone() {
                let mut acc = c(0.0);
                for y in range.clone() {
                    acc += k1.kernel_at(&p(&[x]), &p(&[y]))[(0, 0)] * k2.kernel_at(&p(&[y]), &p(&[z]))[(0, 0)];
                }
                assert_eq!(prod.kernel_at(&p(&[x]), &p(&[z]))[(0, 0)], acc);
            }
        }
        let ts: Vec<i64> = prod
            .entries()
            .map(|(s, t, _)| {
                assert_eq!(s, &p(&[3]));
                t.coords()[0]
            })
            .collect();
        assert_eq!(ts, (-10..=8).collect::<Vec<_>>());
    }

    #[test]
    fn compose_with_unit_and_zero() {
        let w = z_window(5);
        let k = shift_kernel(1, c(2.0), &z_window(3));
        let id = Kernel::identity_on(Group::zd(1), 1, &w);
        assert_eq!(k.compose(&id).unwrap(), k);
        assert_eq!(id.compose(&k).unwrap(), k);
        let zero = Kernel::zero(Group::zd(1), 1);
        assert!(zero.compose(&k).unwrap().is_empty());
    }

    #[test]
    fn compose_rejects_mismatches() {
        let a = Kernel::zero(Group::zd(1), 1);
        let b = Kernel::zero(Group::zd(2), 1);
        let c2 = Kernel::zero(Group::zd(1), 2);
        assert!(matches!(a.compose(&b), Err(Error::GroupMismatch { .. })));
        assert!(matches!(a.compose(&c2), Err(Error::MatrixDimMismatch { .. })));
        let f = TestVector::zero(Group::zd(1), 2);
        assert!(a.apply(&f).is_err());
    }

    #[test]
    fn involution_examples() {
        let g = Group::cyclic(4);
        let mut k = Kernel::zero(g.clone(), 2);
        for t in g.elements().unwrap() {
            let mut m = linalg::zeros(2);
            m[(0, 0)] = c(1.0);
            m[(1, 1)] = c(-2.0);
            k.insert(g.identity(), t, m);
        }
        assert_eq!(k.involution(), k);

        let mut k = Kernel::zero(g.clone(), 2);
        let m = Mat::from_row_slice(2, 2, &[C64::new(1.0, 2.0), c(3.0), C64::new(0.0, -1.0), c(0.5)]);
        k.insert(p(&[1]), p(&[2]), m.clone());
        let ks = k.involution();
        // K*(x, y) = K(y, x)^H
        for x in g.elements().unwrap() {
            for y in g.elements().unwrap() {
                assert_eq!(ks.kernel_at(&x, &y), k.kernel_at(&y, &x).adjoint());
            }
        }
        assert_eq!(ks.involution(), k);
        assert!((ks.envelope_norm() - k.envelope_norm()).abs() < 1e-12);
    }

    #[test]
    fn apply_examples() {
        let g = Group::zd(1);
        let mut f = TestVector::zero(g.clone(), 1);
        f.set(p(&[0]), CVec::from_element(1, C64::new(1.0, 1.0)));
        f.set(p(&[2]), CVec::from_element(1, c(-3.0)));
        let id = Kernel::identity_on(g.clone(), 1, &z_window(4));
        assert_eq!(id.apply(&f).unwrap(), f);

        let shift = shift_kernel(1, c(0.25), &z_window(4));
        let delta = TestVector::basis(g.clone(), 1, p(&[0]), 0);
        let out = shift.apply(&delta).unwrap();
        assert_eq!(out, TestVector::basis(g, 1, p(&[1]), 0).scale(c(0.25)));
    }

    #[test]
    fn right_and_left_conjugation() {
        let g = Group::heisenberg();
        let mut k = Kernel::zero(g.clone(), 1);
        k.insert(p(&[1, 0, 0]), p(&[0, 1, 0]), linalg::scalar(1, c(2.0)));
        k.insert(p(&[0, 1, 0]), p(&[1, 1, 3]), linalg::scalar(1, c(-1.0)));
        assert_eq!(k.conjugate_by_translation(&g.identity(), Side::Left).unwrap(), k);
        assert_eq!(k.conjugate_by_translation(&g.identity(), Side::Right).unwrap(), k);
        let a = p(&[2, -1, 5]);
        let right = k.conjugate_by_translation(&a, Side::Right).unwrap();
        let left = k.conjugate_by_translation(&a, Side::Left).unwrap();
        let pts = g.ball(3);
        for x in &pts {
            for y in &pts {
                assert_eq!(right.kernel_at(x, y), k.kernel_at(&g.mul(x, &a), &g.mul(y, &a)));
                let ai = g.inv(&a);
                assert_eq!(left.kernel_at(x, y), k.kernel_at(&g.mul(&ai, x), &g.mul(&ai, y)));
            }
        }
    }

    #[test]
    fn section_round_trip() {
        let g = Group::cyclic(5);
        let pts = g.elements().unwrap();
        let mut k = Kernel::zero(g.clone(), 2);
        k.insert(p(&[1]), p(&[3]), Mat::from_element(2, 2, C64::new(0.5, 0.5)));
        k.insert(p(&[0]), p(&[0]), linalg::identity(2));
        let m = k.section(&pts);
        assert_eq!(Kernel::from_section(g, 2, &pts, &m, 0.0), k);
    }

    #[test]
    fn envelope_convolution_and_distance() {
        let g = Group::zd(1);
        let a = Envelope::from_values(g.clone(), [(p(&[0]), 1.0), (p(&[1]), 0.5)]);
        let b = Envelope::from_values(g.clone(), [(p(&[-1]), 2.0)]);
        let ab = a.convolve(&b).unwrap();
        assert_eq!(ab.get(&p(&[-1])), 2.0);
        assert_eq!(ab.get(&p(&[0])), 1.0);
        assert_eq!(ab.l1_norm(), a.l1_norm() * b.l1_norm());
        assert_eq!(a.l1_distance(&b), 3.5);
        let mut e = Envelope::new(g);
        e.set(p(&[3]), 0.0);
        assert!(e.is_empty());
    }
}
