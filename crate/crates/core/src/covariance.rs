//! The covariance (crossed-product `ℓ¹`) algebra and its maps to kernels.
//!
//! An element is a finitely supported `f: Γ × Γ → M_d(ℂ)`, read as
//! `x ↦ f(x, ·) ∈ ℓ∞(Γ, M_d)`. The group acts on the coefficient functions by
//! left translation, which gives the twisted product and involution
//!
//! ```text
//! (f ⋆ h)(x, z) = Σ_y f(y, z) · h(y⁻¹x, y⁻¹z)
//! f*(x, y)      = f(x⁻¹, x⁻¹y)^H
//! ```
//!
//! `R` maps this algebra isometrically and bijectively onto the kernel
//! algebra by `(Rf)(x, y) = f(x·y⁻¹, x)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::kernel::{same_dim, same_group, CVec, Kernel, PairVector};
use crate::linalg::{self, Mat, C64};

/// An element of the covariance algebra with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceElement {
    group: Group,
    dim: usize,
    entries: BTreeMap<(GroupPoint, GroupPoint), Mat>,
}

impl CovarianceElement {
    pub fn zero(group: Group, dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        CovarianceElement {
            group,
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// `u(x, y) = δ_{x=e}·I` with the fiber restricted to `window`.
    pub fn unit_on(group: Group, dim: usize, window: &[GroupPoint]) -> Self {
        let mut f = CovarianceElement::zero(group, dim);
        let e = f.group.identity();
        for y in window {
            f.insert(e.clone(), y.clone(), linalg::identity(dim));
        }
        f
    }

    /// The unit of the algebra; only finitely supported on finite groups.
    pub fn unit(group: Group, dim: usize) -> Option<Self> {
        let els = group.elements()?;
        Some(CovarianceElement::unit_on(group, dim, &els))
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

    pub fn entries(&self) -> impl Iterator<Item = (&GroupPoint, &GroupPoint, &Mat)> {
        self.entries.iter().map(|((x, y), m)| (x, y, m))
    }

    /// Sets `f(x, y) = m`; zero matrices are pruned.
    pub fn insert(&mut self, x: GroupPoint, y: GroupPoint, m: Mat) {
        assert_eq!((m.nrows(), m.ncols()), (self.dim, self.dim), "entry has wrong size");
        if linalg::is_zero(&m) {
            self.entries.remove(&(x, y));
        } else {
            self.entries.insert((x, y), m);
        }
    }

    pub fn at(&self, x: &GroupPoint, y: &GroupPoint) -> Mat {
        self.entries
            .get(&(x.clone(), y.clone()))
            .cloned()
            .unwrap_or_else(|| linalg::zeros(self.dim))
    }

    /// `Σ_x max_y ‖f(x, y)‖_op`.
    pub fn l1_norm(&self) -> f64 {
        let mut sup: BTreeMap<&GroupPoint, f64> = BTreeMap::new();
        for ((x, _), m) in &self.entries {
            let v = linalg::op_norm(m);
            let slot = sup.entry(x).or_insert(0.0);
            *slot = slot.max(v);
        }
        linalg::ordered_sum(sup.into_values().collect())
    }

    fn from_map(group: Group, dim: usize, map: BTreeMap<(GroupPoint, GroupPoint), Mat>) -> Self {
        let entries = map.into_iter().filter(|(_, m)| !linalg::is_zero(m)).collect();
        CovarianceElement { group, dim, entries }
    }

    fn check_compatible(&self, other: &CovarianceElement) -> Result<()> {
        same_group(&self.group, &other.group)?;
        same_dim(self.dim, other.dim)
    }

    pub fn add(&self, other: &CovarianceElement) -> Result<CovarianceElement> {
        self.check_compatible(other)?;
        let mut acc = self.entries.clone();
        for (k, m) in &other.entries {
            match acc.get_mut(k) {
                Some(v) => *v += m,
                None => {
                    acc.insert(k.clone(), m.clone());
                }
            }
        }
        Ok(Self::from_map(self.group.clone(), self.dim, acc))
    }

    pub fn scale(&self, c: C64) -> CovarianceElement {
        let map = self.entries.iter().map(|(k, m)| (k.clone(), m * c)).collect();
        Self::from_map(self.group.clone(), self.dim, map)
    }

    pub fn max_diff(&self, other: &CovarianceElement) -> f64 {
        let zero = linalg::zeros(self.dim);
        let mut worst: f64 = 0.0;
        for (k, m) in &self.entries {
            worst = worst.max(linalg::max_abs(&(m - other.entries.get(k).unwrap_or(&zero))));
        }
        for (k, m) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(linalg::max_abs(m));
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Twisted convolution `(f ⋆ h)(x, z) = Σ_y f(y, z) h(y⁻¹x, y⁻¹z)`.
    pub fn cov_product(&self, h: &CovarianceElement) -> Result<CovarianceElement> {
        self.check_compatible(h)?;
        let g = &self.group;
        // h grouped by its fiber coordinate b = y⁻¹z
        let mut by_fiber: BTreeMap<&GroupPoint, Vec<(&GroupPoint, &Mat)>> = BTreeMap::new();
        for ((a, b), m) in &h.entries {
            by_fiber.entry(b).or_default().push((a, m));
        }
        let mut acc: BTreeMap<(GroupPoint, GroupPoint), Mat> = BTreeMap::new();
        for ((y, z), mf) in &self.entries {
            let b = g.mul(&g.inv(y), z);
            let Some(list) = by_fiber.get(&b) else { continue };
            for (a, mh) in list {
                let key = (g.mul(y, a), z.clone());
                let prod = mf * *mh;
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        Ok(Self::from_map(g.clone(), self.dim, acc))
    }

    /// `f*(x, y) = f(x⁻¹, x⁻¹y)^H`.
    pub fn cov_involution(&self) -> CovarianceElement {
        let g = &self.group;
        let entries = self
            .entries
            .iter()
            .map(|((a, b), m)| {
                let ai = g.inv(a);
                ((ai.clone(), g.mul(&ai, b)), m.adjoint())
            })
            .collect();
        CovarianceElement {
            group: g.clone(),
            dim: self.dim,
            entries,
        }
    }

    /// `(Rf)(x, y) = f(x·y⁻¹, x)`; in shift storage `entries[(s, t)] = f(s, s·t)`.
    pub fn r_map(&self) -> Kernel {
        let g = &self.group;
        let mut k = Kernel::zero(g.clone(), self.dim);
        for ((x, y), m) in &self.entries {
            k.insert(x.clone(), g.mul(&g.inv(x), y), m.clone());
        }
        k
    }

    /// `(R⁻¹K)(x, y) = K(y, x⁻¹y)`, i.e. the entry stored at `(x, x⁻¹y)`.
    pub fn r_inverse(k: &Kernel) -> CovarianceElement {
        let g = k.group();
        let mut f = CovarianceElement::zero(g.clone(), k.dim());
        for (s, t, m) in k.entries() {
            f.insert(s.clone(), g.mul(s, t), m.clone());
        }
        f
    }

    /// The π-regular representation on `ℓ²(Γ × Γ, ℂ^d)`:
    /// `(Π(f)ξ)(x, z) = Σ_y f(y, x·z) ξ(y⁻¹x, z)`.
    pub fn pi_regular(&self, xi: &PairVector) -> Result<PairVector> {
        same_group(&self.group, xi.group())?;
        same_dim(self.dim, xi.dim())?;
        let g = &self.group;
        // ξ grouped by w·z
        let mut by_prod: BTreeMap<GroupPoint, Vec<(&GroupPoint, &GroupPoint, &CVec)>> = BTreeMap::new();
        for ((w, z), v) in xi.iter() {
            by_prod.entry(g.mul(w, z)).or_default().push((w, z, v));
        }
        let mut out = PairVector::zero(g.clone(), self.dim);
        for ((y, v), m) in &self.entries {
            let key = g.mul(&g.inv(y), v);
            let Some(list) = by_prod.get(&key) else { continue };
            for (w, z, vec) in list {
                out.add_at((g.mul(y, w), (*z).clone()), m * *vec);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Matrix of `Π(f)` on a finite group, indexed by `(x, z, i)`.
    pub fn pi_matrix(&self) -> Result<Mat> {
        let els = self.finite_elements()?;
        let d = self.dim;
        let n = els.len();
        let size = n * n * d;
        let mut out = Mat::zeros(size, size);
        let g = &self.group;
        for (xi_idx, x) in els.iter().enumerate() {
            for (zi, z) in els.iter().enumerate() {
                for i in 0..d {
                    let col = (xi_idx * n + zi) * d + i;
                    let img = self.pi_regular(&PairVector::basis(g.clone(), d, x.clone(), z.clone(), i))?;
                    for ((a, b), v) in img.iter() {
                        let row0 = (g.index_of(a).unwrap() * n + g.index_of(b).unwrap()) * d;
                        for r in 0..d {
                            out[(row0 + r, col)] = v[r];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Image of `f` under `θ(f)(x) = π(f(x))·V(x)`, where `V` is the left
    /// regular representation on `ℓ²(Γ, ℂ^d)` and `π(f(x))` multiplies
    /// pointwise by `f(x, ·)`. Finite groups only.
    pub fn theta_embed(&self) -> Result<ThetaImage> {
        let els = self.finite_elements()?;
        let g = &self.group;
        let d = self.dim;
        let n = els.len();
        let mut mats = vec![Mat::zeros(n * d, n * d); n];
        for ((x, y), m) in &self.entries {
            // (π(f(x)) V(x) φ)(y) = f(x, y) φ(x⁻¹y)
            let row = g.index_of(y).unwrap();
            let col = g.index_of(&g.mul(&g.inv(x), y)).unwrap();
            mats[g.index_of(x).unwrap()]
                .view_mut((row * d, col * d), (d, d))
                .copy_from(m);
        }
        Ok(ThetaImage { group: g.clone(), mats })
    }

    /// Spectrum of `f` in the (finite-dimensional, unital) covariance algebra
    /// over a finite group.
    ///
    /// Left multiplication `L_f` leaves invariant, for each `w ∈ Γ` and column
    /// index `j`, the subspace of elements supported on `{(a, b): a⁻¹b = w}`
    /// with only column `j` nonzero. On each of these `|Γ|·d` subspaces `L_f`
    /// acts by the same `|Γ|d × |Γ|d` matrix, the full section of `R(f)`, so
    /// the spectrum is the eigenvalue set of that block.
    pub fn symmetry_spectrum(&self) -> Result<Vec<C64>> {
        let els = self.finite_elements()?;
        let block = self.r_map().section(&els);
        linalg::eigenvalues(&block)
    }

    /// Matrix of `L_f: h ↦ f ⋆ h` on the whole algebra, indexed by
    /// `(x, y, i, j)`, of size `|Γ|²d²`. Finite groups only.
    pub fn left_regular_matrix(&self) -> Result<Mat> {
        let els = self.finite_elements()?;
        let g = &self.group;
        let d = self.dim;
        let n = els.len();
        let size = n * n * d * d;
        let idx = |x: &GroupPoint, y: &GroupPoint, i: usize, j: usize| {
            ((g.index_of(x).unwrap() * n + g.index_of(y).unwrap()) * d + i) * d + j
        };
        let mut out = Mat::zeros(size, size);
        for x in &els {
            for y in &els {
                for i in 0..d {
                    for j in 0..d {
                        let mut e = CovarianceElement::zero(g.clone(), d);
                        let mut m = linalg::zeros(d);
                        m[(i, j)] = C64::new(1.0, 0.0);
                        e.insert(x.clone(), y.clone(), m);
                        let col = idx(x, y, i, j);
                        for ((a, b), v) in &self.cov_product(&e)?.entries {
                            for r in 0..d {
                                for c in 0..d {
                                    out[(idx(a, b, r, c), col)] = v[(r, c)];
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn finite_elements(&self) -> Result<Vec<GroupPoint>> {
        self.group
            .elements()
            .ok_or_else(|| Error::GroupNotFinite(self.group.to_string()))
    }
}

/// `(Wξ)(x, z) = ξ(x·z, z)`.
pub fn w_intertwine(xi: &PairVector) -> PairVector {
    let g = xi.group().clone();
    xi.remap(|a, z| (g.mul(a, &g.inv(z)), z.clone()))
}

/// `(W⁻¹η)(x, z) = η(x·z⁻¹, z)`.
pub fn w_inverse(eta: &PairVector) -> PairVector {
    let g = eta.group().clone();
    eta.remap(|b, z| (g.mul(b, z), z.clone()))
}

/// The values `θ(f)(x)` of the embedding, indexed like `Group::elements`.
#[derive(Clone, Debug)]
pub struct ThetaImage {
    group: Group,
    mats: Vec<Mat>,
}

impl ThetaImage {
    pub fn matrices(&self) -> &[Mat] {
        &self.mats
    }

    /// Untwisted convolution `(A ⋆ B)(x) = Σ_y A(y) B(y⁻¹x)`.
    pub fn convolve(&self, other: &ThetaImage) -> Result<ThetaImage> {
        same_group(&self.group, &other.group)?;
        let g = &self.group;
        let els = g.elements().unwrap();
        let size = self.mats[0].nrows();
        let mut mats = vec![Mat::zeros(size, size); els.len()];
        for (xi, x) in els.iter().enumerate() {
            for (yi, y) in els.iter().enumerate() {
                let k = g.index_of(&g.mul(&g.inv(y), x)).unwrap();
                mats[xi] += &self.mats[yi] * &other.mats[k];
            }
        }
        Ok(ThetaImage { group: g.clone(), mats })
    }

    /// `Σ_x ‖A(x)‖_op`.
    pub fn l1_norm(&self) -> f64 {
        linalg::ordered_sum(self.mats.iter().map(linalg::op_norm).collect())
    }

    pub fn max_diff(&self, other: &ThetaImage) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}
