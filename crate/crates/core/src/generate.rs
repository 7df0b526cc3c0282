//! Seeded random instances: matrices, kernels with prescribed decay
//! profiles, covariance elements and test vectors.
//!
//! Random matrices have independent entries uniform on the complex unit disc
//! and are then rescaled to a target operator norm.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceElement;
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::kernel::{CVec, Envelope, Kernel, PairVector, TestVector};
use crate::linalg::{self, Mat, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from the closed unit disc.
pub fn unit_disc<R: Rng>(rng: &mut R) -> C64 {
    let r = rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    C64::from_polar(r, phi)
}

/// Random `d×d` matrix with entries on the unit disc.
pub fn random_matrix<R: Rng>(rng: &mut R, d: usize) -> Mat {
    Mat::from_fn(d, d, |_, _| unit_disc(rng))
}

/// Random matrix rescaled to operator norm `norm`.
pub fn random_matrix_with_norm<R: Rng>(rng: &mut R, d: usize, norm: f64) -> Mat {
    loop {
        let m = random_matrix(rng, d);
        let n = linalg::op_norm(&m);
        if n > 1e-3 {
            return m * C64::new(norm / n, 0.0);
        }
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize) -> CVec {
    CVec::from_fn(d, |_, _| unit_disc(rng))
}

/// Kernel with an independent random entry at every `(s, t)` of the given
/// supports, each kept with probability `density`.
pub fn random_kernel<R: Rng>(
    rng: &mut R,
    group: &Group,
    dim: usize,
    shifts: &[GroupPoint],
    cols: &[GroupPoint],
    density: f64,
) -> Kernel {
    let mut k = Kernel::zero(group.clone(), dim);
    for s in shifts {
        for t in cols {
            if rng.random::<f64>() < density {
                k.insert(s.clone(), t.clone(), random_matrix(rng, dim));
            }
        }
    }
    k
}

/// Covariance element with a random entry at each `(x, y)` of the supports,
/// kept with probability `density`.
pub fn random_covariance<R: Rng>(
    rng: &mut R,
    group: &Group,
    dim: usize,
    xs: &[GroupPoint],
    ys: &[GroupPoint],
    density: f64,
) -> CovarianceElement {
    let mut f = CovarianceElement::zero(group.clone(), dim);
    for x in xs {
        for y in ys {
            if rng.random::<f64>() < density {
                f.insert(x.clone(), y.clone(), random_matrix(rng, dim));
            }
        }
    }
    f
}

pub fn random_test_vector<R: Rng>(rng: &mut R, group: &Group, dim: usize, support: &[GroupPoint]) -> TestVector {
    let mut f = TestVector::zero(group.clone(), dim);
    for x in support {
        f.set(x.clone(), random_vector(rng, dim));
    }
    f
}

pub fn random_pair_vector<R: Rng>(rng: &mut R, group: &Group, dim: usize, support: &[GroupPoint]) -> PairVector {
    let mut f = PairVector::zero(group.clone(), dim);
    for x in support {
        for z in support {
            f.set(x.clone(), z.clone(), random_vector(rng, dim));
        }
    }
    f
}

/// Off-diagonal decay profile as a function of word length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// `exp(-rate·ℓ)` for `ℓ <= radius`.
    Exponential { rate: f64, radius: u32 },
    /// `(1 + ℓ)^(-power)` for `ℓ <= radius`.
    Polynomial { power: f64, radius: u32 },
    /// `1` for `ℓ <= width`.
    Banded { width: u32 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match *self {
            Profile::Exponential { rate, .. } if !(rate.is_finite() && rate >= 0.0) => {
                bad("exponential rate must be finite and >= 0")
            }
            Profile::Polynomial { power, .. } if !(power.is_finite() && power >= 0.0) => {
                bad("polynomial power must be finite and >= 0")
            }
            _ => Ok(()),
        }
    }

    pub fn radius(&self) -> u32 {
        match *self {
            Profile::Exponential { radius, .. } | Profile::Polynomial { radius, .. } => radius,
            Profile::Banded { width } => width,
        }
    }

    pub fn value(&self, word_length: u32) -> f64 {
        if word_length > self.radius() {
            return 0.0;
        }
        let l = word_length as f64;
        match *self {
            Profile::Exponential { rate, .. } => (-rate * l).exp(),
            Profile::Polynomial { power, .. } => (1.0 + l).powf(-power),
            Profile::Banded { .. } => 1.0,
        }
    }
}

/// A generated kernel together with the envelope it was built to respect.
#[derive(Clone, Debug)]
pub struct GeneratedKernel {
    pub kernel: Kernel,
    pub intended: Envelope,
}

/// Random kernel whose entry at `(s, t)` has operator norm
/// `u·profile(|s|)` with `u` uniform in `[0.5, 1]`, for every `s` in the
/// profile's ball and every `t` in `cols`.
pub fn generate_kernel(
    group: &Group,
    dim: usize,
    seed: u64,
    profile: Profile,
    cols: &[GroupPoint],
) -> Result<GeneratedKernel> {
    profile.validate()?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be >= 1".into()));
    }
    let mut rng = rng(seed);
    let mut kernel = Kernel::zero(group.clone(), dim);
    let mut intended = Envelope::new(group.clone());
    for s in group.ball(profile.radius()) {
        let target = profile.value(group.word_length(&s));
        if target == 0.0 {
            continue;
        }
        intended.set(s.clone(), target);
        for t in cols {
            let u = rng.random_range(0.5..=1.0);
            kernel.insert(s.clone(), t.clone(), random_matrix_with_norm(&mut rng, dim, u * target));
        }
    }
    Ok(GeneratedKernel { kernel, intended })
}

/// `(K + K*)/2`.
pub fn hermitian_part(k: &Kernel) -> Kernel {
    k.add(&k.involution()).unwrap().scale(C64::new(0.5, 0.0))
}
