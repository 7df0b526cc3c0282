//! Small dense complex matrix helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub fn zeros(d: usize) -> Mat {
    Mat::zeros(d, d)
}

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn scalar(d: usize, c: C64) -> Mat {
    Mat::from_diagonal_element(d, d, c)
}

/// Largest singular value. For 1x1 matrices this is the modulus.
pub fn op_norm(m: &Mat) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &Mat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// Eigenvalues of a general complex square matrix via the Schur form.
///
/// The QR iteration is capped. Some permutation-like matrices make it stall,
/// so on failure the matrix is conjugated by a fixed Householder reflection
/// (which keeps the spectrum) and the iteration is retried.
pub fn eigenvalues(m: &Mat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let max_iter = 200 * n;
    for attempt in 0..4 {
        let a = if attempt == 0 {
            m.clone()
        } else {
            let h = reflector(n, attempt as f64);
            &h * m * &h
        };
        if let Some(schur) = nalgebra::Schur::try_new(a, f64::EPSILON, max_iter) {
            let (_, t) = schur.unpack();
            return Ok((0..n).map(|i| t[(i, i)]).collect());
        }
    }
    Err(Error::EigenNoConvergence(n))
}

// I - 2vv*/|v|² for a deterministic, generic v. Hermitian and unitary.
fn reflector(n: usize, phase: f64) -> Mat {
    let v = nalgebra::DVector::from_fn(n, |k, _| {
        let k = k as f64 + 1.0;
        C64::new((1.3 * k + phase).sin(), (0.7 * k * phase).cos())
    });
    let norm2 = v.norm_squared();
    identity(n) - (&v * v.adjoint()) * C64::new(2.0 / norm2, 0.0)
}

/// Sum of values after sorting ascending, so that the result does not depend
/// on the iteration order of the inputs.
pub fn ordered_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v.into_iter().sum()
}
