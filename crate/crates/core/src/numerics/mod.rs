//! Dense complex linear algebra and an adaptive ODE integrator.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`. Decompositions the
//! rest of the crate relies on (matrix exponential, eigenvectors, Schur form)
//! are implemented locally so their tolerances are under our control.

mod eigen;
mod expm;
mod ode;
mod poly;

pub use eigen::{eigendecompose, eigendecompose_with, eigenvalues, schur, Spectrum};
pub use expm::matrix_exponential;
pub use ode::{integrate_ivp, integrate_ivp_with, OdeOptions};
pub use poly::{polynomial_eval, polynomial_roots};

use crate::error::{CqecError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerances used by the numerical routines. Defaults follow the library
/// conventions; every caller can override them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub ode_rel: f64,
    pub ode_abs: f64,
    /// Eigenvector condition number above which a matrix counts as defective.
    pub diagonalizable_cond: f64,
    /// Relative singular-value threshold for nullspaces.
    pub nullspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rel: 1e-10,
            ode_abs: 1e-12,
            diagonalizable_cond: 1e12,
            nullspace: 1e-10,
        }
    }
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols, "real_matrix: data length");
    ComplexMatrix::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
}

pub fn to_complex(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Real part of a matrix; errors if any imaginary part exceeds `tol`.
pub fn to_real(m: &ComplexMatrix, tol: f64) -> Result<DMatrix<f64>> {
    let worst = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > tol {
        return Err(CqecError::Numerical(format!(
            "expected a real matrix, imaginary part {worst:.3e}"
        )));
    }
    Ok(m.map(|z| z.re))
}

pub(crate) fn require_square(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(CqecError::Dimension(format!(
            "{what}: expected a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn require_finite(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(CqecError::Argument(format!("{what}: non-finite entry")))
    }
}

/// Induced 1-norm (max column sum).
pub fn norm1(a: &ComplexMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let svd = a.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    let (hi, lo) = (s[0], s[s.len() - 1]);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Orthonormal basis of the right nullspace of `a`: right singular vectors
/// whose singular value is at most `tol · σ_max`.
pub fn nullspace(a: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexVector>> {
    require_square(a, "nullspace")?;
    if !(tol > 0.0) {
        return Err(CqecError::Argument("nullspace: tol must be positive".into()));
    }
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol * smax;
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if smax == 0.0 || s <= cut {
            out.push(v_t.row(i).transpose().map(|z| z.conj()));
        }
    }
    debug_assert!(out.len() <= n);
    Ok(out)
}

/// Scales a vector so its entries sum to one. Errors when the sum vanishes.
pub fn normalize_entry_sum(v: &ComplexVector) -> Result<ComplexVector> {
    let s: C64 = v.iter().sum();
    if s.norm() < 1e-300 {
        return Err(CqecError::Numerical("vector entries sum to zero".into()));
    }
    Ok(v / s)
}

pub fn lu_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a, "inverse")?;
    a.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| CqecError::Numerical("matrix is singular".into()))
}
