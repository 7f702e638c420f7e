use crate::error::{CqecError, Result};
use crate::numerics::{ComplexMatrix, ComplexVector, C64, ZERO};

/// A validated density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

pub(crate) fn qubits_for_dim(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return Err(CqecError::Dimension(format!("dimension {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dm = Self::from_matrix_unchecked(matrix)?;
        let herm = (&dm.matrix - dm.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL * crate::numerics::max_abs(&dm.matrix).max(1.0) {
            return Err(CqecError::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = dm.matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(CqecError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_ev = dm.min_eigenvalue();
        if min_ev < -POSITIVITY_TOL {
            return Err(CqecError::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(dm)
    }

    /// Checks only the shape. Used for intermediate results of linear maps.
    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(CqecError::Dimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CqecError::InvalidState("non-finite entry".into()));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        Ok(DensityMatrix { n_qubits, matrix })
    }

    pub fn pure(state: &ComplexVector) -> Result<Self> {
        let nrm = state.norm();
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(CqecError::InvalidState(format!("state vector norm {nrm}")));
        }
        Self::new(state * state.adjoint())
    }

    /// Computational basis projector `|b⟩⟨b|`.
    pub fn basis_state(n_qubits: usize, b: usize) -> Self {
        let d = 1 << n_qubits;
        assert!(b < d, "basis index out of range");
        let mut m = ComplexMatrix::zeros(d, d);
        m[(b, b)] = C64::new(1.0, 0.0);
        DensityMatrix { n_qubits, matrix: m }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        DensityMatrix { n_qubits, matrix: ComplexMatrix::identity(d, d) / C64::new(d as f64, 0.0) }
    }

    /// `(I + xX + yY + zZ)/2`; requires |r| ≤ 1.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        if x * x + y * y + z * z > 1.0 + 1e-12 {
            return Err(CqecError::InvalidState("Bloch vector longer than 1".into()));
        }
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + z) / 2.0, 0.0),
                C64::new(x / 2.0, -y / 2.0),
                C64::new(x / 2.0, y / 2.0),
                C64::new((1.0 - z) / 2.0, 0.0),
            ],
        );
        Self::new(m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { n_qubits: self.n_qubits + other.n_qubits, matrix: self.matrix.kronecker(&other.matrix) }
    }

    /// Bloch vector (x, y, z) of a one-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.n_qubits != 1 {
            return Err(CqecError::Dimension("Bloch vector needs a one-qubit state".into()));
        }
        let m = &self.matrix;
        Ok([2.0 * m[(1, 0)].re, 2.0 * m[(1, 0)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }
}

/// Traces out every qubit not in `keep` (0-based, 0 = leftmost). Kept qubits
/// stay in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(CqecError::Argument("partial_trace: empty keep set".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&q| q >= n) {
        return Err(CqecError::Argument(format!("partial_trace: invalid qubit set {keep:?} for {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep_sorted.contains(q)).collect();
    let k = keep_sorted.len();
    let dk = 1usize << k;
    let dt = 1usize << traced.len();
    let place = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (i, &q) in keep_sorted.iter().enumerate() {
            let bit = (kept_bits >> (k - 1 - i)) & 1;
            idx |= bit << (n - 1 - q);
        }
        for (i, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - i)) & 1;
            idx |= bit << (n - 1 - q);
        }
        idx
    };
    let m = rho.matrix();
    let mut out = ComplexMatrix::from_element(dk, dk, ZERO);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = ZERO;
            for e in 0..dt {
                s += m[(place(a, e), place(b, e))];
            }
            out[(a, b)] = s;
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}
