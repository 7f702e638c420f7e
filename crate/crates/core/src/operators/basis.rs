use super::density::qubits_for_dim;
use super::pauli::PauliString;
use crate::error::{CqecError, Result};
use crate::numerics::{matrix_exponential, ComplexMatrix, ComplexVector, C64, ZERO};

/// How a state is laid out as a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisConvention {
    /// Coefficients `c_P = Tr(Pρ)/2^n` over Pauli words, (I, X, Y, Z) per
    /// qubit, leftmost qubit most significant.
    PauliProduct,
    /// Row-major `vec(ρ)`: component `|a⟩⟨b|` at index `a·2^n + b`.
    Computational,
    /// Weights of uniform error-class mixtures (code dependent).
    ErrorClass,
}

impl BasisConvention {
    /// Vector length for `n` qubits; `None` for the class basis.
    pub fn dimension(self, n: usize) -> Option<usize> {
        match self {
            BasisConvention::PauliProduct | BasisConvention::Computational => Some(1 << (2 * n)),
            BasisConvention::ErrorClass => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisConvention::PauliProduct => "pauli-product",
            BasisConvention::Computational => "computational",
            BasisConvention::ErrorClass => "error-class",
        }
    }
}

/// A linear map on vectorized states in a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub matrix: ComplexMatrix,
    pub basis: BasisConvention,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, basis: BasisConvention) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(CqecError::Dimension("superoperator matrix must be square".into()));
        }
        Ok(Superoperator { matrix, basis })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.dim() {
            return Err(CqecError::Dimension(format!("vector of length {} for a {}-dim superoperator", v.len(), self.dim())));
        }
        Ok(&self.matrix * v)
    }

    fn same_shape(&self, other: &Superoperator) -> Result<()> {
        if self.basis != other.basis || self.dim() != other.dim() {
            return Err(CqecError::Dimension(format!(
                "superoperators in {} ({}) and {} ({})",
                self.basis.name(),
                self.dim(),
                other.basis.name(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        self.same_shape(other)?;
        Ok(Superoperator { matrix: &self.matrix * &other.matrix, basis: self.basis })
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        self.same_shape(other)?;
        Ok(Superoperator { matrix: &self.matrix + &other.matrix, basis: self.basis })
    }

    pub fn scaled(&self, s: f64) -> Superoperator {
        Superoperator { matrix: &self.matrix * C64::new(s, 0.0), basis: self.basis }
    }

    pub fn exp(&self, t: f64) -> Result<ComplexMatrix> {
        matrix_exponential(&self.matrix, t)
    }

    /// Re-expresses the map in another basis (`Λ M Λ⁻¹`).
    pub fn to_basis(&self, n: usize, target: BasisConvention) -> Result<Superoperator> {
        if target == self.basis {
            return Ok(self.clone());
        }
        let lam = basis_change_matrix(self.basis, target, n)?;
        let inv = basis_change_matrix(target, self.basis, n)?;
        if lam.ncols() != self.dim() {
            return Err(CqecError::Dimension("basis change does not match superoperator size".into()));
        }
        Ok(Superoperator { matrix: lam * &self.matrix * inv, basis: target })
    }

    /// Largest violation of trace preservation. In the class basis this is the
    /// largest column sum; in the Pauli basis the largest entry of the
    /// identity row; in the computational basis the largest sum over the
    /// diagonal components `|a⟩⟨a|` of a column.
    pub fn trace_defect(&self) -> Result<f64> {
        let m = &self.matrix;
        let d = self.dim();
        Ok(match self.basis {
            BasisConvention::ErrorClass => (0..d).map(|j| m.column(j).iter().sum::<C64>().norm()).fold(0.0, f64::max),
            BasisConvention::PauliProduct => m.row(0).iter().map(|z| z.norm()).fold(0.0, f64::max),
            BasisConvention::Computational => {
                let sd = (d as f64).sqrt().round() as usize;
                if sd * sd != d {
                    return Err(CqecError::Dimension("computational superoperator size is not a square".into()));
                }
                (0..d)
                    .map(|j| (0..sd).map(|a| m[(a * sd + a, j)]).sum::<C64>().norm())
                    .fold(0.0, f64::max)
            }
        })
    }
}

fn check_len(v: &ComplexVector, n: usize) -> Result<()> {
    if v.len() != 1 << (2 * n) {
        return Err(CqecError::Dimension(format!("vector length {} does not match {} qubits", v.len(), n)));
    }
    Ok(())
}

/// Vectorizes a square matrix (not necessarily a state) in the given basis.
pub fn vectorize_matrix(rho: &ComplexMatrix, basis: BasisConvention) -> Result<ComplexVector> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(CqecError::Dimension("vectorize: matrix must be square".into()));
    }
    let n = qubits_for_dim(d)?;
    match basis {
        BasisConvention::Computational => Ok(ComplexVector::from_fn(d * d, |k, _| rho[(k / d, k % d)])),
        BasisConvention::PauliProduct => {
            let scale = 1.0 / d as f64;
            let mut v = ComplexVector::zeros(d * d);
            for idx in 0..d * d {
                let p = PauliString::from_index(n, idx);
                let mut tr = ZERO;
                for a in 0..d {
                    let (ph, b) = p.apply_to_basis(a);
                    // Tr(Pρ) = Σ_a ⟨b|P|a⟩ ρ_ab with b = P(a)
                    tr += ph * rho[(a, b)];
                }
                v[idx] = tr * scale;
            }
            Ok(v)
        }
        BasisConvention::ErrorClass => Err(CqecError::Argument(
            "vectorize: the error-class basis has no density-matrix vectorization".into(),
        )),
    }
}

pub fn vectorize(rho: &super::DensityMatrix, basis: BasisConvention) -> Result<ComplexVector> {
    vectorize_matrix(rho.matrix(), basis)
}

/// Inverse of [`vectorize_matrix`] for `n` qubits.
pub fn devectorize(v: &ComplexVector, n: usize, basis: BasisConvention) -> Result<ComplexMatrix> {
    check_len(v, n)?;
    let d = 1usize << n;
    match basis {
        BasisConvention::Computational => Ok(ComplexMatrix::from_fn(d, d, |a, b| v[a * d + b])),
        BasisConvention::PauliProduct => {
            let mut m = ComplexMatrix::zeros(d, d);
            for (idx, &c) in v.iter().enumerate() {
                if c == ZERO {
                    continue;
                }
                let p = PauliString::from_index(n, idx);
                for a in 0..d {
                    let (ph, b) = p.apply_to_basis(a);
                    m[(b, a)] += ph * c;
                }
            }
            Ok(m)
        }
        BasisConvention::ErrorClass => Err(CqecError::Argument(
            "devectorize: the error-class basis has no density-matrix form".into(),
        )),
    }
}

/// `Λ` with `v_to = Λ · v_from`.
pub fn basis_change_matrix(from: BasisConvention, to: BasisConvention, n: usize) -> Result<ComplexMatrix> {
    use BasisConvention::*;
    let d2 = 1usize << (2 * n);
    match (from, to) {
        (ErrorClass, _) | (_, ErrorClass) => Err(CqecError::Argument(format!(
            "no basis change between {} and {}",
            from.name(),
            to.name()
        ))),
        _ if from == to => Ok(ComplexMatrix::identity(d2, d2)),
        (PauliProduct, Computational) => {
            let mut lam = ComplexMatrix::zeros(d2, d2);
            for idx in 0..d2 {
                let p = PauliString::from_index(n, idx).to_matrix();
                let col = vectorize_matrix(&p, Computational)?;
                lam.set_column(idx, &col);
            }
            Ok(lam)
        }
        (Computational, PauliProduct) => {
            // columns of the forward map are orthogonal with squared norm 2^n
            let fwd = basis_change_matrix(PauliProduct, Computational, n)?;
            Ok(fwd.adjoint() / C64::new((1usize << n) as f64, 0.0))
        }
        _ => unreachable!(),
    }
}

/// Matrix of a linear map by probing: column `j` is
/// `vectorize(action(devectorize(e_j)))`.
pub fn superoperator_matrix<F>(action: F, n: usize, basis: BasisConvention) -> Result<Superoperator>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let d2 = basis
        .dimension(n)
        .ok_or_else(|| CqecError::Argument("superoperator_matrix: class basis needs reduce_to_classes".into()))?;
    let mut m = ComplexMatrix::zeros(d2, d2);
    let mut e = ComplexVector::zeros(d2);
    for j in 0..d2 {
        e[j] = C64::new(1.0, 0.0);
        let x = devectorize(&e, n, basis)?;
        let col = vectorize_matrix(&action(&x), basis)?;
        m.set_column(j, &col);
        e[j] = ZERO;
    }
    Superoperator::new(m, basis)
}

/// Index of the component `|ket⟩⟨bra|`: the bit string ket·bra read as a
/// binary number, first bit most significant.
pub fn binary_index(ket_bits: &[u8], bra_bits: &[u8]) -> Result<usize> {
    if ket_bits.len() != bra_bits.len() {
        return Err(CqecError::Dimension("ket and bra labels differ in length".into()));
    }
    let mut idx = 0usize;
    for &b in ket_bits.iter().chain(bra_bits) {
        if b > 1 {
            return Err(CqecError::Argument(format!("bit label {b} is not 0 or 1")));
        }
        idx = (idx << 1) | b as usize;
    }
    Ok(idx)
}

/// Inverse of [`binary_index`] for `n` qubits.
pub fn binary_labels(index: usize, n: usize) -> (Vec<u8>, Vec<u8>) {
    let bits: Vec<u8> = (0..2 * n).rev().map(|k| ((index >> k) & 1) as u8).collect();
    (bits[..n].to_vec(), bits[n..].to_vec())
}

/// Bit position (from the least significant end) of qubit `q` in the ket or
/// bra half of a component index.
pub fn component_bit(n: usize, q: usize, bra: bool) -> usize {
    let base = if bra { 0 } else { n };
    base + (n - 1 - q)
}

/// `D[σ₋](|a⟩⟨b|)` on qubit `q`, with `σ₋ = |0⟩⟨1|`. Returns the three-term
/// expansion as (component index, coefficient) pairs.
pub fn lowering_dissipator_on_component(index: usize, n: usize, q: usize) -> Vec<(usize, f64)> {
    let kb = 1usize << component_bit(n, q, false);
    let bb = 1usize << component_bit(n, q, true);
    let ket1 = index & kb != 0;
    let bra1 = index & bb != 0;
    let mut out = Vec::with_capacity(3);
    if ket1 && bra1 {
        out.push((index & !kb & !bb, 1.0));
    }
    let diag = -0.5 * (ket1 as u8 + bra1 as u8) as f64;
    if diag != 0.0 {
        out.push((index, diag));
    }
    out
}
