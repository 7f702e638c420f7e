//! Markovian dynamics: Liouvillians, propagation, stationary states and the
//! closed forms for the one- and three-qubit codes.

use crate::codes::{correction_generator, reduce_to_classes, ClassGenerator, StabilizerCode};
use crate::error::{CqecError, Result};
use crate::numerics::{lu_inverse, matrix_exponential, nullspace, ComplexMatrix, ComplexVector, C64};
use crate::operators::{devectorize, superoperator_matrix, vectorize, BasisConvention, DensityMatrix, Pauli, PauliString, Superoperator};

/// Physical noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// X errors on every qubit at rate γ.
    BitFlip,
    /// X, Y and Z errors on every qubit, each at rate γ.
    Depolarizing,
}

impl Channel {
    pub fn letters(self) -> &'static [Pauli] {
        match self {
            Channel::BitFlip => &[Pauli::X],
            Channel::Depolarizing => &[Pauli::X, Pauli::Y, Pauli::Z],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel {
    pub code: StabilizerCode,
    pub channel: Channel,
    pub gamma: f64,
    pub eta: f64,
    pub hamiltonian: Option<ComplexMatrix>,
}

impl MarkovModel {
    pub fn new(code: StabilizerCode, channel: Channel, gamma: f64, eta: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) || !(eta >= 0.0 && eta.is_finite()) {
            return Err(CqecError::Argument(format!("rates must be finite and non-negative (gamma={gamma}, eta={eta})")));
        }
        Ok(MarkovModel { code, channel, gamma, eta, hamiltonian: None })
    }

    /// The code's natural channel: bit flips for the 1- and 3-qubit codes,
    /// depolarizing noise for the 5-qubit code.
    pub fn for_code(code: StabilizerCode, gamma: f64, eta: f64) -> Result<Self> {
        let channel = if code.error_alphabet.len() == 3 { Channel::Depolarizing } else { Channel::BitFlip };
        Self::new(code, channel, gamma, eta)
    }

    pub fn with_hamiltonian(mut self, h: ComplexMatrix) -> Result<Self> {
        let d = 1usize << self.code.n;
        if h.nrows() != d || h.ncols() != d {
            return Err(CqecError::Dimension(format!("Hamiltonian must be {d}x{d}")));
        }
        let dev = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-12 * crate::numerics::max_abs(&h).max(1.0) {
            return Err(CqecError::Argument("Hamiltonian is not Hermitian".into()));
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }
}

/// Unit-rate dissipator Σ_q Σ_σ (σ_q ρ σ_q − ρ).
pub fn dissipator(n: usize, channel: Channel, basis: BasisConvention) -> Result<Superoperator> {
    let ops: Vec<PauliString> =
        (0..n).flat_map(|q| channel.letters().iter().map(move |&l| PauliString::single(n, q, l))).collect();
    let k = ops.len() as f64;
    superoperator_matrix(
        |r| {
            let mut out = r * C64::new(-k, 0.0);
            for p in &ops {
                out += p.conjugate(r);
            }
            out
        },
        n,
        basis,
    )
}

/// −i[H, ·] + γD + ηΓ in the requested basis.
pub fn build_liouvillian(model: &MarkovModel, basis: BasisConvention) -> Result<Superoperator> {
    let code = &model.code;
    let (noise, gamma_op) = match basis {
        BasisConvention::ErrorClass => {
            if model.hamiltonian.is_some() {
                return Err(CqecError::Argument("a Hamiltonian cannot be lumped onto error classes".into()));
            }
            let g = match model.channel {
                Channel::BitFlip => ClassGenerator::BitFlipDissipator,
                Channel::Depolarizing => ClassGenerator::DepolarizingDissipator,
            };
            (reduce_to_classes(code, g)?, correction_generator(code, basis)?)
        }
        _ => (dissipator(code.n, model.channel, basis)?, correction_generator(code, basis)?),
    };
    let mut l = noise.scaled(model.gamma).add(&gamma_op.scaled(model.eta))?;
    if let Some(h) = &model.hamiltonian {
        let ham = superoperator_matrix(|r| (h * r - r * h) * C64::new(0.0, -1.0), code.n, basis)?;
        l = l.add(&ham)?;
    }
    Ok(l)
}

/// A state in either the density-matrix or the class representation.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    Density(DensityMatrix),
    /// Weights q_J of the uniform class mixtures ρ_J.
    Classes(Vec<f64>),
}

impl SystemState {
    /// Initial class vector `e_0` (no error) for a code with `k` classes.
    pub fn no_error(k: usize) -> Self {
        let mut q = vec![0.0; k];
        q[0] = 1.0;
        SystemState::Classes(q)
    }

    pub fn as_classes(&self) -> Option<&[f64]> {
        match self {
            SystemState::Classes(q) => Some(q),
            SystemState::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DensityMatrix> {
        match self {
            SystemState::Density(d) => Some(d),
            SystemState::Classes(_) => None,
        }
    }
}

/// Largest register for density-matrix propagation; larger codes run in the
/// class basis.
pub const MAX_DENSITY_QUBITS: usize = 3;

/// A Liouvillian fixed in one basis, reusable over many times.
#[derive(Debug, Clone)]
pub struct MarkovPropagator {
    pub liouvillian: Superoperator,
    n: usize,
}

impl MarkovPropagator {
    pub fn new(model: &MarkovModel, basis: BasisConvention) -> Result<Self> {
        if basis != BasisConvention::ErrorClass && model.code.n > MAX_DENSITY_QUBITS {
            return Err(CqecError::Argument(format!(
                "density propagation is limited to {MAX_DENSITY_QUBITS} qubits; use the error-class basis"
            )));
        }
        Ok(MarkovPropagator { liouvillian: build_liouvillian(model, basis)?, n: model.code.n })
    }

    pub fn basis(&self) -> BasisConvention {
        self.liouvillian.basis
    }

    fn to_vector(&self, state: &SystemState) -> Result<ComplexVector> {
        let v = match (state, self.basis()) {
            (SystemState::Classes(q), BasisConvention::ErrorClass) => {
                ComplexVector::from_iterator(q.len(), q.iter().map(|&x| C64::new(x, 0.0)))
            }
            (SystemState::Density(rho), b) if b != BasisConvention::ErrorClass => {
                if rho.n_qubits() != self.n {
                    return Err(CqecError::Dimension(format!("state on {} qubits, model on {}", rho.n_qubits(), self.n)));
                }
                vectorize(rho, b)?
            }
            _ => {
                return Err(CqecError::Argument(format!(
                    "state representation does not match the {} basis",
                    self.basis().name()
                )))
            }
        };
        if v.len() != self.liouvillian.dim() {
            return Err(CqecError::Dimension(format!("state of length {} for a {}-dim Liouvillian", v.len(), self.liouvillian.dim())));
        }
        Ok(v)
    }

    fn from_vector(&self, v: &ComplexVector) -> Result<SystemState> {
        match self.basis() {
            BasisConvention::ErrorClass => Ok(SystemState::Classes(v.iter().map(|z| z.re).collect())),
            b => {
                let m = devectorize(v, self.n, b)?;
                let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
                Ok(SystemState::Density(DensityMatrix::from_matrix_unchecked(m)?))
            }
        }
    }

    pub fn propagate(&self, state: &SystemState, t: f64) -> Result<SystemState> {
        if !(t >= 0.0) {
            return Err(CqecError::Argument(format!("propagation time must be non-negative, got {t}")));
        }
        let v = self.to_vector(state)?;
        if t == 0.0 {
            return Ok(state.clone());
        }
        self.from_vector(&(matrix_exponential(&self.liouvillian.matrix, t)? * v))
    }

    pub fn propagate_grid(&self, state: &SystemState, times: &[f64]) -> Result<Vec<SystemState>> {
        times.iter().map(|&t| self.propagate(state, t)).collect()
    }

    /// Stationary state reached from `from`. A one-dimensional nullspace
    /// gives the unique normalized stationary state; otherwise `from` is
    /// projected onto the nullspace along the range of the Liouvillian.
    pub fn stationary(&self, from: &SystemState) -> Result<SystemState> {
        let v0 = self.to_vector(from)?;
        let l = &self.liouvillian.matrix;
        let tol = crate::numerics::Tolerances::default().nullspace;
        let right = nullspace(l, tol)?;
        if right.is_empty() {
            return Err(CqecError::Numerical("Liouvillian has no stationary state at tolerance".into()));
        }
        let v = if right.len() == 1 {
            let w = right[0].clone();
            let tr = self.trace_of(&w);
            if tr.norm() < 1e-12 {
                return Err(CqecError::Numerical("stationary vector is traceless".into()));
            }
            w / tr
        } else {
            let left = nullspace(&l.adjoint(), tol)?;
            if left.len() != right.len() {
                return Err(CqecError::Numerical("zero eigenvalue is not semisimple".into()));
            }
            let k = right.len();
            let vm = ComplexMatrix::from_columns(&right);
            let wm = ComplexMatrix::from_columns(&left);
            let g = wm.adjoint() * &vm;
            let g_inv = lu_inverse(&g)?;
            debug_assert_eq!(g_inv.nrows(), k);
            vm * g_inv * (wm.adjoint() * v0)
        };
        self.from_vector(&v)
    }

    fn trace_of(&self, v: &ComplexVector) -> C64 {
        match self.basis() {
            BasisConvention::ErrorClass => v.iter().sum(),
            BasisConvention::PauliProduct => v[0] * C64::new((1usize << self.n) as f64, 0.0),
            BasisConvention::Computational => {
                let d = 1usize << self.n;
                (0..d).map(|a| v[a * d + a]).sum()
            }
        }
    }
}

pub fn propagate(model: &MarkovModel, state: &SystemState, t: f64) -> Result<SystemState> {
    let basis = match state {
        SystemState::Classes(_) => BasisConvention::ErrorClass,
        SystemState::Density(_) => BasisConvention::PauliProduct,
    };
    MarkovPropagator::new(model, basis)?.propagate(state, t)
}

pub fn stationary_state(model: &MarkovModel, from: &SystemState) -> Result<SystemState> {
    let basis = match from {
        SystemState::Classes(_) => BasisConvention::ErrorClass,
        SystemState::Density(_) => BasisConvention::PauliProduct,
    };
    MarkovPropagator::new(model, basis)?.stationary(from)
}

/// Overlap fidelity q₀ + q₁ of a class vector.
pub fn class_overlap_fidelity(q: &[f64]) -> f64 {
    q[0] + q.get(1).copied().unwrap_or(0.0)
}

/// `(e^{−μt} cosh(rt), e^{−μt} sinh(rt)/r)` without overflow for large t;
/// the second entry tends to `t e^{−μt}` as r → 0.
pub(crate) fn damped_hyperbolic(mu: f64, r: f64, t: f64) -> (f64, f64) {
    let up = ((r - mu) * t).exp();
    let down = (-(r + mu) * t).exp();
    let ch = 0.5 * (up + down);
    let sh = if (r * t).abs() < 1e-6 {
        t * (-mu * t).exp() * (1.0 + (r * t).powi(2) / 6.0)
    } else {
        0.5 * (up - down) / r
    };
    (ch, sh)
}

/// Bloch vector of the bit-flip + correction one-qubit solution.
pub fn closed_form_1q(x0: f64, y0: f64, z0: f64, gamma: f64, eta: f64, t: f64) -> [f64; 3] {
    let r = 2.0 * gamma + eta;
    let e = (-r * t).exp();
    let feed = if r == 0.0 { 0.0 } else { eta / r * (1.0 - e) };
    [x0 * (-eta * t).exp(), e * y0, e * z0 + feed]
}

/// Class weights (q₀, q₁, q₂, q₃) of the three-qubit code from `e_0`.
pub fn closed_form_3q_coeffs(gamma: f64, eta: f64, t: f64) -> [f64; 4] {
    let r = (eta * eta + 16.0 * eta * gamma + 16.0 * gamma * gamma).sqrt();
    let s = eta + 4.0 * gamma;
    let fast = (-s * t).exp();
    let (base03, base12) = if s == 0.0 {
        (0.5, 0.0)
    } else {
        ((eta + gamma + 3.0 * gamma * fast) / (2.0 * s), 1.5 * gamma * (1.0 - fast) / s)
    };
    // sh = e^{−μt} sinh(rt/2)/(r/2)
    let (ch, sh) = damped_hyperbolic(eta / 2.0 + 4.0 * gamma, r / 2.0, t);
    let osc03 = 0.5 * (ch + (eta + 2.0 * gamma) * sh / 2.0);
    let osc12 = 1.5 * gamma * sh;
    [base03 + osc03, base12 + osc12, base12 - osc12, base03 - osc03]
}

pub fn fidelity_markov_1q(gamma: f64, eta: f64, t: f64) -> f64 {
    let r = 2.0 * gamma + eta;
    if r == 0.0 {
        return 1.0;
    }
    (gamma + eta) / r + gamma / r * (-r * t).exp()
}

pub fn fidelity_markov_3q(gamma: f64, eta: f64, t: f64) -> f64 {
    let r = (16.0 * gamma * gamma + 16.0 * gamma * eta + eta * eta).sqrt();
    let (ch, sh) = damped_hyperbolic(4.0 * gamma + eta / 2.0, r / 2.0, t);
    0.5 + 0.5 * (ch + (8.0 * gamma + eta) * sh / 2.0)
}

/// Long-time class vector of the 5-qubit code for η ≫ γ, normalized:
/// weights 1, 30, 15, 15, 3 on classes 0, 3B, 4A, 5C, 5E.
pub fn five_qubit_strong_correction_limit() -> Vec<f64> {
    let mut q = vec![0.0; 16];
    for (i, w) in [(0, 1.0), (5, 30.0), (7, 15.0), (13, 15.0), (15, 3.0)] {
        q[i] = w / 64.0;
    }
    q
}
