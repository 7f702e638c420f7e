//! X-X system-bath coupling with a cooling bath on the bath qubits and
//! continuous correction on the system.

use crate::codes::{one_qubit_code, CorrectionMap, StabilizerCode};
use crate::error::{CqecError, Result};
use crate::numerics::{integrate_ivp_with, ComplexMatrix, ComplexVector, OdeOptions, C64, ZERO};
use crate::operators::{lowering_dissipator_on_component, superoperator_matrix, BasisConvention, DensityMatrix, Pauli, Superoperator};
use num_complex::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// κ² < 64α²
    NonMarkovian,
    /// κ² = 64α²
    Critical,
    /// κ² > 64α²
    Overdamped,
}

impl Regime {
    pub fn is_markovian(self) -> bool {
        self != Regime::NonMarkovian
    }
}

/// n system qubits, each X-X coupled to its own bath qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct XXModel {
    pub n: usize,
    pub alpha: f64,
    pub kappa: f64,
    pub eta: f64,
    pub code: StabilizerCode,
}

impl XXModel {
    pub fn new(code: StabilizerCode, alpha: f64, kappa: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CqecError::Argument(format!("alpha must be positive, got {alpha}")));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) || !(eta >= 0.0 && eta.is_finite()) {
            return Err(CqecError::Argument(format!("kappa and eta must be non-negative (kappa={kappa}, eta={eta})")));
        }
        if code.error_alphabet != [Pauli::X] {
            return Err(CqecError::Argument(format!("code {} is not a bit-flip code", code.name)));
        }
        Ok(XXModel { n: code.n, alpha, kappa, eta, code })
    }

    pub fn one_qubit(alpha: f64, kappa: f64, eta: f64) -> Result<Self> {
        Self::new(one_qubit_code(), alpha, kappa, eta)
    }

    pub fn regime(&self) -> Regime {
        regime(self.alpha, self.kappa)
    }
}

pub fn regime(alpha: f64, kappa: f64) -> Regime {
    let d = kappa * kappa - 64.0 * alpha * alpha;
    if d < 0.0 {
        Regime::NonMarkovian
    } else if d == 0.0 {
        Regime::Critical
    } else {
        Regime::Overdamped
    }
}

/// Column-sparse superoperator in the computational basis of the joint
/// system-bath register (system qubits first).
#[derive(Debug, Clone)]
pub struct SparseSuperoperator {
    pub dim: usize,
    pub n_qubits: usize,
    /// `columns[j]` lists `(row, value)`.
    pub columns: Vec<Vec<(usize, C64)>>,
}

impl SparseSuperoperator {
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|x| *x = ZERO);
        for (j, col) in self.columns.iter().enumerate() {
            let x = v[j];
            if x == ZERO {
                continue;
            }
            for &(i, a) in col {
                out[i] += a * x;
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Largest |Σ_a M[aa, j]| over columns (trace preservation).
    pub fn trace_defect(&self) -> f64 {
        let d = 1usize << self.n_qubits;
        self.columns
            .iter()
            .map(|col| col.iter().filter(|(i, _)| i / d == i % d).map(|(_, a)| *a).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Superoperator {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, a) in col {
                m[(i, j)] += a;
            }
        }
        Superoperator { matrix: m, basis: BasisConvention::Computational }
    }
}

/// The joint generator: dense in the Pauli-product basis for one system
/// qubit, column-sparse in the computational basis otherwise.
#[derive(Debug, Clone)]
pub enum XXSuperoperator {
    Pauli(Superoperator),
    Sparse(SparseSuperoperator),
}

/// −iα Σ[X_iS X_iB, ·] + κ Σ D[σ₋ on bath i] + ηΓ on the system.
pub fn build_xx_superoperator(model: &XXModel) -> Result<XXSuperoperator> {
    if model.n == 1 {
        let map = CorrectionMap::new(&model.code, 2)?;
        let xx = crate::operators::PauliString::new(vec![Pauli::X, Pauli::X], Default::default())?.to_matrix();
        let sm = ComplexMatrix::from_row_slice(2, 2, &[ZERO, C64::new(1.0, 0.0), ZERO, ZERO]);
        let sm_b = ComplexMatrix::identity(2, 2).kronecker(&sm);
        let nb = sm_b.adjoint() * &sm_b;
        let (a, k, e) = (model.alpha, model.kappa, model.eta);
        let op = superoperator_matrix(
            |r| {
                let ham = (&xx * r - r * &xx) * C64::new(0.0, -a);
                let cool = &sm_b * r * sm_b.adjoint() - (&nb * r + r * &nb) * C64::new(0.5, 0.0);
                ham + cool * C64::new(k, 0.0) + map.generator(r) * C64::new(e, 0.0)
            },
            2,
            BasisConvention::PauliProduct,
        )?;
        Ok(XXSuperoperator::Pauli(op))
    } else {
        Ok(XXSuperoperator::Sparse(build_xx_sparse(model)?))
    }
}

/// Computational-basis generator assembled component by component from the
/// bit strings of `|ket⟩⟨bra|`.
pub fn build_xx_sparse(model: &XXModel) -> Result<SparseSuperoperator> {
    let n = model.n;
    let nt = 2 * n;
    let d = 1usize << nt;
    let dim = d * d;
    let code = &model.code;
    if !code.generators.iter().all(|g| g.letters().iter().all(|l| matches!(l, Pauli::I | Pauli::Z))) {
        return Err(CqecError::Argument("sparse assembly needs Z-type stabilizer generators".into()));
    }
    // syndrome index of each system basis state
    let syn: Vec<usize> = (0..1usize << n)
        .map(|a| {
            code.generators.iter().fold(0usize, |acc, g| {
                let parity = g
                    .letters()
                    .iter()
                    .enumerate()
                    .filter(|(q, l)| **l == Pauli::Z && (a >> (n - 1 - q)) & 1 == 1)
                    .count()
                    % 2;
                (acc << 1) | parity
            })
        })
        .collect();
    let flips: Vec<usize> = code.correction_table.iter().map(|c| c.x_mask()).collect();
    let mi = C64::new(0.0, -model.alpha);
    let pi = C64::new(0.0, model.alpha);
    let mut columns = Vec::with_capacity(dim);
    for x in 0..dim {
        let ket = x / d;
        let bra = x % d;
        let mut col: Vec<(usize, C64)> = Vec::with_capacity(4 * n + 4);
        for q in 0..n {
            // X on system qubit q and bath qubit q
            let m = (1usize << (nt - 1 - q)) | (1usize << (n - 1 - q));
            col.push(((ket ^ m) * d + bra, mi));
            col.push((ket * d + (bra ^ m), pi));
        }
        if model.kappa != 0.0 {
            for q in 0..n {
                for (i, c) in lowering_dissipator_on_component(x, nt, n + q) {
                    col.push((i, C64::new(model.kappa * c, 0.0)));
                }
            }
        }
        if model.eta != 0.0 {
            let (sa, sb) = (ket >> n, bra >> n);
            col.push((x, C64::new(-model.eta, 0.0)));
            if syn[sa] == syn[sb] {
                let f = flips[syn[sa]] << n;
                col.push(((ket ^ f) * d + (bra ^ f), C64::new(model.eta, 0.0)));
            }
        }
        col.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, C64)> = Vec::with_capacity(col.len());
        for (i, a) in col {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => merged.push((i, a)),
            }
        }
        merged.retain(|e| e.1 != ZERO);
        columns.push(merged);
    }
    Ok(SparseSuperoperator { dim, n_qubits: nt, columns })
}

/// e^{−μt}cos(zt) and e^{−μt}sin(zt)/z for complex z, evaluated through
/// exponentials so that large t and z → 0 are both safe.
fn damped_trig(mu: f64, z: Complex<f64>, t: f64) -> (f64, f64) {
    let iz = Complex::new(0.0, 1.0) * z;
    let a = ((iz - mu) * t).exp();
    let b = ((-iz - mu) * t).exp();
    let c = (a + b) * 0.5;
    let s = if (z * t).norm() < 1e-6 {
        Complex::new(t * (-mu * t).exp(), 0.0) * (1.0 - (z * t).powi(2) / 6.0)
    } else {
        (a - b) / (2.0 * iz)
    };
    (c.re, s.re)
}

/// C(t) and D(t) of the reduced system state
/// ρ = ½(I + x₀e^{−ηt}X + C(y₀Y + z₀Z) + D Z), valid in every regime.
pub fn xx_coefficients(alpha: f64, kappa: f64, eta: f64, t: f64) -> (f64, f64) {
    let mu = eta + kappa / 4.0;
    let z = Complex::new(64.0 * alpha * alpha - kappa * kappa, 0.0).sqrt() / 4.0;
    let (ec, es) = damped_trig(mu, z, t);
    let c = ec + kappa / 4.0 * es;
    let b = eta * (kappa + 2.0 * eta) + 8.0 * alpha * alpha;
    let a = eta * (kappa + 2.0 * eta) / b;
    let d = a * (1.0 - ec) + (32.0 * alpha * alpha * eta / b - a * kappa) / 4.0 * es;
    (c, d)
}

/// Long-time limit of D(t).
pub fn xx_stationary_d(alpha: f64, kappa: f64, eta: f64) -> f64 {
    let num = eta * (kappa + 2.0 * eta);
    num / (num + 8.0 * alpha * alpha)
}

/// Reduced system Bloch vector at time t from initial Bloch vector `r0`.
pub fn reduced_state_1q(model: &XXModel, r0: [f64; 3], t: f64) -> Result<[f64; 3]> {
    if model.n != 1 {
        return Err(CqecError::Argument("reduced_state_1q needs a one-qubit model".into()));
    }
    if !(t >= 0.0) {
        return Err(CqecError::Argument(format!("time must be non-negative, got {t}")));
    }
    let (c, d) = xx_coefficients(model.alpha, model.kappa, model.eta, t);
    Ok([r0[0] * (-model.eta * t).exp(), c * r0[1], c * r0[2] + d])
}

/// Overlap fidelity with |0⟩ for the one-qubit model started in |0⟩.
pub fn fidelity_xx_1q(alpha: f64, kappa: f64, eta: f64, t: f64) -> f64 {
    let (c, d) = xx_coefficients(alpha, kappa, eta, t);
    0.5 * (1.0 + c + d)
}

pub fn fidelity_xx_1q_asymptote(alpha: f64, kappa: f64, eta: f64) -> f64 {
    let e = eta * (kappa + 2.0 * eta);
    (e + 4.0 * alpha * alpha) / (e + 8.0 * alpha * alpha)
}

/// Joint Pauli-product vector of ½(I + r·σ) ⊗ |0⟩⟨0|.
pub fn initial_vector_1q(r0: [f64; 3]) -> ComplexVector {
    let mut v = ComplexVector::zeros(16);
    for (p, c) in [1.0, r0[0], r0[1], r0[2]].into_iter().enumerate() {
        v[4 * p] = C64::new(c / 4.0, 0.0);
        v[4 * p + 3] = C64::new(c / 4.0, 0.0);
    }
    v
}

/// Reduced system Bloch vector of a joint Pauli-product vector.
pub fn reduced_bloch(v: &ComplexVector) -> [f64; 3] {
    [4.0 * v[4].re, 4.0 * v[8].re, 4.0 * v[12].re]
}

/// Fidelity trace of a code coupled qubit-by-qubit to a cooled bath.
#[derive(Debug, Clone, PartialEq)]
pub struct XXTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Tr ρ(t); stays 1 for a trace-preserving integration.
    pub trace: Vec<f64>,
}

/// Integration tolerance for multi-qubit X-X runs.
pub const XX_REL_TOL: f64 = 1e-9;
pub const XX_ABS_TOL: f64 = 1e-12;

struct JointRun {
    gen: SparseSuperoperator,
    /// Reference ρ̄₀ entries (a, b, value) for F = Σ ρ̄₀[b,a] ρ[(a,β),(b,β)].
    weights: Vec<(usize, C64)>,
    d: usize,
}

impl JointRun {
    fn new(model: &XXModel, system: &DensityMatrix) -> Result<(Self, Vec<f64>)> {
        if system.n_qubits() != model.n {
            return Err(CqecError::Dimension(format!("system state on {} qubits for n = {}", system.n_qubits(), model.n)));
        }
        let gen = build_xx_sparse(model)?;
        let n = model.n;
        let nb = 1usize << n;
        let d = 1usize << (2 * n);
        let rs = system.matrix();
        let mut weights = Vec::new();
        for a in 0..nb {
            for b in 0..nb {
                let w = rs[(b, a)];
                if w == ZERO {
                    continue;
                }
                for beta in 0..nb {
                    weights.push((((a << n) | beta) * d + ((b << n) | beta), w));
                }
            }
        }
        // ρ₀ = ρ_S ⊗ |0…0⟩⟨0…0|
        let mut y0 = vec![0.0; 2 * d * d];
        for a in 0..nb {
            for b in 0..nb {
                let idx = (a << n) * d + (b << n);
                y0[idx] = rs[(a, b)].re;
                y0[d * d + idx] = rs[(a, b)].im;
            }
        }
        Ok((JointRun { gen, weights, d }, y0))
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64], buf_in: &mut [C64], buf_out: &mut [C64]) {
        let dd = self.d * self.d;
        for i in 0..dd {
            buf_in[i] = C64::new(y[i], y[dd + i]);
        }
        self.gen.apply_into(buf_in, buf_out);
        for i in 0..dd {
            dy[i] = buf_out[i].re;
            dy[dd + i] = buf_out[i].im;
        }
    }

    fn fidelity(&self, y: &[f64]) -> f64 {
        let dd = self.d * self.d;
        self.weights.iter().map(|&(i, w)| (w * C64::new(y[i], y[dd + i])).re).sum()
    }

    fn trace(&self, y: &[f64]) -> f64 {
        (0..self.d).map(|a| y[a * self.d + a]).sum()
    }

    fn advance(&self, y: &[f64], t0: f64, t1: f64) -> Result<Vec<f64>> {
        let dd = self.d * self.d;
        let mut bi = vec![ZERO; dd];
        let mut bo = vec![ZERO; dd];
        let opts = OdeOptions { rel_tol: XX_REL_TOL, abs_tol: XX_ABS_TOL, ..OdeOptions::default() };
        let mut sol = integrate_ivp_with(|_, y, dy| self.rhs(y, dy, &mut bi, &mut bo), y, &[t0, t1], &opts)?;
        Ok(sol.pop().expect("two-point grid"))
    }

    fn fidelity_rate(&self, y: &[f64]) -> f64 {
        let dd = self.d * self.d;
        let mut bi = vec![ZERO; dd];
        let mut bo = vec![ZERO; dd];
        let mut dy = vec![0.0; 2 * dd];
        self.rhs(y, &mut dy, &mut bi, &mut bo);
        self.fidelity(&dy)
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(CqecError::Argument("time grid must start at 0".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CqecError::Argument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Integrates the joint state `system ⊗ |0…0⟩⟨0…0|` and records
/// F(t) = Tr{(ρ_S ⊗ I_B) ρ(t)}.
pub fn simulate_xx_code(model: &XXModel, system: &DensityMatrix, t_grid: &[f64]) -> Result<XXTrace> {
    check_grid(t_grid)?;
    let (run, mut y) = JointRun::new(model, system)?;
    let mut out = XXTrace { times: t_grid.to_vec(), fidelity: Vec::with_capacity(t_grid.len()), trace: Vec::with_capacity(t_grid.len()) };
    out.fidelity.push(run.fidelity(&y));
    out.trace.push(run.trace(&y));
    for w in t_grid.windows(2) {
        y = run.advance(&y, w[0], w[1])?;
        out.fidelity.push(run.fidelity(&y));
        out.trace.push(run.trace(&y));
    }
    Ok(out)
}

/// Time of the first fidelity maximum after the initial decay, located by a
/// sign change of F′ on a grid of `samples` points over (0, t_max] and
/// refined by bisection.
pub fn first_revival(model: &XXModel, system: &DensityMatrix, t_max: f64, samples: usize) -> Result<Option<f64>> {
    if !(t_max > 0.0) || samples < 3 {
        return Err(CqecError::Argument("first_revival needs t_max > 0 and at least 3 samples".into()));
    }
    let (run, mut y) = JointRun::new(model, system)?;
    let h = t_max / (samples - 1) as f64;
    let mut prev_rate = f64::NEG_INFINITY;
    let mut t = 0.0;
    for k in 1..samples {
        let t_next = k as f64 * h;
        let y_next = run.advance(&y, t, t_next)?;
        let rate = run.fidelity_rate(&y_next);
        if prev_rate > 0.0 && rate <= 0.0 {
            // maximum in (t, t_next]
            let (mut lo, mut hi) = (t, t_next);
            let base = y.clone();
            while hi - lo > 1e-12 * t_max.max(1.0) {
                let mid = 0.5 * (lo + hi);
                let ym = run.advance(&base, t, mid)?;
                if run.fidelity_rate(&ym) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_rate = rate;
        y = y_next;
        t = t_next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{three_qubit_code, CorrectionMap};
    use crate::numerics::{eigenvalues, matrix_exponential, max_abs_diff, real_matrix};
    use crate::operators::{basis_change_matrix, vectorize, PauliString};

    fn transcribed(a: f64, k: f64, e: f64) -> ComplexMatrix {
        let h = k / 2.0;
        #[rustfmt::skip]
        let rows: [[f64; 16]; 16] = [
            [0.0; 16],
            [0., -h, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., -h, 0., 0., 0., 0., -2. * a, 0., 0., 0., 0., 0., 0., 0., 0.],
            [k, 0., 0., -k, 0., 0., 2. * a, 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., -e, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., -e - h, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., -2. * a, 0., 0., -e - h, 0., 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 2. * a, 0., k, 0., 0., -e - k, 0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0., -e, 0., 0., 0., 0., -2. * a, 0., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0., 0., -e - h, 0., 0., -2. * a, 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0., 0., 0., -e - h, 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0., k, 0., 0., -e - k, 0., 0., 0., 0.],
            [e, 0., 0., 0., 0., 0., 0., 0., 0., 2. * a, 0., 0., -e, 0., 0., 0.],
            [0., e, 0., 0., 0., 0., 0., 0., 2. * a, 0., 0., 0., 0., -e - h, 0., 0.],
            [0., 0., e, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., -e - h, 0.],
            [0., 0., 0., e, 0., 0., 0., 0., 0., 0., 0., 0., k, 0., 0., -e - k],
        ];
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        real_matrix(16, 16, &flat)
    }

    fn pauli_m(a: f64, k: f64, e: f64) -> ComplexMatrix {
        match build_xx_superoperator(&XXModel::one_qubit(a, k, e).unwrap()).unwrap() {
            XXSuperoperator::Pauli(s) => s.matrix,
            _ => unreachable!(),
        }
    }

    #[test]
    fn matrix_matches_transcription() {
        for (a, k, e) in [(1.0, 1.0, 0.5), (0.3, 2.0, 1.7), (1.0, 0.0, 0.0)] {
            assert!(max_abs_diff(&pauli_m(a, k, e), &transcribed(a, k, e)) < 1e-14);
        }
    }

    #[test]
    fn sparse_one_qubit_matches_pauli_form() {
        let (a, k, e) = (0.7, 1.1, 0.4);
        let sp = build_xx_sparse(&XXModel::one_qubit(a, k, e).unwrap()).unwrap();
        assert!(sp.trace_defect() < 1e-15);
        let dense = sp.to_dense().to_basis(2, BasisConvention::PauliProduct).unwrap();
        assert!(max_abs_diff(&dense.matrix, &transcribed(a, k, e)) < 1e-13);
    }

    #[test]
    fn sparse_three_qubit_trace_and_probe() {
        let m = XXModel::new(three_qubit_code(), 1.0, 0.8, 0.6).unwrap();
        let sp = build_xx_sparse(&m).unwrap();
        assert_eq!(sp.dim, 4096);
        assert!(sp.trace_defect() < 1e-14);
        // compare a few columns with a dense action
        let map = CorrectionMap::new(&m.code, 6).unwrap();
        let xs: Vec<ComplexMatrix> =
            (0..3).map(|q| (&PauliString::single(6, q, Pauli::X) * &PauliString::single(6, 3 + q, Pauli::X)).to_matrix()).collect();
        let sms: Vec<ComplexMatrix> = (0..3)
            .map(|q| {
                let mut s = ComplexMatrix::zeros(64, 64);
                for b in 0..64usize {
                    let bit = 1 << (2 - q);
                    if b & bit != 0 {
                        s[(b & !bit, b)] = C64::new(1.0, 0.0);
                    }
                }
                s
            })
            .collect();
        for x in [0usize, 7, 513, 2049, 4095, 1234] {
            let mut r = ComplexMatrix::zeros(64, 64);
            r[(x / 64, x % 64)] = C64::new(1.0, 0.0);
            let mut out = map.generator(&r) * C64::new(m.eta, 0.0);
            for h in &xs {
                out += (h * &r - &r * h) * C64::new(0.0, -m.alpha);
            }
            for s in &sms {
                let nb = s.adjoint() * s;
                out += (s * &r * s.adjoint() - (&nb * &r + &r * &nb) * C64::new(0.5, 0.0)) * C64::new(m.kappa, 0.0);
            }
            let mut col = ComplexMatrix::zeros(64, 64);
            for &(i, a) in &sp.columns[x] {
                col[(i / 64, i % 64)] += a;
            }
            assert!(max_abs_diff(&col, &out) < 1e-14, "column {x}");
        }
    }

    #[test]
    fn coefficient_limits() {
        assert_eq!(xx_coefficients(1.0, 1.0, 0.5, 0.0), (1.0, 0.0));
        for t in [0.1, 1.0, 3.7] {
            let (c, _) = xx_coefficients(1.3, 0.0, 0.0, t);
            assert!((c - (2.6 * t).cos()).abs() < 1e-14);
        }
        let (_, d) = xx_coefficients(1.0, 2.0, 0.7, 200.0);
        assert!((d - xx_stationary_d(1.0, 2.0, 0.7)).abs() < 1e-12);
        let (_, d) = xx_coefficients(1.0, 20.0, 0.7, 400.0);
        assert!((d - xx_stationary_d(1.0, 20.0, 0.7)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_propagation() {
        let r0 = [0.3, -0.5, 0.6];
        for k in [0.0, 0.5, 1.0, 4.0, 8.0, 8.001, 12.0] {
            for e in [0.0, 0.5, 1.0, 4.0, 8.0, 12.0] {
                let model = XXModel::one_qubit(1.0, k, e).unwrap();
                let m = pauli_m(1.0, k, e);
                let v0 = initial_vector_1q(r0);
                for t in [0.0, 0.3, 1.7, 5.0, 20.0] {
                    let b = reduced_bloch(&(matrix_exponential(&m, t).unwrap() * &v0));
                    let c = reduced_state_1q(&model, r0, t).unwrap();
                    for i in 0..3 {
                        assert!((b[i] - c[i]).abs() < 1e-8, "k {k} e {e} t {t}: {b:?} vs {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn critical_and_printed_branches() {
        let (a, e) = (1.0, 0.7);
        for t in [0.2, 1.0, 2.5] {
            let (c, d) = xx_coefficients(a, 8.0 * a, e, t);
            let want_c = (-(e + 2.0 * a) * t).exp() * (1.0 + 2.0 * a * t);
            assert!((c - want_c).abs() < 1e-12);
            // the gap across κ = 8α shrinks linearly with ε: no jump
            let gap = |eps: f64| fidelity_xx_1q(a, 8.0 * a - eps, e, t) - fidelity_xx_1q(a, 8.0 * a + eps, e, t);
            assert!(gap(1e-6).abs() < 1e-7);
            assert!((gap(1e-6) / gap(1e-7) - 10.0).abs() < 1e-2, "{}", gap(1e-6) / gap(1e-7));
            assert!((0.5 * (1.0 + c + d) - fidelity_xx_1q(a, 8.0 * a, e, t)).abs() < 1e-15);
            // underdamped C as printed
            let k: f64 = 3.0;
            let w = (64.0 * a * a - k * k).sqrt();
            let pc = (-(e + k / 4.0) * t).exp() * (k * (t / 4.0 * w).sin() / w + (t / 4.0 * w).cos());
            assert!((xx_coefficients(a, k, e, t).0 - pc).abs() < 1e-13);
        }
    }

    #[test]
    fn fidelity_limits() {
        let (a, k, e) = (1.0, 2.0, 1.5);
        assert!((fidelity_xx_1q(a, k, e, 0.0) - 1.0).abs() < 1e-15);
        assert!((fidelity_xx_1q(a, k, e, 300.0) - fidelity_xx_1q_asymptote(a, k, e)).abs() < 1e-12);
        let t: f64 = 1e-3;
        let short = 1.0 - a * a * t * t + (k + 4.0 * e) * a * a * t.powi(3) / 6.0;
        assert!((fidelity_xx_1q(a, k, e, t) - short).abs() < 1e-11);
        let mut last = 0.0;
        for e in [0.0, 0.1, 1.0, 10.0] {
            let f = fidelity_xx_1q_asymptote(1.0, 1.0, e);
            assert!(f > last);
            last = f;
        }
    }

    #[test]
    fn strong_correction_pins_ground_state() {
        let m = XXModel::one_qubit(1.0, 1.0, 1e4).unwrap();
        let b = reduced_state_1q(&m, [0.0, 0.0, -1.0], 1.0).unwrap();
        assert!((b[2] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn unitary_limit_spectrum() {
        let ev = eigenvalues(&pauli_m(1.0, 0.0, 0.0)).unwrap();
        assert!(ev.iter().all(|z| z.re.abs() < 1e-10));
    }

    #[test]
    fn regimes() {
        assert_eq!(regime(1.0, 1.0), Regime::NonMarkovian);
        assert_eq!(regime(1.0, 8.0), Regime::Critical);
        assert_eq!(regime(1.0, 12.0), Regime::Overdamped);
        assert!(XXModel::one_qubit(0.0, 1.0, 1.0).is_err());
        assert!(XXModel::new(crate::codes::five_qubit_code(), 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn joint_one_qubit_run_matches_closed_form() {
        let m = XXModel::one_qubit(1.0, 1.0, 0.5).unwrap();
        let grid: Vec<f64> = (0..11).map(|k| 0.4 * k as f64).collect();
        let tr = simulate_xx_code(&m, &DensityMatrix::basis_state(1, 0), &grid).unwrap();
        for (t, f) in grid.iter().zip(&tr.fidelity) {
            assert!((f - fidelity_xx_1q(1.0, 1.0, 0.5, *t)).abs() < 1e-8);
        }
        assert!(tr.trace.iter().all(|x| (x - 1.0).abs() < 1e-10));
    }

    #[test]
    fn joint_vector_basis_consistency() {
        let rho = DensityMatrix::from_bloch(0.3, -0.5, 0.6).unwrap().kron(&DensityMatrix::basis_state(1, 0));
        let v = vectorize(&rho, BasisConvention::PauliProduct).unwrap();
        let w = initial_vector_1q([0.3, -0.5, 0.6]);
        assert!((v - w).norm() < 1e-15);
        let lam = basis_change_matrix(BasisConvention::PauliProduct, BasisConvention::Computational, 2).unwrap();
        assert_eq!(lam.nrows(), 16);
    }

    #[test]
    fn three_qubit_revival_and_short_time() {
        let rho = DensityMatrix::basis_state(3, 0);
        let m = XXModel::new(three_qubit_code(), 1.0, 0.0, 0.0).unwrap();
        let t = first_revival(&m, &rho, 4.0, 41).unwrap().unwrap();
        assert!((t - std::f64::consts::PI).abs() < 1e-6);

        let (k, e) = (1.0, 2.0);
        let m = XXModel::new(three_qubit_code(), 1.0, k, e).unwrap();
        let grid: Vec<f64> = (0..=10).map(|j| 1e-3 * j as f64).collect();
        let tr = simulate_xx_code(&m, &rho, &grid).unwrap();
        for (t, f) in grid.iter().zip(&tr.fidelity).skip(1) {
            let want = 1.0 - 3.0 * t * t + 0.5 * (k + 4.0 * e) * t.powi(3);
            assert!((f - want).abs() < 2.0 * t.powi(4) * 10.0, "t {t}");
        }
        assert!(tr.trace.iter().all(|x| (x - 1.0).abs() < 1e-10));
        assert!(simulate_xx_code(&m, &rho, &[0.1, 0.2]).is_err());
    }
}
