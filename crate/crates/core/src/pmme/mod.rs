//! Post-Markovian master equation
//! q' = L0 q + L1 ∫₀ᵗ k(s) e^{(L0+L1)s} q(t−s) ds
//! for kernels with rational Laplace transforms.

mod laplace;
mod volterra;

pub use laplace::{poly_add, poly_derivative, poly_mul, poly_scale, poly_shift, RationalFunction};
pub use volterra::{pmme_volterra, VolterraTrajectory};

use crate::codes::{correction_generator, five_qubit_code, one_qubit_code, reduce_to_classes, three_qubit_code, ClassGenerator, StabilizerCode};
use crate::error::{CqecError, Result};
use crate::lindblad::{damped_hyperbolic, dissipator, Channel};
use crate::numerics::{eigendecompose, lu_inverse, matrix_exponential, ComplexMatrix, ComplexVector, C64, ZERO};
use crate::operators::{BasisConvention, Superoperator};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// k = δ(t); the Markovian limit.
    Delta,
    /// k = a e^{−ct}, k̃ = a/(s+c).
    Exponential { a: f64, c: f64 },
    /// k̃ = (s+a)/(s²+bs+c).
    Damped { a: f64, b: f64, c: f64 },
}

/// A memory kernel with a rational Laplace transform.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    pub kind: KernelKind,
    pub laplace: RationalFunction,
}

/// Controllable-canonical realization k(t) = cᵀ e^{Ft} b.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub f: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.b.len()
    }
}

impl MemoryKernel {
    pub fn delta() -> Self {
        MemoryKernel { kind: KernelKind::Delta, laplace: RationalFunction::constant(1.0) }
    }

    pub fn exponential(a: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) || !(c > 0.0 && c.is_finite()) {
            return Err(CqecError::Argument(format!("exponential kernel needs a >= 0 and c > 0 (a={a}, c={c})")));
        }
        Ok(MemoryKernel { kind: KernelKind::Exponential { a, c }, laplace: RationalFunction::new(vec![a], vec![1.0, c])? })
    }

    /// The normalized kernel c e^{−ct}.
    pub fn normalized_exponential(c: f64) -> Result<Self> {
        Self::exponential(c, c)
    }

    pub fn damped(a: f64, b: f64, c: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|x| x.is_finite()) || !(b > 0.0) || !(c > 0.0) {
            return Err(CqecError::Argument(format!("damped kernel needs b > 0 and c > 0 (a={a}, b={b}, c={c})")));
        }
        Ok(MemoryKernel { kind: KernelKind::Damped { a, b, c }, laplace: RationalFunction::new(vec![1.0, a], vec![1.0, b, c])? })
    }

    pub fn is_delta(&self) -> bool {
        self.kind == KernelKind::Delta
    }

    pub fn laplace_at(&self, s: C64) -> C64 {
        self.laplace.eval(s)
    }

    pub fn realization(&self) -> Option<StateSpace> {
        if self.is_delta() {
            return None;
        }
        let lead = self.laplace.den[0];
        let den: Vec<f64> = self.laplace.den.iter().map(|x| x / lead).collect();
        let m = den.len() - 1;
        let mut f = DMatrix::<f64>::zeros(m, m);
        for i in 0..m.saturating_sub(1) {
            f[(i, i + 1)] = 1.0;
        }
        for j in 0..m {
            // den = [1, d_{m-1}, ..., d_0]
            f[(m - 1, j)] = -den[m - j];
        }
        let mut b = vec![0.0; m];
        b[m - 1] = 1.0;
        // c_j multiplies s^j
        let num = &self.laplace.num;
        let c = (0..m).map(|j| if j < num.len() { num[num.len() - 1 - j] / lead } else { 0.0 }).collect();
        Some(StateSpace { f, b, c })
    }

    /// k(t); undefined for the delta kernel.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.kind {
            KernelKind::Delta => Err(CqecError::Argument("the delta kernel has no pointwise value".into())),
            KernelKind::Exponential { a, c } => Ok(a * (-c * t).exp()),
            KernelKind::Damped { .. } => {
                let ss = self.realization().expect("rational kernel");
                let e = matrix_exponential(&crate::numerics::to_complex(&ss.f), t)?;
                let m = ss.order();
                Ok((0..m).map(|i| ss.c[i] * e[(i, m - 1)].re).sum())
            }
        }
    }
}

/// L0 (correction, rate included), L1 (noise, rate included) and a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct PmmeModel {
    pub l0: Superoperator,
    pub l1: Superoperator,
    pub kernel: MemoryKernel,
}

impl PmmeModel {
    pub fn new(l0: Superoperator, l1: Superoperator, kernel: MemoryKernel) -> Result<Self> {
        if l0.basis != l1.basis || l0.dim() != l1.dim() {
            return Err(CqecError::Dimension(format!(
                "L0 ({}, {}) and L1 ({}, {}) differ",
                l0.basis.name(),
                l0.dim(),
                l1.basis.name(),
                l1.dim()
            )));
        }
        Ok(PmmeModel { l0, l1, kernel })
    }

    /// L0 = ηΓ, L1 = γD with the code's natural channel. The one-qubit code
    /// uses the Pauli-product basis, the others the error-class basis.
    pub fn for_code(code: &StabilizerCode, gamma: f64, eta: f64, kernel: MemoryKernel) -> Result<Self> {
        if !(gamma >= 0.0) || !(eta >= 0.0) {
            return Err(CqecError::Argument("rates must be non-negative".into()));
        }
        let (l0, l1) = if code.n == 1 {
            let b = BasisConvention::PauliProduct;
            (correction_generator(code, b)?, dissipator(1, Channel::BitFlip, b)?)
        } else {
            let g = if code.error_alphabet.len() == 3 {
                ClassGenerator::DepolarizingDissipator
            } else {
                ClassGenerator::BitFlipDissipator
            };
            (correction_generator(code, BasisConvention::ErrorClass)?, reduce_to_classes(code, g)?)
        };
        Self::new(l0.scaled(eta), l1.scaled(gamma), kernel)
    }

    pub fn dim(&self) -> usize {
        self.l0.dim()
    }

    pub fn generator_sum(&self) -> ComplexMatrix {
        &self.l0.matrix + &self.l1.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmmeMethod {
    /// Delta kernel: exp((L0+L1)t).
    Markovian,
    /// Auxiliary variables per eigenmode of L0+L1.
    EigenAugmented,
    /// Auxiliary variables on the full space (F ⊗ I + I ⊗ (L0+L1)), used when
    /// L0+L1 is not safely diagonalizable.
    KroneckerAugmented,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmmeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub method: PmmeMethod,
    pub notice: Option<String>,
}

/// Generator of the augmented linear system and its size.
fn augmented_generator(model: &PmmeModel) -> Result<(ComplexMatrix, PmmeMethod, Option<String>)> {
    let ss = model.kernel.realization().expect("non-delta kernel");
    let d = model.dim();
    let m = ss.order();
    let a = model.generator_sum();
    let spec = eigendecompose(&a)?;
    let n = d + d * m;
    let mut g = ComplexMatrix::zeros(n, n);
    g.view_mut((0, 0), (d, d)).copy_from(&model.l0.matrix);
    let cplx = |x: f64| C64::new(x, 0.0);
    if spec.diagonalizable {
        // W_i' = (F + λ_i) W_i + b (Q⁻¹q)_i ;  q' += L1 Q [cᵀ W_i]_i
        let q = &spec.eigenvectors;
        let q_inv = lu_inverse(q)?;
        let l1q = &model.l1.matrix * q;
        for (i, lam) in spec.eigenvalues.iter().enumerate() {
            let base = d + i * m;
            for r in 0..m {
                for c in 0..m {
                    g[(base + r, base + c)] = cplx(ss.f[(r, c)]) + if r == c { *lam } else { ZERO };
                }
                if ss.b[r] != 0.0 {
                    for k in 0..d {
                        g[(base + r, k)] = cplx(ss.b[r]) * q_inv[(i, k)];
                    }
                }
            }
            for r in 0..d {
                for c in 0..m {
                    g[(r, base + c)] = l1q[(r, i)] * cplx(ss.c[c]);
                }
            }
        }
        Ok((g, PmmeMethod::EigenAugmented, None))
    } else {
        // W ∈ C^{m·d}, block j holds the j-th kernel state for every component
        for j in 0..m {
            for jj in 0..m {
                let fjj = ss.f[(j, jj)];
                for k in 0..d {
                    g[(d + j * d + k, d + jj * d + k)] += cplx(fjj);
                }
            }
            for r in 0..d {
                for c in 0..d {
                    g[(d + j * d + r, d + j * d + c)] += a[(r, c)];
                }
            }
            if ss.b[j] != 0.0 {
                for k in 0..d {
                    g[(d + j * d + k, k)] = cplx(ss.b[j]);
                }
            }
            for r in 0..d {
                for c in 0..d {
                    g[(r, d + j * d + c)] = model.l1.matrix[(r, c)] * cplx(ss.c[j]);
                }
            }
        }
        let notice = format!(
            "L0+L1 eigenvector condition {:.3e} exceeds the diagonalizable threshold; solved on the full augmented space",
            spec.condition
        );
        Ok((g, PmmeMethod::KroneckerAugmented, Some(notice)))
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

/// Solves the PMME exactly on a time grid starting at 0. Each convolution
/// with k(s)e^{λs} becomes auxiliary linear variables, and the resulting
/// constant-coefficient system is propagated by matrix exponentials.
pub fn pmme_propagate(model: &PmmeModel, q0: &[f64], t_grid: &[f64]) -> Result<PmmeSolution> {
    check_grid(t_grid)?;
    let d = model.dim();
    if q0.len() != d {
        return Err(CqecError::Dimension(format!("initial vector of length {} for dimension {d}", q0.len())));
    }
    let (g, method, notice) = if model.kernel.is_delta() {
        (model.generator_sum(), PmmeMethod::Markovian, None)
    } else {
        augmented_generator(model)?
    };
    let mut y0 = ComplexVector::zeros(g.nrows());
    for (i, &x) in q0.iter().enumerate() {
        y0[i] = C64::new(x, 0.0);
    }
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let y = if t == 0.0 { y0.clone() } else { matrix_exponential(&g, t)? * &y0 };
        states.push(y.iter().take(d).map(|z| z.re).collect());
    }
    Ok(PmmeSolution { times: t_grid.to_vec(), states, method, notice })
}

/// ξ̃(s) = D(u) / ((s+η)D(u) + 2γN(u)) with u = s + 2γ + η and k̃ = N/D.
pub fn xi_transform(kernel: &MemoryKernel, gamma: f64, eta: f64) -> Result<RationalFunction> {
    let (n, d) = (&kernel.laplace.num, &kernel.laplace.den);
    let u = 2.0 * gamma + eta;
    let du = poly_shift(d, u);
    let nu = poly_shift(n, u);
    let den = poly_add(&poly_mul(&[1.0, eta], &du), &poly_scale(&nu, 2.0 * gamma));
    RationalFunction::new(du, den)
}

/// χ̃(s) = ξ̃(s)·[η/(2s) + (γη/(2γ+η))(k̃(u) − k̃(s))/s].
pub fn chi_transform(kernel: &MemoryKernel, gamma: f64, eta: f64) -> Result<RationalFunction> {
    let (n, d) = (&kernel.laplace.num, &kernel.laplace.den);
    let u = 2.0 * gamma + eta;
    let du = poly_shift(d, u);
    let nu = poly_shift(n, u);
    let p = poly_add(&poly_mul(&[1.0, eta], &du), &poly_scale(&nu, 2.0 * gamma));
    let g = if gamma + eta > 0.0 { gamma * eta / (2.0 * gamma + eta) } else { 0.0 };
    let cross = poly_add(&poly_mul(&nu, d), &poly_scale(&poly_mul(n, &du), -1.0));
    let num = poly_add(&poly_scale(&poly_mul(&du, d), eta), &poly_scale(&cross, 2.0 * g));
    let den = poly_mul(&poly_mul(&[2.0, 0.0], &p), d);
    RationalFunction::new(num, den)
}

fn complex_hyperbolic(mu: f64, r2: f64, t: f64) -> (f64, f64) {
    if r2 >= 0.0 {
        damped_hyperbolic(mu, r2.sqrt(), t)
    } else {
        // cosh(i w t) = cos(wt), sinh(i w t)/(i w) = sin(wt)/w
        let w = (-r2).sqrt();
        let e = (-mu * t).exp();
        let s = if w * t < 1e-6 { t } else { (w * t).sin() / w };
        (e * (w * t).cos(), e * s)
    }
}

/// ξ(t) and χ(t) for the kernel a e^{−ct}. Outside (c/2+γ)² > 2γa the
/// hyperbolic functions continue to trigonometric ones.
pub fn xi_chi_closed_form(a: f64, c: f64, gamma: f64, eta: f64, t: f64) -> Result<(f64, f64)> {
    if !(c > 0.0) || !(a >= 0.0) || !(gamma >= 0.0) || !(eta >= 0.0) || !(t >= 0.0) {
        return Err(CqecError::Argument("xi_chi_closed_form needs c > 0, a, γ, η, t >= 0".into()));
    }
    let h = c / 2.0 + gamma;
    let mu = h + eta;
    let r2 = h * h - 2.0 * gamma * a;
    let (ch, sh) = complex_hyperbolic(mu, r2, t);
    let xi = h * sh + ch;
    if eta == 0.0 {
        return Ok((xi, 0.0));
    }
    let bp = 2.0 * a * gamma + eta * (c + 2.0 * gamma + eta);
    let chi_inf = eta * (c * c + c * (eta + 2.0 * gamma) - 2.0 * a * gamma) / (2.0 * c * bp);
    let split = 2.0 * a * gamma - (c - eta) * (2.0 * gamma + eta);
    let rc = if a * gamma == 0.0 {
        0.0
    } else if split.abs() < 1e-12 * (1.0 + c * c + eta * eta + gamma * gamma + a * gamma) {
        return Err(CqecError::Numerical("pole at −c coincides with a pole of ξ̃; use pmme_propagate".into()));
    } else {
        a * gamma * eta / (c * split)
    };
    let p = -chi_inf - rc;
    let q = eta / 2.0 + c * rc + mu * p;
    let chi = chi_inf + rc * (-c * t).exp() + p * ch + q * sh;
    Ok((xi, chi))
}

/// Long-time 1 − F for the kernel a e^{−ct}.
pub fn pmme_1q_asymptotic_infidelity(a: f64, c: f64, gamma: f64, eta: f64) -> f64 {
    a * gamma * (c + eta) / (c * (2.0 * a * gamma + eta * (2.0 * gamma + c + eta)))
}

/// F = (1+ξ)/2 + χ for the one-qubit code started in |0⟩.
pub fn fidelity_pmme_1q(kernel: &MemoryKernel, gamma: f64, eta: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(CqecError::Argument(format!("time must be non-negative, got {t}")));
    }
    match kernel.kind {
        KernelKind::Delta => Ok(crate::lindblad::fidelity_markov_1q(gamma, eta, t)),
        KernelKind::Exponential { a, c } => match xi_chi_closed_form(a, c, gamma, eta, t) {
            Ok((xi, chi)) => Ok(0.5 * (1.0 + xi) + chi),
            Err(CqecError::Numerical(_)) => fidelity_pmme_1q_numeric(kernel, gamma, eta, t),
            Err(e) => Err(e),
        },
        KernelKind::Damped { .. } => {
            let xi = xi_transform(kernel, gamma, eta)?;
            let chi = chi_transform(kernel, gamma, eta)?;
            match (xi.inverse_laplace(t), chi.inverse_laplace(t)) {
                (Ok(x), Ok(c)) => Ok(0.5 * (1.0 + x) + c),
                _ => fidelity_pmme_1q_numeric(kernel, gamma, eta, t),
            }
        }
    }
}

fn fidelity_pmme_1q_numeric(kernel: &MemoryKernel, gamma: f64, eta: f64, t: f64) -> Result<f64> {
    let model = PmmeModel::for_code(&one_qubit_code(), gamma, eta, kernel.clone())?;
    let sol = pmme_propagate(&model, &[0.5, 0.0, 0.0, 0.5], &[0.0, t.max(f64::MIN_POSITIVE)])?;
    let v = &sol.states[1];
    Ok(if t == 0.0 { 1.0 } else { v[0] + v[3] })
}

/// Overlap fidelity q₀+q₁ of the three-qubit code for the kernel c e^{−ct}.
pub fn fidelity_pmme_3q_closed(c: f64, gamma: f64, eta: f64, t: f64) -> Result<f64> {
    if !(c > 0.0) || !(t >= 0.0) {
        return Err(CqecError::Argument("fidelity_pmme_3q_closed needs c > 0 and t >= 0".into()));
    }
    let g = gamma / c;
    let lin = 1.0 - (8.0 * gamma + eta) / c;
    let den = lin + 12.0 * g * g;
    if den.abs() < 1e-12 {
        return Err(CqecError::Numerical("kernel rate coincides with a Liouvillian pole".into()));
    }
    let r = (16.0 * gamma * gamma + 16.0 * gamma * eta + eta * eta).sqrt();
    let (ch, sh) = damped_hyperbolic(4.0 * gamma + eta / 2.0, r / 2.0, t);
    // sh = e^{−μt} sinh(rt/2)/(r/2)
    let sinh_coef = 8.0 * gamma * (1.0 - 5.0 * g) + eta * (1.0 - 16.0 * g) - eta * eta / c;
    Ok(0.5 + 0.5 / den * (12.0 * g * g * (-c * t).exp() + lin * ch + sinh_coef * sh / 2.0))
}

/// Class-basis PMME overlap fidelity for the three- or five-qubit code.
pub fn pmme_class_fidelity(code: &StabilizerCode, kernel: &MemoryKernel, gamma: f64, eta: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    let model = PmmeModel::for_code(code, gamma, eta, kernel.clone())?;
    let mut q0 = vec![0.0; model.dim()];
    q0[0] = 1.0;
    let sol = pmme_propagate(&model, &q0, t_grid)?;
    Ok(sol.states.iter().map(|q| q[0] + q[1]).collect())
}

pub fn pmme_3q(kernel: &MemoryKernel, gamma: f64, eta: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    pmme_class_fidelity(&three_qubit_code(), kernel, gamma, eta, t_grid)
}

/// Five-qubit overlap fidelity with the kernel c e^{−ct}.
pub fn pmme_5q(c: f64, gamma: f64, eta: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    pmme_class_fidelity(&five_qubit_code(), &MemoryKernel::normalized_exponential(c)?, gamma, eta, t_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{fidelity_markov_3q, MarkovModel, MarkovPropagator, SystemState};

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn kernel_realizations_match_laplace() {
        let kernels = [
            MemoryKernel::exponential(0.7, 1.3).unwrap(),
            MemoryKernel::damped(1.0, 1.0, 1.0).unwrap(),
            MemoryKernel::damped(0.5, 3.0, 1.0).unwrap(),
        ];
        for k in &kernels {
            // ∫ e^{−st} k(t) dt by composite Simpson on [0, 40]
            for s in [0.5, 1.0, 2.0] {
                let n = 4000;
                let h = 40.0 / n as f64;
                let mut acc = 0.0;
                for i in 0..=n {
                    let t = i as f64 * h;
                    let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * (-s * t).exp() * k.eval(t).unwrap();
                }
                acc *= h / 3.0;
                assert!((acc - k.laplace_at(C64::new(s, 0.0)).re).abs() < 1e-8, "{:?} s={s}", k.kind);
            }
        }
        assert!(MemoryKernel::delta().eval(0.0).is_err());
    }

    #[test]
    fn damped_kernel_time_form() {
        // underdamped a=b=c=1: poles −1/2 ± i√3/2
        let k = MemoryKernel::damped(1.0, 1.0, 1.0).unwrap();
        let w = 3f64.sqrt() / 2.0;
        for t in [0.0f64, 0.5, 2.0, 7.0] {
            let want = (-0.5 * t).exp() * ((1.0 - 0.5) / w * (w * t).sin() + (w * t).cos());
            assert!((k.eval(t).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_kernel_is_markovian() {
        for code in [one_qubit_code(), three_qubit_code(), five_qubit_code()] {
            let model = PmmeModel::for_code(&code, 0.8, 1.7, MemoryKernel::delta()).unwrap();
            let mm = MarkovModel::for_code(code.clone(), 0.8, 1.7).unwrap();
            let basis = model.l0.basis;
            let p = MarkovPropagator::new(&mm, basis).unwrap();
            let mut q0 = vec![0.0; model.dim()];
            q0[0] = if code.n == 1 { 0.5 } else { 1.0 };
            if code.n == 1 {
                q0[3] = 0.5;
            }
            let g = grid(3.0, 7);
            let sol = pmme_propagate(&model, &q0, &g).unwrap();
            assert_eq!(sol.method, PmmeMethod::Markovian);
            let a = sol.states.last().unwrap();
            let want = crate::numerics::matrix_exponential(&p.liouvillian.matrix, 3.0).unwrap();
            for i in 0..a.len() {
                let w: f64 = (0..a.len()).map(|j| want[(i, j)].re * q0[j]).sum();
                assert!((a[i] - w).abs() < 1e-10);
            }
        }
        let _ = SystemState::no_error(4);
    }

    #[test]
    fn xi_chi_match_augmented_solver() {
        let (a, c, g, e) = (1.0, 1.0, 1.0, 1.0);
        let model = PmmeModel::for_code(&one_qubit_code(), g, e, MemoryKernel::exponential(a, c).unwrap()).unwrap();
        let (y0, z0) = (0.6, 0.8);
        let tg = grid(8.0, 41);
        let sol = pmme_propagate(&model, &[0.5, 0.0, y0 / 2.0, z0 / 2.0], &tg).unwrap();
        assert_eq!(sol.method, PmmeMethod::EigenAugmented);
        for (t, v) in tg.iter().zip(&sol.states) {
            let (xi, chi) = xi_chi_closed_form(a, c, g, e, *t).unwrap();
            assert!((v[2] - y0 / 2.0 * xi).abs() < 1e-10, "t {t}");
            assert!((v[3] - (z0 / 2.0 * xi + chi)).abs() < 1e-10, "t {t}");
        }
    }

    #[test]
    fn xi_chi_limits_and_branches() {
        assert_eq!(xi_chi_closed_form(1.0, 2.0, 1.0, 0.5, 0.0).unwrap(), (1.0, 0.0));
        let (a, c, g, e) = (0.7, 1.5, 1.2, 0.9);
        let (_, chi) = xi_chi_closed_form(a, c, g, e, 200.0).unwrap();
        let bp = 2.0 * a * g + e * (c + 2.0 * g + e);
        assert!((chi - e * (c * c + c * (e + 2.0 * g) - 2.0 * a * g) / (2.0 * c * bp)).abs() < 1e-12);
        // trigonometric continuation: (c/2+γ)² < 2γa
        let (a, c, g, e) = (5.0, 0.5, 1.0, 0.4);
        let model = PmmeModel::for_code(&one_qubit_code(), g, e, MemoryKernel::exponential(a, c).unwrap()).unwrap();
        let tg = grid(5.0, 11);
        let sol = pmme_propagate(&model, &[0.5, 0.0, 0.0, 0.5], &tg).unwrap();
        for (t, v) in tg.iter().zip(&sol.states) {
            let (xi, chi) = xi_chi_closed_form(a, c, g, e, *t).unwrap();
            assert!((v[3] - (xi / 2.0 + chi)).abs() < 1e-10);
        }
        // coincident poles: 2aγ = (c−η)(2γ+η)
        assert!(matches!(xi_chi_closed_form(1.5, 2.0, 1.0, 1.0, 1.0), Err(CqecError::Numerical(_))));
        let k = MemoryKernel::exponential(1.5, 2.0).unwrap();
        let f = fidelity_pmme_1q(&k, 1.0, 1.0, 1.0).unwrap();
        let f2 = fidelity_pmme_1q(&MemoryKernel::exponential(1.5, 2.0 + 1e-7).unwrap(), 1.0, 1.0, 1.0).unwrap();
        assert!((f - f2).abs() < 1e-5);
    }

    #[test]
    fn rational_oracle_matches_closed_form() {
        let (a, c, g, e) = (1.0, 1.0, 1.0, 1.0);
        let k = MemoryKernel::exponential(a, c).unwrap();
        let xi = xi_transform(&k, g, e).unwrap();
        let chi = chi_transform(&k, g, e).unwrap();
        for t in [0.0, 0.4, 1.0, 3.0, 9.0] {
            let (x, ch) = xi_chi_closed_form(a, c, g, e, t).unwrap();
            assert!((xi.inverse_laplace(t).unwrap() - x).abs() < 1e-10);
            assert!((chi.inverse_laplace(t).unwrap() - ch).abs() < 1e-10);
        }
    }

    #[test]
    fn damped_kernel_rational_vs_augmented() {
        let k = MemoryKernel::damped(1.0, 1.0, 1.0).unwrap();
        let (g, e) = (1.0, 1.0);
        let xi = xi_transform(&k, g, e).unwrap();
        assert_eq!(xi.den.len(), 4);
        let model = PmmeModel::for_code(&one_qubit_code(), g, e, k.clone()).unwrap();
        let tg = grid(6.0, 13);
        let sol = pmme_propagate(&model, &[0.5, 0.0, 0.0, 0.5], &tg).unwrap();
        for (t, v) in tg.iter().zip(&sol.states) {
            let f = fidelity_pmme_1q(&k, g, e, *t).unwrap();
            assert!((f - (v[0] + v[3])).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_1q_limits() {
        let (a, c, g, e) = (1.0, 2.0, 1.0, 1.5);
        let k = MemoryKernel::exponential(a, c).unwrap();
        assert!((fidelity_pmme_1q(&k, g, e, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let f_inf = fidelity_pmme_1q(&k, g, e, 100.0).unwrap();
        assert!((1.0 - f_inf - pmme_1q_asymptotic_infidelity(a, c, g, e)).abs() < 1e-12);
        let t: f64 = 1e-3;
        let f = fidelity_pmme_1q(&k, g, e, t).unwrap();
        assert!(((1.0 - f) / (t * t) - 0.5 * a * g).abs() < 1e-2);
    }

    #[test]
    fn three_qubit_closed_form_matches_solver() {
        for (c, e) in [(0.5, 1.0), (1.0, 1.0), (5.0, 1.0), (2.0, 0.5), (3.0, 0.0)] {
            let f = pmme_3q(&MemoryKernel::normalized_exponential(c).unwrap(), 1.0, e, &grid(6.0, 25)).unwrap();
            for (t, fv) in grid(6.0, 25).iter().zip(&f) {
                assert!((fidelity_pmme_3q_closed(c, 1.0, e, *t).unwrap() - fv).abs() < 1e-10, "c {c} t {t}");
            }
        }
        let t: f64 = 1e-2;
        let (c, g, e) = (1.0, 1.0, 1.0);
        let short = 1.0 - c * g * g * t.powi(3) + 0.25 * c * g * g * (c + 8.0 * g + e) * t.powi(4);
        assert!((fidelity_pmme_3q_closed(c, g, e, t).unwrap() - short).abs() < 1e-9);
    }

    #[test]
    fn large_c_recovers_markov() {
        for t in grid(3.0, 31) {
            let f = fidelity_pmme_3q_closed(1e3, 1.0, 1.0, t).unwrap();
            assert!((f - fidelity_markov_3q(1.0, 1.0, t)).abs() < 1e-2);
        }
    }

    #[test]
    fn probability_conserved() {
        let tg = grid(5.0, 11);
        let model = PmmeModel::for_code(&five_qubit_code(), 1.0, 1.0, MemoryKernel::damped(1.0, 1.0, 1.0).unwrap()).unwrap();
        let mut q0 = vec![0.0; 16];
        q0[0] = 1.0;
        for q in pmme_propagate(&model, &q0, &tg).unwrap().states {
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kronecker_path_agrees() {
        let model = PmmeModel::for_code(&three_qubit_code(), 1.0, 0.7, MemoryKernel::damped(0.5, 2.0, 3.0).unwrap()).unwrap();
        let (g_eig, m1, _) = augmented_generator(&model).unwrap();
        assert_eq!(m1, PmmeMethod::EigenAugmented);
        // force the full-space realization by hand
        let ss = model.kernel.realization().unwrap();
        let d = model.dim();
        let m = ss.order();
        let a = model.generator_sum();
        let n = d + d * m;
        let mut g = ComplexMatrix::zeros(n, n);
        g.view_mut((0, 0), (d, d)).copy_from(&model.l0.matrix);
        for j in 0..m {
            for jj in 0..m {
                for k in 0..d {
                    g[(d + j * d + k, d + jj * d + k)] += C64::new(ss.f[(j, jj)], 0.0);
                }
            }
            for r in 0..d {
                for c in 0..d {
                    g[(d + j * d + r, d + j * d + c)] += a[(r, c)];
                    g[(r, d + j * d + c)] = model.l1.matrix[(r, c)] * C64::new(ss.c[j], 0.0);
                }
                if ss.b[j] != 0.0 {
                    g[(d + j * d + r, r)] = C64::new(ss.b[j], 0.0);
                }
            }
        }
        let mut y = ComplexVector::zeros(n);
        y[0] = C64::new(1.0, 0.0);
        let t = 2.5;
        let u = matrix_exponential(&g_eig, t).unwrap() * &y;
        let v = matrix_exponential(&g, t).unwrap() * &y;
        for i in 0..d {
            assert!((u[i] - v[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn volterra_converges_at_second_order() {
        let model = PmmeModel::for_code(&three_qubit_code(), 1.0, 1.0, MemoryKernel::normalized_exponential(1.0).unwrap()).unwrap();
        let q0 = [1.0, 0.0, 0.0, 0.0];
        let t_max = 2.0;
        let exact = pmme_propagate(&model, &q0, &[0.0, t_max]).unwrap().states[1].clone();
        let err = |h: f64| {
            let tr = pmme_volterra(&model, &q0, t_max, h).unwrap();
            tr.last().iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.02), err(0.01));
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        assert!(e2 < 1e-3);
        let tr = pmme_volterra(&model, &q0, 0.0, 0.1).unwrap();
        assert_eq!(tr.states, vec![q0.to_vec()]);
    }

    #[test]
    fn volterra_sharp_kernel_near_markov() {
        let model = PmmeModel::for_code(&three_qubit_code(), 1.0, 1.0, MemoryKernel::normalized_exponential(1e3).unwrap()).unwrap();
        let tr = pmme_volterra(&model, &[1.0, 0.0, 0.0, 0.0], 1.0, 2e-4).unwrap();
        let q = tr.last();
        assert!((q[0] + q[1] - fidelity_markov_3q(1.0, 1.0, 1.0)).abs() < 1e-2);
    }

    #[test]
    fn five_qubit_short_time_and_ordering() {
        let t: f64 = 1e-3;
        let f = pmme_5q(1.0, 1.0, 1.0, &[0.0, t]).unwrap();
        let coef = (1.0 - f[1]) / t.powi(3);
        assert!((coef - 30.0).abs() < 1.0, "coef {coef}");
        let tg: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        let fp = pmme_5q(1.0, 1.0, 1.0, &tg).unwrap();
        let mm = MarkovModel::for_code(five_qubit_code(), 1.0, 1.0).unwrap();
        let p = MarkovPropagator::new(&mm, BasisConvention::ErrorClass).unwrap();
        for (k, t) in tg.iter().enumerate().skip(1) {
            let q = p.propagate(&SystemState::no_error(16), *t).unwrap();
            let q = q.as_classes().unwrap();
            assert!(fp[k] > q[0] + q[1], "t {t}");
        }
    }
}
