//! Fidelities, trace distance, the trace-distance non-Markovianity measure,
//! short-time power-law fits and long-time infidelities.

use crate::error::{CqecError, Result};
use crate::numerics::{eigenvalues, matrix_exponential, singular_values, ComplexMatrix, ComplexVector, C64};
use crate::operators::DensityMatrix;
use crate::pmme::MemoryKernel;
use crate::pmme::{poly_add, poly_mul, poly_scale, poly_shift};
use crate::xxbath::{build_xx_superoperator, initial_vector_1q, reduced_bloch, XXModel, XXSuperoperator};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Fidelity samples on an increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub model: String,
}

impl FidelityTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, model: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(CqecError::Dimension(format!("{} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CqecError::Argument("times must be strictly increasing".into()));
        }
        Ok(FidelityTrace { times, values, model: model.into() })
    }

    pub fn from_fn(times: Vec<f64>, model: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values, model)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Tr{(P ⊗ I_bath) ρ}. `reference` is a projector or density matrix on the
/// leading qubits of `rho`; any trailing qubits are traced out.
pub fn fidelity_overlap(rho: &DensityMatrix, reference: &ComplexMatrix) -> Result<f64> {
    let (d, r) = (rho.dim(), reference.nrows());
    if reference.ncols() != r || r == 0 || d % r != 0 {
        return Err(CqecError::Dimension(format!("reference of size {r}x{} against state of size {d}", reference.ncols())));
    }
    let bath = d / r;
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            let p = reference[(i, j)];
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            // Tr(P ρ_S) = Σ P_ij (ρ_S)_ji, (ρ_S)_ji = Σ_b ρ_{jb, ib}
            for b in 0..bath {
                acc += p * m[(j * bath + b, i * bath + b)];
            }
        }
    }
    Ok(acc.re)
}

pub fn fidelity_with_state(rho: &DensityMatrix, reference: &DensityMatrix) -> Result<f64> {
    fidelity_overlap(rho, reference.matrix())
}

/// ½ Σ singular values of ρ₁ − ρ₂.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CqecError::Dimension(format!("trace distance between sizes {} and {}", a.dim(), b.dim())));
    }
    Ok(0.5 * singular_values(&(a.matrix() - b.matrix())).iter().sum::<f64>())
}

/// One-qubit trace distance from Bloch vectors.
pub fn bloch_trace_distance(r1: [f64; 3], r2: [f64; 3]) -> f64 {
    0.5 * ((r1[0] - r2[0]).powi(2) + (r1[1] - r2[1]).powi(2) + (r1[2] - r2[2]).powi(2)).sqrt()
}

/// Closed-form measure for the one-qubit X-X model. Infinite for κ = η = 0.
pub fn nonmarkovianity_closed(alpha: f64, kappa: f64, eta: f64) -> f64 {
    let om2 = 64.0 * alpha * alpha - kappa * kappa;
    if om2 <= 0.0 {
        return 0.0;
    }
    let x = (kappa + 4.0 * eta) * std::f64::consts::PI / om2.sqrt();
    1.0 / x.exp_m1()
}

/// Exact measure of the Δx = 0 pair family. The revival peaks of |C| sit a
/// phase θ/w past the zeros assumed by the closed form, which rescales every
/// peak by the same factor.
pub fn nonmarkovianity_family_exact(alpha: f64, kappa: f64, eta: f64) -> f64 {
    let om2 = 64.0 * alpha * alpha - kappa * kappa;
    if om2 <= 0.0 {
        return 0.0;
    }
    let w = om2.sqrt() / 4.0;
    let mu = eta + kappa / 4.0;
    let theta = (eta * w).atan2(eta * kappa / 4.0 + 4.0 * alpha * alpha);
    let k = (mu * theta / w).exp() * (theta.cos() - kappa / (4.0 * w) * theta.sin());
    k * nonmarkovianity_closed(alpha, kappa, eta)
}

/// Outcome of the random-pair sanity check.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPairCheck {
    pub pairs: usize,
    pub seed: u64,
    /// Largest pair measure divided by the family value.
    pub max_ratio: f64,
    /// Set when some pair beats the family by more than 1%.
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    pub value: f64,
    pub step: f64,
    pub t_max: f64,
    /// Time at which summation stopped.
    pub t_reached: f64,
    pub family: String,
    pub revivals: usize,
    /// Undamped oscillation in the generator: the measure diverges with t_max.
    pub unbounded: bool,
    pub warning: Option<String>,
    pub random_check: Option<RandomPairCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub t_max: f64,
    pub step: f64,
    pub random_pairs: usize,
    pub seed: u64,
    /// Stop once a completed revival adds less than this fraction of the total.
    pub truncation: f64,
}

impl MeasureOptions {
    pub fn new(t_max: f64, step: f64) -> Self {
        MeasureOptions { t_max, step, random_pairs: 200, seed: 0x5eed, truncation: 1e-6 }
    }
}

/// Oscillation period of C(t), if any.
pub fn xx_period(alpha: f64, kappa: f64) -> Option<f64> {
    let om2 = 64.0 * alpha * alpha - kappa * kappa;
    (om2 > 0.0).then(|| 8.0 * std::f64::consts::PI / om2.sqrt())
}

struct Revivals {
    total: f64,
    count: usize,
    current: f64,
    stop: bool,
}

impl Revivals {
    fn new() -> Self {
        Revivals { total: 0.0, count: 0, current: 0.0, stop: false }
    }

    fn push(&mut self, inc: f64, floor: f64, truncation: f64) {
        if inc > floor {
            self.current += inc;
            self.total += inc;
        } else if self.current > 0.0 {
            self.count += 1;
            if self.current < truncation * self.total {
                self.stop = true;
            }
            self.current = 0.0;
        }
    }
}

fn apply_map(m: &[[f64; 3]; 3], dr: [f64; 3]) -> [f64; 3] {
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = (0..3).map(|j| m[i][j] * dr[j]).sum();
    }
    v
}

fn half_norm(v: [f64; 3]) -> f64 {
    0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Rise of ½|v| over one step, taking v linear in between. ½|v| is convex on
/// the segment, so the rise is the end value minus the segment minimum; this
/// keeps zero crossings exact instead of clipping them at the grid.
fn segment_rise(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let s = if dd > 0.0 { (-(a[0] * d[0] + a[1] * d[1] + a[2] * d[2]) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let lo = half_norm([a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]]);
    half_norm(b) - lo
}

/// Sum of rises of ½|M(t)Δr| along precomputed 3×3 maps.
fn pair_measure(maps: &[[[f64; 3]; 3]], dr: [f64; 3], floor: f64) -> f64 {
    let mut prev = apply_map(&maps[0], dr);
    let mut acc = 0.0;
    for m in &maps[1..] {
        let v = apply_map(m, dr);
        let rise = segment_rise(prev, v);
        if rise > floor {
            acc += rise;
        }
        prev = v;
    }
    acc
}

fn random_ball(rng: &mut StdRng) -> [f64; 3] {
    loop {
        let v = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        if v.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

pub fn nonmarkovianity_numeric(model: &XXModel, t_max: f64, step: f64) -> Result<MeasureEstimate> {
    nonmarkovianity_numeric_with(model, &MeasureOptions::new(t_max, step))
}

/// Evolves the antipodal pair (0, ±1, 0) under the exact 16×16 generator with a
/// fixed-step propagator and sums the increases of the trace distance.
pub fn nonmarkovianity_numeric_with(model: &XXModel, opts: &MeasureOptions) -> Result<MeasureEstimate> {
    if model.n != 1 {
        return Err(CqecError::Argument("the measure is defined for the one-qubit X-X model".into()));
    }
    if !(opts.step > 0.0) || !(opts.t_max > 0.0) {
        return Err(CqecError::Argument("t_max and step must be positive".into()));
    }
    let gen = match build_xx_superoperator(model)? {
        XXSuperoperator::Pauli(s) => s.matrix,
        XXSuperoperator::Sparse(_) => unreachable!("one-qubit model is dense"),
    };
    let scale = crate::numerics::norm1(&gen).max(1.0);
    let unbounded = eigenvalues(&gen)?.iter().any(|l| l.re.abs() < 1e-10 * scale && l.im.abs() > 1e-10 * scale);
    let prop = matrix_exponential(&gen, opts.step)?;
    let steps = (opts.t_max / opts.step).ceil() as usize;

    // columns of the reduced 3×3 map from each Bloch axis
    let mut cols: Vec<ComplexVector> = (0..3)
        .map(|a| {
            let mut r = [0.0; 3];
            r[a] = 1.0;
            initial_vector_1q(r) - initial_vector_1q([0.0; 3])
        })
        .collect();
    let snapshot = |cols: &[ComplexVector]| {
        let b: Vec<[f64; 3]> = cols.iter().map(reduced_bloch).collect();
        let mut m = [[0.0; 3]; 3];
        for (j, bj) in b.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = bj[i];
            }
        }
        m
    };
    let mut maps = vec![snapshot(&cols)];
    let floor = 1e-14;
    let family = [0.0, 2.0, 0.0];
    let mut rev = Revivals::new();
    let mut prev = apply_map(&maps[0], family);
    let mut t_reached = 0.0;
    for k in 1..=steps {
        for c in cols.iter_mut() {
            *c = &prop * &*c;
        }
        let m = snapshot(&cols);
        let v = apply_map(&m, family);
        rev.push(segment_rise(prev, v), floor, opts.truncation);
        prev = v;
        maps.push(m);
        t_reached = k as f64 * opts.step;
        if rev.stop && !unbounded {
            break;
        }
    }
    if rev.current > 0.0 {
        rev.count += 1;
    }
    let warning = xx_period(model.alpha, model.kappa).and_then(|p| {
        (opts.step > p / 50.0).then(|| format!("step {} gives fewer than 50 points per period {p:.6}", opts.step))
    });
    let random_check = if opts.random_pairs > 0 {
        let mut rng = StdRng::seed_from_u64(opts.seed);
        let mut best: f64 = 0.0;
        for _ in 0..opts.random_pairs {
            let (a, b) = (random_ball(&mut rng), random_ball(&mut rng));
            best = best.max(pair_measure(&maps, [a[0] - b[0], a[1] - b[1], a[2] - b[2]], floor));
        }
        let max_ratio = if rev.total > 0.0 {
            best / rev.total
        } else if best > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        Some(RandomPairCheck { pairs: opts.random_pairs, seed: opts.seed, max_ratio, exceeded: max_ratio > 1.01 })
    } else {
        None
    };
    Ok(MeasureEstimate {
        value: rev.total,
        step: opts.step,
        t_max: opts.t_max,
        t_reached,
        family: "antipodal Δx=0 pair (0,±1,0)".into(),
        revivals: rev.count,
        unbounded,
        warning,
        random_check,
    })
}

/// Leading power and coefficient of 1 − F(t) ≈ κ_p t^p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeFit {
    pub order: usize,
    /// Coefficient of t^p in 1 − F; positive for decaying fidelity.
    pub coefficient: f64,
    /// Raw log-log slope.
    pub slope: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log regression for the power, then a two-term least-squares fit
/// κ_p t^p + κ_{p+1} t^{p+1} for the coefficient.
pub fn short_time_fit(trace: &FidelityTrace, max_order: usize) -> Result<ShortTimeFit> {
    if trace.len() < 20 {
        return Err(CqecError::FitUnreliable(format!("need at least 20 samples, got {}", trace.len())));
    }
    if max_order == 0 {
        return Err(CqecError::Argument("max_order must be at least 1".into()));
    }
    let pts: Vec<(f64, f64)> = trace.times.iter().zip(&trace.values).filter(|(t, _)| **t > 0.0).map(|(t, f)| (*t, 1.0 - f)).collect();
    let sign = pts[0].1.signum();
    if sign == 0.0 || pts.iter().any(|(_, y)| y.signum() != sign) {
        return Err(CqecError::FitUnreliable("1 − F changes sign or vanishes in the window".into()));
    }
    if pts.windows(2).any(|w| !(w[1].1.abs() > w[0].1.abs())) {
        return Err(CqecError::FitUnreliable("1 − F is not monotone in the window".into()));
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.abs().ln()).collect();
    let (slope, _) = least_squares(&lx, &ly);
    let p = slope.round();
    if p < 1.0 || p > max_order as f64 || (slope - p).abs() > 0.25 {
        return Err(CqecError::FitUnreliable(format!("log-log slope {slope:.4} has no dominant integer power ≤ {max_order}")));
    }
    let p = p as usize;
    // normal equations for y = a t^p + b t^{p+1}
    let (mut s00, mut s01, mut s11, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let tau = pts.last().unwrap().0;
    for &(t, y) in &pts {
        // scaled basis keeps the system well conditioned
        let u = t / tau;
        let (f0, f1) = (u.powi(p as i32), u.powi(p as i32 + 1));
        s00 += f0 * f0;
        s01 += f0 * f1;
        s11 += f1 * f1;
        r0 += f0 * y;
        r1 += f1 * y;
    }
    let det = s00 * s11 - s01 * s01;
    if !(det.abs() > 1e-300) {
        return Err(CqecError::FitUnreliable("degenerate fit window".into()));
    }
    let a = (r0 * s11 - r1 * s01) / det;
    Ok(ShortTimeFit { order: p, coefficient: a / tau.powi(p as i32), slope })
}

/// One-qubit models with a known long-time fidelity.
#[derive(Debug, Clone, PartialEq)]
pub enum AsymptoticModel {
    Markov { gamma: f64, eta: f64 },
    XX { alpha: f64, kappa: f64, eta: f64 },
    PmmeExponential { a: f64, c: f64, gamma: f64, eta: f64 },
    /// Any rational kernel, by the final-value theorem.
    Pmme { kernel: MemoryKernel, gamma: f64, eta: f64 },
}

/// Long-time 1 − F.
pub fn asymptotic_infidelity(model: &AsymptoticModel) -> Result<f64> {
    let checked = |num: f64, den: f64| {
        if den == 0.0 || !den.is_finite() {
            Err(CqecError::Argument("long-time fidelity undefined at these rates".into()))
        } else {
            Ok(num / den)
        }
    };
    match *model {
        AsymptoticModel::Markov { gamma, eta } => checked(gamma, 2.0 * gamma + eta),
        AsymptoticModel::XX { alpha, kappa, eta } => {
            checked(4.0 * alpha * alpha, eta * (kappa + 2.0 * eta) + 8.0 * alpha * alpha)
        }
        AsymptoticModel::PmmeExponential { a, c, gamma, eta } => {
            checked(a * gamma * (c + eta), c * (2.0 * a * gamma + eta * (2.0 * gamma + c + eta)))
        }
        AsymptoticModel::Pmme { ref kernel, gamma, eta } => {
            if kernel.is_delta() {
                return checked(gamma, 2.0 * gamma + eta);
            }
            // F = (1+ξ)/2 + χ; ξ → 0 and χ → lim s χ̃(s)
            let (n, d) = (&kernel.laplace.num, &kernel.laplace.den);
            let u = 2.0 * gamma + eta;
            let (du, nu) = (poly_shift(d, u), poly_shift(n, u));
            let p = poly_add(&poly_mul(&[1.0, eta], &du), &poly_scale(&nu, 2.0 * gamma));
            let g = if gamma + eta > 0.0 { gamma * eta / u } else { 0.0 };
            let cross = poly_add(&poly_mul(&nu, d), &poly_scale(&poly_mul(n, &du), -1.0));
            let num = poly_add(&poly_scale(&poly_mul(&du, d), eta), &poly_scale(&cross, 2.0 * g));
            let at0 = |q: &[f64]| *q.last().unwrap();
            let den = 2.0 * at0(&p) * at0(d);
            let chi_inf = checked(at0(&num), den)?;
            Ok(0.5 - chi_inf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::fidelity_markov_1q;
    use crate::pmme::{fidelity_pmme_1q, pmme_5q};
    use crate::xxbath::fidelity_xx_1q;

    #[test]
    fn overlap_and_distance_basics() {
        let zero = DensityMatrix::basis_state(1, 0);
        let one = DensityMatrix::basis_state(1, 1);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((fidelity_with_state(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity_with_state(&mixed, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        // system ⊗ bath: bath traced out
        let joint = zero.kron(&mixed);
        assert!((fidelity_with_state(&joint, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity_overlap(&DensityMatrix::basis_state(3, 0), &ComplexMatrix::identity(3, 3)).is_err());
        assert!(trace_distance(&zero, &joint).is_err());
    }

    #[test]
    fn bloch_distance_matches_matrix() {
        let (r1, r2) = ([0.3, -0.2, 0.5], [-0.1, 0.6, 0.2]);
        let a = DensityMatrix::from_bloch(r1[0], r1[1], r1[2]).unwrap();
        let b = DensityMatrix::from_bloch(r2[0], r2[1], r2[2]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - bloch_trace_distance(r1, r2)).abs() < 1e-12);
    }

    #[test]
    fn closed_measure_limits() {
        assert_eq!(nonmarkovianity_closed(1.0, 8.0, 0.3), 0.0);
        assert_eq!(nonmarkovianity_closed(1.0, 12.0, 0.3), 0.0);
        let k0 = nonmarkovianity_closed(1.0, 0.0, 1.0);
        assert!((k0 - 1.0 / ((std::f64::consts::PI / 2.0).exp() - 1.0)).abs() < 1e-14);
        let big = nonmarkovianity_closed(1.0, 0.0, 20.0);
        assert!((big / (-20.0 * std::f64::consts::PI / 2.0).exp() - 1.0).abs() < 1e-10);
        assert!(nonmarkovianity_closed(1.0, 0.0, 0.0).is_infinite());
        assert_eq!(nonmarkovianity_family_exact(1.0, 0.5, 0.0), nonmarkovianity_closed(1.0, 0.5, 0.0));
    }

    #[test]
    fn numeric_measure_matches_exact_family() {
        for (k, e) in [(1.0, 0.5), (0.0, 1.0), (2.0, 0.0), (4.0, 0.3)] {
            let m = XXModel::one_qubit(1.0, k, e).unwrap();
            let period = xx_period(1.0, k).unwrap();
            let est = nonmarkovianity_numeric(&m, 20.0 * period, period / 2000.0).unwrap();
            let exact = nonmarkovianity_family_exact(1.0, k, e);
            assert!(est.warning.is_none());
            assert!(!est.unbounded);
            assert!((est.value / exact - 1.0).abs() < 1e-4, "κ {k} η {e}: {} vs {exact}", est.value);
            let rc = est.random_check.unwrap();
            assert!(!rc.exceeded, "ratio {}", rc.max_ratio);
        }
    }

    #[test]
    fn numeric_measure_regimes() {
        let m = XXModel::one_qubit(1.0, 12.0, 0.5).unwrap();
        let est = nonmarkovianity_numeric(&m, 20.0, 0.01).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.revivals, 0);
        let free = XXModel::one_qubit(1.0, 0.0, 0.0).unwrap();
        let a = nonmarkovianity_numeric(&free, 10.0, 0.005).unwrap();
        let b = nonmarkovianity_numeric(&free, 20.0, 0.005).unwrap();
        assert!(a.unbounded && b.unbounded);
        assert!((b.value / a.value - 2.0).abs() < 0.15);
        let coarse = nonmarkovianity_numeric(&XXModel::one_qubit(1.0, 1.0, 0.5).unwrap(), 10.0, 0.1).unwrap();
        assert!(coarse.warning.is_some());
    }

    #[test]
    fn planted_power_laws() {
        let times: Vec<f64> = (0..=40).map(|k| 1e-3 * k as f64).collect();
        for (p, c) in [(1usize, 0.7), (2, 3.0), (3, 30.0)] {
            let tr = FidelityTrace::from_fn(times.clone(), "planted", |t| 1.0 - c * t.powi(p as i32) + 5.0 * c * t.powi(p as i32 + 1)).unwrap();
            let fit = short_time_fit(&tr, 4).unwrap();
            assert_eq!(fit.order, p);
            assert!((fit.coefficient / c - 1.0).abs() < 1e-2);
        }
        let tr = FidelityTrace::from_fn(times.clone(), "rising", |t| 1.0 + 2.0 * t * t).unwrap();
        let fit = short_time_fit(&tr, 3).unwrap();
        assert_eq!(fit.order, 2);
        assert!((fit.coefficient + 2.0).abs() < 1e-6);
        let wobble = FidelityTrace::from_fn(times.clone(), "wobble", |t| 1.0 - t * (1.0 + (900.0 * t).sin())).unwrap();
        assert!(matches!(short_time_fit(&wobble, 3), Err(CqecError::FitUnreliable(_))));
        let short = FidelityTrace::from_fn(times[..10].to_vec(), "short", |t| 1.0 - t).unwrap();
        assert!(short_time_fit(&short, 3).is_err());
    }

    #[test]
    fn model_short_time_orders() {
        let times: Vec<f64> = (0..=40).map(|k| 2.5e-5 * k as f64).collect();
        let m = FidelityTrace::from_fn(times.clone(), "markov", |t| fidelity_markov_1q(1.0, 1.0, t)).unwrap();
        let f = short_time_fit(&m, 3).unwrap();
        assert_eq!(f.order, 1);
        assert!((f.coefficient - 1.0).abs() < 0.02);
        let x = FidelityTrace::from_fn(times.clone(), "xx", |t| fidelity_xx_1q(1.0, 1.0, 1.0, t)).unwrap();
        let f = short_time_fit(&x, 3).unwrap();
        assert_eq!(f.order, 2);
        assert!((f.coefficient - 1.0).abs() < 0.02);
        let k = MemoryKernel::exponential(1.0, 1.0).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| 1e-3 * k as f64).collect();
        let vals: Vec<f64> = times.iter().map(|&t| fidelity_pmme_1q(&k, 1.0, 1.0, t).unwrap()).collect();
        let f = short_time_fit(&FidelityTrace::new(times.clone(), vals, "pmme").unwrap(), 3).unwrap();
        assert_eq!(f.order, 2);
        assert!((f.coefficient - 0.5).abs() < 0.01);
        let times: Vec<f64> = (0..=40).map(|k| 5e-5 * k as f64).collect();
        let v5 = pmme_5q(1.0, 1.0, 1.0, &times).unwrap();
        let f = short_time_fit(&FidelityTrace::new(times, v5, "pmme5").unwrap(), 4).unwrap();
        assert_eq!(f.order, 3);
        assert!((f.coefficient / 30.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn asymptotes() {
        let m = AsymptoticModel::Markov { gamma: 1.0, eta: 0.0 };
        assert_eq!(asymptotic_infidelity(&m).unwrap(), 0.5);
        for eta in [10.0, 100.0] {
            let v = asymptotic_infidelity(&AsymptoticModel::XX { alpha: 1.0, kappa: 1.0, eta }).unwrap();
            let series = 2.0 / (eta * eta) - 1.0 / eta.powi(3);
            assert!((v - series).abs() < 10.0 / eta.powi(4));
            assert!((1.0 - fidelity_xx_1q(1.0, 1.0, eta, 200.0) - v).abs() < 1e-12);
        }
        let (a, c, g, e) = (1.0, 2.0, 1.0, 1000.0);
        let v = asymptotic_infidelity(&AsymptoticModel::PmmeExponential { a, c, gamma: g, eta: e }).unwrap();
        assert!((v / ((a / c) * (g / e)) - 1.0).abs() < 1e-2);
        // final-value route agrees with the closed form and with long-time evolution
        let k = MemoryKernel::exponential(0.7, 1.3).unwrap();
        let fv = asymptotic_infidelity(&AsymptoticModel::Pmme { kernel: k.clone(), gamma: 1.0, eta: 2.0 }).unwrap();
        let cf = asymptotic_infidelity(&AsymptoticModel::PmmeExponential { a: 0.7, c: 1.3, gamma: 1.0, eta: 2.0 }).unwrap();
        assert!((fv - cf).abs() < 1e-14);
        let d = MemoryKernel::damped(1.0, 1.0, 1.0).unwrap();
        let fv = asymptotic_infidelity(&AsymptoticModel::Pmme { kernel: d.clone(), gamma: 1.0, eta: 2.0 }).unwrap();
        assert!((1.0 - fidelity_pmme_1q(&d, 1.0, 2.0, 60.0).unwrap() - fv).abs() < 1e-10);
        assert!(asymptotic_infidelity(&AsymptoticModel::Markov { gamma: 0.0, eta: 0.0 }).is_err());
    }
}
