//! Direct time-domain solution of the memory-kernel equation
//! q' = L0 q + L1 ∫₀ᵗ k(s) e^{(L0+L1)s} q(t−s) ds
//! by the composite trapezoid rule on a uniform grid.

use super::PmmeModel;
use crate::error::{CqecError, Result};
use crate::numerics::{matrix_exponential, to_real};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl VolterraTrajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }
}

/// Implicit trapezoid steps for both the derivative and the convolution.
/// Stores the full history; cost is O(N² d²) for N steps. Second order in h.
pub fn pmme_volterra(model: &PmmeModel, q0: &[f64], t_max: f64, h: f64) -> Result<VolterraTrajectory> {
    if !(h > 0.0) || !(t_max >= 0.0) {
        return Err(CqecError::Argument(format!("volterra needs h > 0 and t_max >= 0 (h={h}, t_max={t_max})")));
    }
    let d = model.dim();
    if q0.len() != d {
        return Err(CqecError::Dimension(format!("initial vector of length {} for dimension {d}", q0.len())));
    }
    let steps = (t_max / h).round() as usize;
    if (steps as f64 * h - t_max).abs() > 1e-9 * t_max.max(1.0) {
        return Err(CqecError::Argument("t_max must be an integer multiple of h".into()));
    }
    if steps > 100_000 {
        return Err(CqecError::Argument(format!("{steps} steps exceed the 1e5 history limit")));
    }
    let l0 = to_real(&model.l0.matrix, 1e-12)?;
    let l1 = to_real(&model.l1.matrix, 1e-12)?;
    let a = &model.l0.matrix + &model.l1.matrix;
    let e = to_real(&matrix_exponential(&a, h)?, 1e-10)?;
    // L1 K_j = k(jh) L1 E^j
    let mut lk: Vec<DMatrix<f64>> = Vec::with_capacity(steps + 1);
    let mut ej = DMatrix::<f64>::identity(d, d);
    for j in 0..=steps {
        let kj = model.kernel.eval(j as f64 * h)?;
        lk.push(&l1 * &ej * kj);
        ej = &ej * &e;
    }
    let q_init = DVector::from_column_slice(q0);
    let lhs = DMatrix::<f64>::identity(d, d) - (&l0 + &lk[0] * (h / 2.0)) * (h / 2.0);
    let lu = lhs.lu();
    let mut qs: Vec<DVector<f64>> = vec![q_init.clone()];
    let mut f = &l0 * &q_init; // convolution vanishes at t = 0
    for n in 0..steps {
        // r = h [Σ_{j=1}^{n} L1K_j q_{n+1−j} + ½ L1K_{n+1} q_0]
        let mut r = &lk[n + 1] * &qs[0] * 0.5;
        for j in 1..=n {
            r += &lk[j] * &qs[n + 1 - j];
        }
        r *= h;
        let rhs = &qs[n] + &f * (h / 2.0) + &r * (h / 2.0);
        let q_next = lu.solve(&rhs).ok_or_else(|| CqecError::Numerical("singular trapezoid system".into()))?;
        f = &l0 * &q_next + &lk[0] * &q_next * (h / 2.0) + r;
        qs.push(q_next);
    }
    Ok(VolterraTrajectory {
        times: (0..=steps).map(|k| k as f64 * h).collect(),
        states: qs.into_iter().map(|v| v.iter().copied().collect()).collect(),
    })
}
