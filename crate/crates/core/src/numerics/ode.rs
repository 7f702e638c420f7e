use crate::error::{CqecError, Result};

/// Options for [`integrate_ivp_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-10, abs_tol: 1e-12, first_step: None, max_steps: 50_000_000 }
    }
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t_grid[0]` with `y(t_grid[0]) = y0` and
/// returns the solution at every grid time (first entry is `y0`).
pub fn integrate_ivp<F>(rhs: F, y0: &[f64], t_grid: &[f64], rel_tol: f64, abs_tol: f64) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let opts = OdeOptions { rel_tol, abs_tol, ..OdeOptions::default() };
    integrate_ivp_with(rhs, y0, t_grid, &opts)
}

pub fn integrate_ivp_with<F>(mut rhs: F, y0: &[f64], t_grid: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(CqecError::Argument("integrate_ivp: tolerances must be positive".into()));
    }
    if t_grid.is_empty() {
        return Err(CqecError::Argument("integrate_ivp: empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(CqecError::Argument("integrate_ivp: time grid must be strictly increasing".into()));
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.to_vec());
    if t_grid.len() == 1 {
        return Ok(out);
    }

    let mut y = y0.to_vec();
    let mut t = t_grid[0];
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    rhs(t, &y, &mut k[0]);

    let span = t_grid[t_grid.len() - 1] - t;
    let mut h = match opts.first_step {
        Some(h) if h > 0.0 => h,
        _ => initial_step(&y, &k[0], opts, span),
    };
    let mut steps = 0usize;
    let mut err_prev = 1e-4f64;

    for &t_target in &t_grid[1..] {
        while t < t_target {
            let remaining = t_target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h };
            if hs < 1e-14 * t.abs().max(1.0) && !last {
                return Err(CqecError::Integration { t_reached: t, reason: "step size underflow".into() });
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(CqecError::Integration { t_reached: t, reason: "maximum step count exceeded".into() });
            }

            stage(&y, hs, &[(A21, &k[0])], &mut tmp);
            rhs(t + C2 * hs, &tmp, &mut k[1]);
            stage(&y, hs, &[(A31, &k[0]), (A32, &k[1])], &mut tmp);
            rhs(t + C3 * hs, &tmp, &mut k[2]);
            stage(&y, hs, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])], &mut tmp);
            rhs(t + C4 * hs, &tmp, &mut k[3]);
            stage(&y, hs, &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])], &mut tmp);
            rhs(t + C5 * hs, &tmp, &mut k[4]);
            stage(&y, hs, &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])], &mut tmp);
            rhs(t + hs, &tmp, &mut k[5]);
            stage(&y, hs, &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])], &mut ynew);
            let t_new = if last { t_target } else { t + hs };
            rhs(t_new, &ynew, &mut k[6]);

            let mut acc = 0.0;
            for i in 0..n {
                let e = hs
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
                acc += (e / sc).powi(2);
            }
            let err = if n == 0 { 0.0 } else { (acc / n as f64).sqrt() };
            if !err.is_finite() {
                return Err(CqecError::Integration { t_reached: t, reason: "non-finite derivative".into() });
            }

            if err <= 1.0 {
                t = t_new;
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                // PI step-size controller
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0)).clamp(0.2, 5.0)
                };
                err_prev = err.max(1e-4);
                if !last {
                    h = hs * fac;
                }
            } else {
                h = hs * (0.9 * err.powf(-0.2)).max(0.2);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(CqecError::Integration { t_reached: t, reason: "step size underflow".into() });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn stage(y: &[f64], h: f64, terms: &[(f64, &Vec<f64>)], out: &mut [f64]) {
    out.copy_from_slice(y);
    for (a, k) in terms {
        let ha = h * a;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ha * ki;
        }
    }
}

fn initial_step(y: &[f64], f0: &[f64], opts: &OdeOptions, span: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.abs_tol + opts.rel_tol * yi.abs();
        d0 += (yi / sc).powi(2);
        d1 += (fi / sc).powi(2);
    }
    let n = y.len().max(1) as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.abs()).max(1e-12 * span.abs())
}
