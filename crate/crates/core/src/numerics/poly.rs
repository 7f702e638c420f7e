use super::{eigen::eigenvalues, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{CqecError, Result};

/// Evaluates a polynomial with real coefficients, highest degree first.
pub fn polynomial_eval(coeffs: &[f64], x: C64) -> C64 {
    coeffs.iter().fold(ZERO, |acc, &c| acc * x + c)
}

fn derivative_eval(coeffs: &[f64], x: C64) -> C64 {
    let deg = coeffs.len().saturating_sub(1);
    coeffs[..deg]
        .iter()
        .enumerate()
        .fold(ZERO, |acc, (i, &c)| acc * x + c * (deg - i) as f64)
}

/// All complex roots of a real polynomial given highest degree first.
/// Leading zeros are stripped. Roots come from the companion matrix and get
/// one Newton polish step when it lowers the residual.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(CqecError::Argument("polynomial_roots: non-finite coefficient".into()));
    }
    let start = coeffs
        .iter()
        .position(|&c| c != 0.0)
        .ok_or_else(|| CqecError::Argument("polynomial_roots: zero polynomial".into()))?;
    let p = &coeffs[start..];
    let deg = p.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[0];
    let mut comp = ComplexMatrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = C64::new(-p[j + 1] / lead, 0.0);
    }
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    let mut roots = eigenvalues(&comp)?;
    for r in roots.iter_mut() {
        let f = polynomial_eval(p, *r);
        let d = derivative_eval(p, *r);
        if d.norm() > 0.0 {
            let cand = *r - f / d;
            if polynomial_eval(p, cand).norm() < f.norm() {
                *r = cand;
            }
        }
    }
    Ok(roots)
}
