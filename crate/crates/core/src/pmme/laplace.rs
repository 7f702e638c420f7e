//! Rational functions in s and their inverse Laplace transforms by residues.
//! Coefficients are stored highest degree first.

use crate::error::{CqecError, Result};
use crate::numerics::{polynomial_eval, polynomial_roots, C64};

fn trim(p: &[f64]) -> Vec<f64> {
    let first = p.iter().position(|&x| x != 0.0).unwrap_or(p.len().saturating_sub(1));
    if p.is_empty() {
        vec![0.0]
    } else {
        p[first..].to_vec()
    }
}

pub fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    trim(&out)
}

pub fn poly_add(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    let mut out = vec![0.0; n];
    for (i, a) in p.iter().enumerate() {
        out[n - p.len() + i] += a;
    }
    for (i, b) in q.iter().enumerate() {
        out[n - q.len() + i] += b;
    }
    trim(&out)
}

pub fn poly_scale(p: &[f64], k: f64) -> Vec<f64> {
    trim(&p.iter().map(|x| x * k).collect::<Vec<_>>())
}

/// p(s + a).
pub fn poly_shift(p: &[f64], a: f64) -> Vec<f64> {
    // Horner in polynomial arithmetic
    let mut out = vec![0.0];
    for &c in p {
        out = poly_add(&poly_mul(&out, &[1.0, a]), &[c]);
    }
    out
}

pub fn poly_derivative(p: &[f64]) -> Vec<f64> {
    let deg = p.len() - 1;
    if deg == 0 {
        return vec![0.0];
    }
    trim(&p[..deg].iter().enumerate().map(|(i, c)| c * (deg - i) as f64).collect::<Vec<_>>())
}

/// N(s)/D(s).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl RationalFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let den = trim(&den);
        if den.iter().all(|&x| x == 0.0) {
            return Err(CqecError::Argument("rational function with zero denominator".into()));
        }
        Ok(RationalFunction { num: trim(&num), den })
    }

    pub fn constant(c: f64) -> Self {
        RationalFunction { num: vec![c], den: vec![1.0] }
    }

    pub fn eval(&self, s: C64) -> C64 {
        polynomial_eval(&self.num, s) / polynomial_eval(&self.den, s)
    }

    pub fn is_strictly_proper(&self) -> bool {
        (self.num.len() == 1 && self.num[0] == 0.0) || self.num.len() < self.den.len()
    }

    pub fn poles(&self) -> Result<Vec<C64>> {
        polynomial_roots(&self.den)
    }

    /// Residues at the poles, assuming all poles are simple.
    pub fn residues(&self) -> Result<Vec<(C64, C64)>> {
        if !self.is_strictly_proper() {
            return Err(CqecError::Argument("inverse Laplace transform needs a strictly proper function".into()));
        }
        let poles = self.poles()?;
        let scale = poles.iter().map(|p| p.norm()).fold(1.0, f64::max);
        for i in 0..poles.len() {
            for j in 0..i {
                if (poles[i] - poles[j]).norm() < 1e-6 * scale {
                    return Err(CqecError::Numerical(format!(
                        "repeated pole near {} (residue inversion needs simple poles)",
                        poles[i]
                    )));
                }
            }
        }
        let dd = poly_derivative(&self.den);
        Ok(poles.into_iter().map(|p| (p, polynomial_eval(&self.num, p) / polynomial_eval(&dd, p))).collect())
    }

    /// f(t) = Σ residue · e^{pole·t}.
    pub fn inverse_laplace(&self, t: f64) -> Result<f64> {
        Ok(self.residues()?.iter().map(|(p, r)| (r * (p * t).exp()).re).sum())
    }

    pub fn inverse_laplace_grid(&self, times: &[f64]) -> Result<Vec<f64>> {
        let res = self.residues()?;
        Ok(times.iter().map(|&t| res.iter().map(|(p, r)| (r * (p * t).exp()).re).sum()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_helpers() {
        assert_eq!(poly_mul(&[1.0, 1.0], &[1.0, -1.0]), vec![1.0, 0.0, -1.0]);
        assert_eq!(poly_add(&[1.0, 0.0, 0.0], &[2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(poly_add(&[1.0, 2.0], &[-1.0, 0.0]), vec![2.0]);
        // (s+1)^2 shifted by 2 → (s+3)^2
        assert_eq!(poly_shift(&[1.0, 2.0, 1.0], 2.0), vec![1.0, 6.0, 9.0]);
        assert_eq!(poly_derivative(&[1.0, 6.0, 9.0]), vec![2.0, 6.0]);
    }

    #[test]
    fn simple_inversions() {
        // 1/(s+2) → e^{-2t}
        let f = RationalFunction::new(vec![1.0], vec![1.0, 2.0]).unwrap();
        assert!((f.inverse_laplace(0.7).unwrap() - (-1.4f64).exp()).abs() < 1e-14);
        // 1/(s^2+1) → sin t
        let f = RationalFunction::new(vec![1.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert!((f.inverse_laplace(1.3).unwrap() - 1.3f64.sin()).abs() < 1e-13);
        // 1/(s(s+1)) → 1 − e^{-t}
        let f = RationalFunction::new(vec![1.0], vec![1.0, 1.0, 0.0]).unwrap();
        assert!((f.inverse_laplace(2.0).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn inversion_errors() {
        let f = RationalFunction::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(f.inverse_laplace(1.0).is_err());
        let f = RationalFunction::new(vec![1.0], vec![1.0, 2.0, 1.0]).unwrap();
        assert!(matches!(f.inverse_laplace(1.0), Err(CqecError::Numerical(_))));
        assert!(RationalFunction::new(vec![1.0], vec![0.0]).is_err());
    }
}
