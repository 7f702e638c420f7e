use super::{norm1, require_finite, require_square, ComplexMatrix, C64};
use crate::error::{CqecError, Result};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0,
    3960.0, 90.0, 1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0, 1323241920.0,
    40840800.0, 960960.0, 16380.0, 182.0, 1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

/// `exp(A·t)` by Padé scaling and squaring (degrees 3 to 13, Higham 2005).
pub fn matrix_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    require_square(a, "matrix_exponential")?;
    require_finite(a, "matrix_exponential")?;
    if !t.is_finite() {
        return Err(CqecError::Argument("matrix_exponential: non-finite t".into()));
    }
    let n = a.nrows();
    let at = a * C64::new(t, 0.0);
    let nrm = norm1(&at);
    let id = ComplexMatrix::identity(n, n);
    if nrm == 0.0 {
        return Ok(id);
    }
    for (m, theta) in THETA {
        if nrm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(&at, b, &id);
        }
    }
    let s = ((nrm / THETA13).log2().ceil()).max(0.0) as i32;
    let scaled = at * C64::new(2f64.powi(-s), 0.0);
    let mut r = pade13(&scaled, &id)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn solve_pade(u: ComplexMatrix, v: ComplexMatrix) -> Result<ComplexMatrix> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| CqecError::Numerical("Padé denominator is singular".into()))
}

fn pade_low(a: &ComplexMatrix, b: &[f64], id: &ComplexMatrix) -> Result<ComplexMatrix> {
    let a2 = a * a;
    let mut pow = id.clone();
    let mut u_inner = id * C64::new(b[1], 0.0);
    let mut v = id * C64::new(b[0], 0.0);
    let m = b.len() - 1;
    for k in 1..=m / 2 {
        pow = &pow * &a2;
        v += &pow * C64::new(b[2 * k], 0.0);
        u_inner += &pow * C64::new(b[2 * k + 1], 0.0);
    }
    let u = a * u_inner;
    solve_pade(u, v)
}

fn pade13(a: &ComplexMatrix, id: &ComplexMatrix) -> Result<ComplexMatrix> {
    let c = |x: f64| C64::new(x, 0.0);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * c(B13[13]) + &a4 * c(B13[11]) + &a2 * c(B13[9]));
    let u = a * (inner_u + &a6 * c(B13[7]) + &a4 * c(B13[5]) + &a2 * c(B13[3]) + id * c(B13[1]));
    let inner_v = &a6 * (&a6 * c(B13[12]) + &a4 * c(B13[10]) + &a2 * c(B13[8]));
    let v = inner_v + &a6 * c(B13[6]) + &a4 * c(B13[4]) + &a2 * c(B13[2]) + id * c(B13[0]);
    solve_pade(u, v)
}

#[cfg(test)]
mod tests {
    use super::super::{max_abs_diff, real_matrix};
    use super::*;

    #[test]
    fn zero_gives_identity() {
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(matrix_exponential(&z, 1.0).unwrap(), ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn nilpotent_closed_form() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        for t in [0.1, 1.0, 37.5] {
            let e = matrix_exponential(&a, t).unwrap();
            let want = real_matrix(2, 2, &[1.0, t, 0.0, 1.0]);
            assert!(max_abs_diff(&e, &want) < 1e-12 * t.max(1.0));
        }
    }

    #[test]
    fn scalar_all_degrees() {
        for x in [1e-3, 0.1, 0.5, 1.5, 4.0, 30.0, -30.0] {
            let a = real_matrix(1, 1, &[x]);
            let e = matrix_exponential(&a, 1.0).unwrap()[(0, 0)];
            assert!((e.re - x.exp()).abs() <= 1e-13 * x.exp(), "{x}");
        }
    }

    #[test]
    fn one_qubit_markov_diagonal_decay() {
        let (g, e) = (1.0, 1.0);
        let mp = real_matrix(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 0.0,
                0.0, -e, 0.0, 0.0,
                0.0, 0.0, -(2.0 * g + e), 0.0,
                e, 0.0, 0.0, -(2.0 * g + e),
            ],
        );
        let x = matrix_exponential(&mp, 1.0).unwrap();
        assert!((x[(1, 1)].re - (-1f64).exp()).abs() < 1e-14);
        assert!((x[(2, 2)].re - (-3f64).exp()).abs() < 1e-14);
        assert!((x[(3, 3)].re - (-3f64).exp()).abs() < 1e-14);
        // z feed: (η/(2γ+η))(1 − e^{−(2γ+η)t})
        assert!((x[(3, 0)].re - (1.0 - (-3f64).exp()) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let a = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let t = 2.3f64;
        let e = matrix_exponential(&a, t).unwrap();
        let want = real_matrix(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(max_abs_diff(&e, &want) < 1e-14);
    }

    #[test]
    fn rejects_non_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matrix_exponential(&a, 1.0), Err(CqecError::Dimension(_))));
    }
}
