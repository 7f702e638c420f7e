use super::{condition_number, require_finite, require_square, ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::error::{CqecError, Result};
use std::cmp::Ordering;

/// Eigenvalues and right eigenvectors of a square matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted by real part descending, ties by imaginary part descending.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    pub diagonalizable: bool,
    /// 2-norm condition number of `eigenvectors`.
    pub condition: f64,
}

impl Spectrum {
    /// `V · diag(f(λ)) · V⁻¹`. Only meaningful when `diagonalizable`.
    pub fn reconstruct_with(&self, f: impl Fn(C64) -> C64) -> Result<ComplexMatrix> {
        let v = &self.eigenvectors;
        let vinv = super::lu_inverse(v)?;
        let mut vd = v.clone();
        for (j, lam) in self.eigenvalues.iter().enumerate() {
            let s = f(*lam);
            vd.column_mut(j).scale_mut_c(s);
        }
        Ok(vd * vinv)
    }
}

trait ScaleC {
    fn scale_mut_c(&mut self, s: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleC
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_c(&mut self, s: C64) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

fn cmp_eig(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Complex Schur form `A = Z T Z^H` with `T` upper triangular.
///
/// Householder reduction to Hessenberg form followed by the single-shift QR
/// iteration with Wilkinson shifts and Givens bulge chasing.
pub fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_square(a, "schur")?;
    require_finite(a, "schur")?;
    let n = a.nrows();
    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(n, n);
    hessenberg(&mut h, &mut z);
    if n == 1 {
        return Ok((z, h));
    }
    let anorm = super::max_abs(&h).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let max_total = 100 * n.max(10);

    while hi > 0 {
        // find start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = anorm;
            }
            if sub <= eps * scale || sub <= f64::MIN_POSITIVE * 1e3 {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > max_total {
            return Err(CqecError::Numerical("Schur QR iteration did not converge".into()));
        }

        let mu = if iter_since_deflation % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            // rows k, k+1 from column max(lo, k-1)
            let c0 = if k > lo { k - 1 } else { lo };
            for j in c0..n {
                let a1 = h[(k, j)];
                let a2 = h[(k + 1, j)];
                h[(k, j)] = a1 * c + s * a2;
                h[(k + 1, j)] = -s.conj() * a1 + a2 * c;
            }
            let rmax = (k + 2).min(hi);
            for i in 0..=rmax {
                let a1 = h[(i, k)];
                let a2 = h[(i, k + 1)];
                h[(i, k)] = a1 * c + a2 * s.conj();
                h[(i, k + 1)] = -a1 * s + a2 * c;
            }
            for i in 0..n {
                let a1 = z[(i, k)];
                let a2 = z[(i, k + 1)];
                z[(i, k)] = a1 * c + a2 * s.conj();
                z[(i, k + 1)] = -a1 * s + a2 * c;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    // clean strictly lower part
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok((z, h))
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Rotation `[[c, s], [-s̄, c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

fn hessenberg(h: &mut ComplexMatrix, z: &mut ComplexMatrix) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { ONE } else { v[0] / v[0].norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for w in v.iter_mut() {
            *w /= vnorm;
        }
        // H <- (I - 2vv^H) H
        for j in 0..n {
            let mut dot = ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * h[(i, j)];
            }
            dot *= 2.0;
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] -= v[idx] * dot;
            }
        }
        // H <- H (I - 2vv^H), Z likewise
        for m in [&mut *h, &mut *z] {
            for i in 0..n {
                let mut dot = ZERO;
                for (idx, j) in (k + 1..n).enumerate() {
                    dot += m[(i, j)] * v[idx];
                }
                dot *= 2.0;
                for (idx, j) in (k + 1..n).enumerate() {
                    m[(i, j)] -= dot * v[idx].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalues and eigenvectors. Never fails on degeneracy; a defective or
/// nearly defective matrix is reported through `diagonalizable = false`.
pub fn eigendecompose(a: &ComplexMatrix) -> Result<Spectrum> {
    eigendecompose_with(a, 1e12)
}

pub fn eigendecompose_with(a: &ComplexMatrix, cond_limit: f64) -> Result<Spectrum> {
    let (z, t) = schur(a)?;
    let n = t.nrows();
    let tnorm = super::max_abs(&t).max(f64::MIN_POSITIVE);
    let small = 1e-10 * tnorm;
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut num = ZERO;
            for l in j + 1..=k {
                num += t[(j, l)] * y[(l, k)];
            }
            let den = t[(j, j)] - lam;
            y[(j, k)] = if den.norm() <= small { ZERO } else { -num / den };
        }
    }
    let mut v = z * y;
    for j in 0..n {
        let nrm = v.column(j).norm();
        if nrm > 0.0 {
            v.column_mut(j).unscale_mut(nrm);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp_eig(&t[(i, i)], &t[(j, j)]));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| t[(i, i)]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let condition = condition_number(&eigenvectors);
    let mut resid = a * &eigenvectors;
    for (j, lam) in eigenvalues.iter().enumerate() {
        let col: ComplexVector = eigenvectors.column(j) * *lam;
        let mut rc = resid.column_mut(j);
        rc -= col;
    }
    let anorm = super::max_abs(a).max(f64::MIN_POSITIVE);
    let residual_ok = super::max_abs(&resid) <= 1e-10 * anorm * (n as f64);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        diagonalizable: condition <= cond_limit && residual_ok,
        condition,
    })
}

/// Eigenvalues only, in the same order as `eigendecompose`.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    let mut ev: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(cmp_eig);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::super::real_matrix;
    use super::*;

    fn pseudo_random(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn diagonal_sorted_descending() {
        let a = real_matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let s = eigendecompose(&a).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![3.0, 2.0, 1.0]);
        assert!(s.diagonalizable);
    }

    #[test]
    fn schur_reconstructs_random() {
        for n in [2, 3, 7, 16, 30] {
            let a = pseudo_random(n, n as u64);
            let (z, t) = schur(&a).unwrap();
            let back = &z * &t * z.adjoint();
            assert!(super::super::max_abs_diff(&back, &a) < 1e-12 * n as f64);
            let zz = z.adjoint() * &z;
            assert!(super::super::max_abs_diff(&zz, &ComplexMatrix::identity(n, n)) < 1e-12 * n as f64);
        }
    }

    #[test]
    fn eigenpairs_of_random_matrix() {
        let a = pseudo_random(12, 99);
        let s = eigendecompose(&a).unwrap();
        assert!(s.diagonalizable);
        let av = &a * &s.eigenvectors;
        for j in 0..12 {
            let lv = s.eigenvectors.column(j) * s.eigenvalues[j];
            assert!((av.column(j) - lv).norm() < 1e-11);
        }
    }

    #[test]
    fn jordan_block_flagged() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(!eigendecompose(&a).unwrap().diagonalizable);
        let b = real_matrix(3, 3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]);
        assert!(!eigendecompose(&b).unwrap().diagonalizable);
    }

    #[test]
    fn degenerate_but_diagonalizable() {
        // permutation-similar to diag(1, 1, 2) with nontrivial mixing
        let p = real_matrix(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
        let d = real_matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let pinv = super::super::lu_inverse(&p).unwrap();
        let a = &p * d * pinv;
        let s = eigendecompose(&a).unwrap();
        assert!(s.diagonalizable, "cond {}", s.condition);
        let back = s.reconstruct_with(|l| l).unwrap();
        assert!(super::super::max_abs_diff(&back, &a) < 1e-12);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let a = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn markov_three_qubit_eigenvalues() {
        let (g, e) = (1.0, 0.7);
        let m = real_matrix(
            4,
            4,
            &[
                -3.0 * g, e + g, 0.0, 0.0,
                3.0 * g, -(e + 3.0 * g), 2.0 * g, 0.0,
                0.0, 2.0 * g, -(e + 3.0 * g), 3.0 * g,
                0.0, 0.0, e + g, -3.0 * g,
            ],
        );
        let ev = eigenvalues(&m).unwrap();
        let r = (16.0 * g * g + 16.0 * g * e + e * e).sqrt();
        let mut expect = [0.0, -4.0 * g - e, 0.5 * (-8.0 * g - e + r), 0.5 * (-8.0 * g - e - r)];
        expect.sort_by(|a, b| b.total_cmp(a));
        for (z, x) in ev.iter().zip(expect) {
            assert!((z - C64::new(x, 0.0)).norm() < 1e-12, "{z} vs {x}");
        }
    }
}
