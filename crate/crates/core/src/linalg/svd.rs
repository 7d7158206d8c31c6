//! Singular values by one-sided (Hestenes) Jacobi rotations.

use num_complex::Complex;

use super::ComplexMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (x, y) in a.iter().zip(b) {
        // conj(x) * y
        re = re + x.re * y.re + x.im * y.im;
        im = im + x.re * y.im - x.im * y.re;
    }
    Complex::new(re, im)
}

fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Singular values of `a`, sorted non-increasing.
///
/// Columns are pairwise orthogonalised by complex Jacobi rotations until every
/// pair is orthogonal to working precision; the column norms are then the
/// singular values. Rotations are unitary, so the Frobenius norm is preserved
/// exactly up to rounding.
pub fn svd_singular_values<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    // Work on whichever orientation has fewer columns.
    let (n_rows, cols): (usize, Vec<Vec<Complex<T>>>) = if a.rows() >= a.cols() {
        (a.rows(), (0..a.cols()).map(|j| a.column(j).collect()).collect())
    } else {
        (a.cols(), (0..a.rows()).map(|i| a.row(i).iter().map(|z| z.conj()).collect()).collect())
    };
    let mut cols = cols;
    let n = cols.len();
    if n == 0 || n_rows == 0 {
        return Vec::new();
    }

    let eps = T::epsilon();
    let frob2: T = cols.iter().map(|c| norm_sqr(c)).sum();
    let negligible = frob2 * eps * eps;

    let mut norms: Vec<T> = cols.iter().map(|c| norm_sqr(c)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha * beta <= negligible * negligible || alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = {
                    let (lo, hi) = cols.split_at(q);
                    dot(&lo[p], &hi[0])
                };
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                let cp = &mut lo[p];
                let cq = &mut hi[0];
                // b = conj(phase) * a_q makes <a_p, b> real and positive.
                let ph = phase.conj();
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let b = *y * ph;
                    let xp = *x * c - b * s;
                    let yq = *x * s + b * c;
                    *x = xp;
                    *y = yq;
                }
                norms[p] = norm_sqr(cp);
                norms[q] = norm_sqr(cq);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = norms.into_iter().map(|x| x.max(T::zero()).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// `tr((A^dagger A)^2) / tr(A^dagger A)^2 = sum s^4 / (sum s^2)^2`, evaluated
/// from matrix products only. Independent of the Jacobi route; used as a cross-check.
pub fn schmidt_purity_by_trace<T: Real>(a: &ComplexMatrix<T>) -> T {
    let g = a.adjoint().matmul(a).expect("A^dagger A is always conformable");
    let tr: T = (0..g.rows()).map(|i| g[(i, i)].re).sum();
    let tr2: T = g.as_slice().iter().map(|z| z.norm_sqr()).sum();
    tr2 / (tr * tr)
}
