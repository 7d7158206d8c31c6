//! Haar-distributed unitaries from a Householder QR of a complex Ginibre matrix.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

use super::ComplexMatrix;
use crate::error::{ensure, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Real;

/// Householder QR of a square matrix. Returns `(Q, R)` with `A = Q R`,
/// `Q` unitary and `R` upper triangular.
pub fn qr_decompose<T: Real>(a: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    ensure!(a.is_square(), Dimension, "QR implemented for square matrices, got {}x{}", a.rows(), a.cols());
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut r = a.clone();
    let mut q = ComplexMatrix::<T>::identity(n);

    for k in 0..n.saturating_sub(1) {
        let norm_x = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm_x == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::new(T::one(), T::zero()) };
        // v = x + e^{i arg x0} |x| e_1, reflector H = I - 2 v v^dagger / (v^dagger v)
        let mut v: Vec<Complex<T>> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] = v[0] + phase * norm_x;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::of(2.0);
        for j in 0..n {
            let mut dot = zero;
            for (off, vi) in v.iter().enumerate() {
                dot = dot + vi.conj() * r[(k + off, j)];
            }
            let f = dot * two / vnorm2;
            for (off, vi) in v.iter().enumerate() {
                r[(k + off, j)] = r[(k + off, j)] - *vi * f;
            }
        }
        // Q <- Q H (H is Hermitian)
        for i in 0..n {
            let mut dot = zero;
            for (off, vi) in v.iter().enumerate() {
                dot = dot + q[(i, k + off)] * *vi;
            }
            let f = dot * two / vnorm2;
            for (off, vi) in v.iter().enumerate() {
                q[(i, k + off)] = q[(i, k + off)] - f * vi.conj();
            }
        }
        for i in (k + 1)..n {
            r[(i, k)] = zero;
        }
    }
    Ok((q, r))
}

/// Haar-random `m x m` unitary, deterministic in `seed`.
///
/// QR of a matrix of i.i.d. standard complex Gaussians, with each column of
/// `Q` multiplied by the phase of the matching diagonal entry of `R`. Without
/// that correction the distribution of `Q` depends on the QR convention.
pub fn haar_random_unitary<T: Real>(m: usize, seed: u64) -> Result<ComplexMatrix<T>> {
    ensure!(m >= 1, Dimension, "unitary dimension must be at least 1");
    let mut rng = rng_from_seed(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(T::of(re * scale), T::of(im * scale))
    });
    let (mut q, r) = qr_decompose(&g)?;
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > T::zero() { d / d.norm() } else { Complex::new(T::one(), T::zero()) };
        for i in 0..m {
            q[(i, j)] = q[(i, j)] * phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::check_unitary;

    #[test]
    fn qr_reconstructs() {
        let a: ComplexMatrix<f64> = ComplexMatrix::from_fn(5, 5, |i, j| Complex::new((i * 3 + j) as f64 % 7.0 - 3.0, (i + 2 * j) as f64 % 5.0 - 2.0));
        let (q, r) = qr_decompose(&a).unwrap();
        assert!(check_unitary(&q, 1e-12).unwrap());
        for i in 0..5 {
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-14);
            }
        }
        assert!(q.matmul(&r).unwrap().max_abs_diff(&a).unwrap() < 1e-12);
    }

    #[test]
    fn one_by_one_is_a_phase() {
        let u = haar_random_unitary::<f64>(1, 17).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn twelve_modes_unitary() {
        let u = haar_random_unitary::<f64>(12, 42).unwrap();
        assert!(check_unitary(&u, 1e-10).unwrap());
    }

    #[test]
    fn seed_determinism() {
        let a = haar_random_unitary::<f64>(4, 1).unwrap();
        let b = haar_random_unitary::<f64>(4, 1).unwrap();
        let c = haar_random_unitary::<f64>(4, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(haar_random_unitary::<f64>(0, 1).is_err());
    }

    #[test]
    fn single_precision_unitary() {
        let u = haar_random_unitary::<f32>(6, 3).unwrap();
        assert!(check_unitary(&u, 1e-5).unwrap());
    }

    // First moment of |U_00|^2 under Haar measure is 1/m.
    #[test]
    fn haar_first_moment() {
        let m = 4;
        let trials = 4000;
        let mean: f64 = (0..trials)
            .map(|s| haar_random_unitary::<f64>(m, s).unwrap()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / trials as f64;
        // Var |U_00|^2 = (m-1)/(m^2 (m+1)) = 0.0375 -> sigma_mean ~ 0.003
        assert!((mean - 0.25).abs() < 0.015, "mean {mean}");
    }
}
