//! Matrix permanents.
//!
//! Three routes: a factorial-time expansion used as an oracle, Ryser's
//! inclusion-exclusion formula walked in binary-reflected Gray-code order, and
//! a segmented version of the same walk evaluated on a worker pool.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// Largest dimension accepted by [`permanent_naive`].
pub const NAIVE_MAX_N: usize = 10;
/// Largest dimension accepted by the Ryser kernels.
pub const RYSER_MAX_N: usize = 30;
/// Number of Gray-code segments used by [`permanent_parallel`]. Fixed so the
/// reduction tree, and hence the result, does not depend on the thread count.
pub const PARALLEL_SEGMENTS: u64 = 64;

fn square_dim<T: Real>(a: &ComplexMatrix<T>) -> Result<usize> {
    ensure!(a.is_square(), Dimension, "permanent of a non-square {}x{} matrix", a.rows(), a.cols());
    Ok(a.rows())
}

/// Sum over all permutations of the diagonal products. Refuses `n > 10`.
pub fn permanent_naive<T: Real>(a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let n = square_dim(a)?;
    if n > NAIVE_MAX_N {
        return Err(Error::Refused(format!(
            "naive permanent limited to n <= {NAIVE_MAX_N} (got {n}); use the Ryser kernel"
        )));
    }
    fn expand<T: Real>(a: &ComplexMatrix<T>, row: usize, used: u32, acc: Complex<T>) -> Complex<T> {
        let n = a.rows();
        if row == n {
            return acc;
        }
        let mut total = Complex::new(T::zero(), T::zero());
        for col in 0..n {
            if used & (1 << col) == 0 {
                total = total + expand(a, row + 1, used | (1 << col), acc * a[(row, col)]);
            }
        }
        total
    }
    Ok(expand(a, 0, 0, Complex::new(T::one(), T::zero())))
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug)]
struct Compensated<T> {
    sum: Complex<T>,
    carry: Complex<T>,
}

impl<T: Real> Compensated<T> {
    fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { sum: z, carry: z }
    }

    fn add_part(sum: &mut T, carry: &mut T, x: T) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *carry = *carry + ((*sum - t) + x);
        } else {
            *carry = *carry + ((x - t) + *sum);
        }
        *sum = t;
    }

    fn add(&mut self, x: Complex<T>) {
        Self::add_part(&mut self.sum.re, &mut self.carry.re, x.re);
        Self::add_part(&mut self.sum.im, &mut self.carry.im, x.im);
    }

    fn merge(&mut self, other: Self) {
        self.add(other.sum);
        self.add(other.carry);
    }

    fn value(self) -> Complex<T> {
        self.sum + self.carry
    }
}

#[inline]
fn gray(rank: u64) -> u64 {
    rank ^ (rank >> 1)
}

/// Signed Ryser terms for Gray-code ranks in `[start, end)`, `start >= 1`.
fn ryser_segment<T: Real>(a: &ComplexMatrix<T>, start: u64, end: u64) -> Compensated<T> {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = Compensated::zero();
    if start >= end {
        return acc;
    }
    // Row sums over the columns in the segment's first subset.
    let first = gray(start);
    let mut row_sums = vec![zero; n];
    for (i, s) in row_sums.iter_mut().enumerate() {
        for j in 0..n {
            if first & (1 << j) != 0 {
                *s = *s + a[(i, j)];
            }
        }
    }
    let term = |row_sums: &[Complex<T>], subset: u64| {
        let prod = row_sums.iter().fold(Complex::new(T::one(), T::zero()), |p, &s| p * s);
        if subset.count_ones() % 2 == 1 { -prod } else { prod }
    };
    acc.add(term(&row_sums, first));
    for rank in (start + 1)..end {
        let j = rank.trailing_zeros() as usize;
        let subset = gray(rank);
        if subset & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s = *s + a[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s = *s - a[(i, j)];
            }
        }
        acc.add(term(&row_sums, subset));
    }
    acc
}

fn ryser_guard<T: Real>(a: &ComplexMatrix<T>) -> Result<usize> {
    let n = square_dim(a)?;
    if n > RYSER_MAX_N {
        return Err(Error::Refused(format!("Ryser permanent limited to n <= {RYSER_MAX_N} (got {n})")));
    }
    Ok(n)
}

#[inline]
fn apply_outer_sign<T: Real>(n: usize, v: Complex<T>) -> Complex<T> {
    if n % 2 == 1 { -v } else { v }
}

/// Ryser's formula, `(-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij`, with
/// single-column Gray-code updates of the row sums.
pub fn permanent_ryser<T: Real>(a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let n = ryser_guard(a)?;
    if n == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let total = ryser_segment(a, 1, 1u64 << n).value();
    Ok(apply_outer_sign(n, total))
}

/// Ryser's formula with the Gray-code walk cut into [`PARALLEL_SEGMENTS`]
/// contiguous rank ranges, each re-seeded from its first subset and evaluated
/// on a pool of `threads` workers. Partial sums are merged in segment order.
pub fn permanent_parallel<T: Real>(a: &ComplexMatrix<T>, threads: usize) -> Result<Complex<T>> {
    ensure!(threads >= 1, Contract, "thread count must be at least 1");
    let n = ryser_guard(a)?;
    if n == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let total_ranks = 1u64 << n;
    let segments = PARALLEL_SEGMENTS.min(total_ranks - 1);
    let bounds: Vec<(u64, u64)> = (0..segments)
        .map(|s| {
            let lo = 1 + (total_ranks - 1) * s / segments;
            let hi = 1 + (total_ranks - 1) * (s + 1) / segments;
            (lo, hi)
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Contract(format!("cannot start {threads} workers: {e}")))?;
    let partials: Vec<Compensated<T>> =
        pool.install(|| bounds.par_iter().map(|&(lo, hi)| ryser_segment(a, lo, hi)).collect());
    let mut acc = Compensated::zero();
    for p in partials {
        acc.merge(p);
    }
    Ok(apply_outer_sign(n, acc.value()))
}
