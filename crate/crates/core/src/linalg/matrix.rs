use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;

/// Dense complex matrix stored row-major.
///
/// Entries are guaranteed finite: every constructor that accepts external
/// data rejects NaN and infinities.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            Dimension,
            "{} entries supplied for a {rows}x{cols} matrix",
            data.len()
        );
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Data(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
    }

    /// Builds a matrix from a generator. The generator must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        ensure!(rows.iter().all(|row| row.len() == c), Dimension, "ragged rows");
        let data = rows.iter().flatten().map(|&x| Complex::new(T::of(x), T::zero())).collect();
        Self::new(r, c, data)
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out[(i, j)] = a[(i, j)];
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(a.rows + i, a.cols + j)] = b[(i, j)];
            }
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = Complex<T>> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        ensure!(
            self.cols == rhs.rows,
            Dimension,
            "cannot multiply {}x{} by {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * factor).collect() }
    }

    /// Entry-wise squared modulus, `|a_ij|^2`, as a complex matrix with zero imaginary part.
    pub fn abs_squared(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex::new(z.norm_sqr(), T::zero())).collect(),
        }
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Multiply every entry of row `i` by `factor`.
    pub fn scale_row(&mut self, i: usize, factor: Complex<T>) {
        for z in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *z = *z * factor;
        }
    }

    pub fn map<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U>) -> ComplexMatrix<U> {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Maximum entry-wise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        ensure!(
            self.rows == other.rows && self.cols == other.cols,
            Dimension,
            "shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max))
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// True iff `max |(U^dagger U - I)_ij| <= tol`.
pub fn check_unitary<T: Real>(u: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    ensure!(u.is_square(), Dimension, "unitarity check needs a square matrix, got {}x{}", u.rows(), u.cols());
    let gram = u.adjoint().matmul(u)?;
    let id = ComplexMatrix::identity(u.rows());
    Ok(gram.max_abs_diff(&id)? <= tol)
}
