//! Cholesky factorizations for Hermitian positive definite matrices.

use num_complex::Complex;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

impl<T: RealScalar> ComplexMatrix<T> {
    /// Lower-triangular `L` with `L L† = self`.
    pub fn cholesky(&self) -> Result<ComplexMatrix<T>> {
        let n = self.require_square()?;
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d.is_nan() || d <= T::zero() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = Complex::new(d, T::zero());
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solves `L X = B` for lower-triangular `self`.
    pub fn solve_lower(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.rows();
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self[(i, i)];
            }
        }
        x
    }

    /// Solves `L† X = B` for lower-triangular `self`.
    pub fn solve_lower_adjoint(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.rows();
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self[(i, i)].conj();
            }
        }
        x
    }

    /// Inverse of a Hermitian positive definite matrix.
    pub fn inverse_hpd(&self) -> Result<ComplexMatrix<T>> {
        let l = self.cholesky()?;
        let id = ComplexMatrix::identity(self.rows());
        let inv = l.solve_lower_adjoint(&l.solve_lower(&id));
        Ok(inv.hermitian_part())
    }
}

/// Solves `A x = b` in place for a real symmetric positive definite `A`
/// stored row-major as `n×n`.
pub fn solve_spd<T: RealScalar>(a: &[T], n: usize, b: &mut [T]) -> Result<()> {
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= T::zero() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}
