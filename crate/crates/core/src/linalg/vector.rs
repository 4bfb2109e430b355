//! Helpers for complex vectors stored as slices.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner<T: RealScalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: RealScalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn normalize<T: RealScalar>(v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = norm(v);
    if n.is_nan() || n <= T::zero() || !n.is_finite() {
        return Err(Error::InvalidParameter(
            "cannot normalize a zero vector".into(),
        ));
    }
    Ok(v.iter().map(|&z| z / n).collect())
}

/// Standard basis vector `|k⟩` of length `n`.
pub fn basis<T: RealScalar>(n: usize, k: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); n];
    v[k] = Complex::new(T::one(), T::zero());
    v
}

/// Kronecker product of vectors.
pub fn kron<T: RealScalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}
