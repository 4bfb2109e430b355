//! Dense complex linear algebra.

mod chol;
mod eig;
mod matrix;
pub mod random;
mod svd;
pub mod vector;

pub use chol::solve_spd;
pub use eig::HermitianEigen;
pub use matrix::{ComplexMatrix, Subsystem};
pub use svd::{complete_orthonormal, Svd};

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Default cap on any matrix dimension.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Largest matrix dimension allowed, read from `UPQP_MAX_DIM`.
pub fn max_dim() -> usize {
    std::env::var("UPQP_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Checks `dim` against [`max_dim`].
pub fn check_dim(dim: usize) -> Result<()> {
    let max = max_dim();
    if dim > max {
        Err(Error::DimensionLimit { dim, max })
    } else {
        Ok(())
    }
}

/// Schatten p-norm selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schatten {
    Trace,
    Frobenius,
    Operator,
    /// Finite `p >= 1`.
    P(f64),
}

impl<T: RealScalar> ComplexMatrix<T> {
    /// Schatten norm, the ℓ_p norm of the singular values.
    pub fn schatten_norm(&self, p: Schatten) -> Result<T> {
        if let Schatten::P(p) = p {
            if p.is_nan() || p < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "Schatten p must be >= 1, got {p}"
                )));
            }
        }
        if p == Schatten::Frobenius || p == Schatten::P(2.0) {
            return Ok(self.frobenius_norm());
        }
        let s: Vec<T> = if self.is_diagonal() {
            self.diagonal().iter().map(|z| z.norm()).collect()
        } else {
            self.singular_values()
        };
        Ok(lp_norm(&s, p))
    }
}

fn lp_norm<T: RealScalar>(s: &[T], p: Schatten) -> T {
    match p {
        Schatten::Trace => s.iter().fold(T::zero(), |a, &b| a + b),
        Schatten::Frobenius => s.iter().fold(T::zero(), |a, &b| a + b * b).sqrt(),
        Schatten::Operator => s.iter().fold(T::zero(), |a, &b| a.max(b)),
        Schatten::P(p) if p.is_infinite() => s.iter().fold(T::zero(), |a, &b| a.max(b)),
        Schatten::P(p) => {
            let top = s.iter().fold(T::zero(), |a, &b| a.max(b));
            if top == T::zero() {
                return T::zero();
            }
            // scaled to avoid overflow for large p
            let p = T::lit(p);
            top * s
                .iter()
                .fold(T::zero(), |a, &b| a + (b / top).powf(p))
                .powf(T::one() / p)
        }
    }
}

pub fn tensor<T: RealScalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    a.tensor(b)
}

pub fn partial_trace<T: RealScalar>(
    m: &ComplexMatrix<T>,
    dims: (usize, usize),
    traced: Subsystem,
) -> Result<ComplexMatrix<T>> {
    m.partial_trace(dims, traced)
}

pub fn schatten_norm<T: RealScalar>(m: &ComplexMatrix<T>, p: Schatten) -> Result<T> {
    m.schatten_norm(p)
}

pub fn eig_hermitian<T: RealScalar>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    m.eig_hermitian()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    #[test]
    fn tensor_examples() {
        let id2 = ComplexMatrix::<f64>::identity(2);
        assert_eq!(tensor(&id2, &id2).unwrap(), ComplexMatrix::identity(4));
        let t = tensor(
            &ComplexMatrix::from_real_diag(&[1.0, 2.0]),
            &ComplexMatrix::from_real_diag(&[3.0]),
        )
        .unwrap();
        assert_eq!(t, ComplexMatrix::from_real_diag(&[3.0, 6.0]));

        let xz = tensor(&pauli_x(), &pauli_z()).unwrap();
        let expected = [
            [0., 0., 1., 0.],
            [0., 0., 0., -1.],
            [1., 0., 0., 0.],
            [0., -1., 0., 0.],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(xz[(i, j)], Complex64::new(expected[i][j], 0.0));
            }
        }
    }

    #[test]
    fn tensor_respects_dimension_cap() {
        let big = ComplexMatrix::<f64>::identity(20);
        assert!(matches!(
            big.tensor(&big),
            Err(Error::DimensionLimit { .. })
        ));
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v: Vec<Complex64> = [s, 0.0, 0.0, s].iter().map(|&x| x.into()).collect();
        let p = ComplexMatrix::outer(&v, &v);
        let half = ComplexMatrix::<f64>::identity(2).scale_real(0.5);
        for sub in [Subsystem::A, Subsystem::B] {
            assert!(p.partial_trace((2, 2), sub).unwrap().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::<f64>::identity(6);
        assert!(m.partial_trace((2, 2), Subsystem::A).is_err());
    }

    #[test]
    fn schatten_examples() {
        assert_eq!(
            ComplexMatrix::<f64>::identity(3)
                .schatten_norm(Schatten::Trace)
                .unwrap(),
            3.0
        );
        let d = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert_eq!(d.schatten_norm(Schatten::Frobenius).unwrap(), 5.0);
        assert!((pauli_x().schatten_norm(Schatten::Operator).unwrap() - 1.0).abs() < 1e-15);
        assert!(d.schatten_norm(Schatten::P(0.5)).is_err());
        assert!((d.schatten_norm(Schatten::P(3.0)).unwrap() - 91f64.cbrt()).abs() < 1e-12);
    }
}
