//! Cyclic complex Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `m = Q diag(values) Q†` with ascending `values`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: RealScalar = f64> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: RealScalar> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    /// Rebuilds `Q diag(f(λ)) Q†`.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let q = &self.vectors;
        let n = q.rows();
        let mapped: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + q[(i, k)] * q[(j, k)].conj() * mapped[k]
            })
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_values(|l| l)
    }
}

impl<T: RealScalar> ComplexMatrix<T> {
    /// Hermitian eigendecomposition.
    ///
    /// The input is rejected if it deviates from Hermitian by more than the
    /// default tolerance; within tolerance it is symmetrized first.
    pub fn eig_hermitian(&self) -> Result<HermitianEigen<T>> {
        self.require_square()?;
        let tol = T::default_tol();
        if !self.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                deviation: self.hermitian_deviation().to_f64().unwrap_or(f64::INFINITY),
            });
        }
        Ok(jacobi_eigen(self.hermitian_part()))
    }

    /// Eigenvalues only, ascending.
    pub fn eigvals_hermitian(&self) -> Result<Vec<T>> {
        Ok(self.eig_hermitian()?.values)
    }
}

fn off_diagonal_norm_sqr<T: RealScalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_eigen<T: RealScalar>(mut a: ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let threshold = (T::epsilon() * scale * T::lit(n as f64)).powi(2);

    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm_sqr(&a) <= threshold {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| {
        diag[i]
            .partial_cmp(&diag[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    fix_phases(&mut vectors);
    HermitianEigen { values, vectors }
}

/// Zeroes `a[p][q]` with a complex Givens rotation, accumulating into `v`.
fn rotate<T: RealScalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs <= T::min_positive_value() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal at working precision.
    if g_abs <= T::epsilon() * T::lit(1e-3) * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }
    let phase = g / g_abs; // e^{iφ}
    let theta = (aqq - app) / (T::lit(2.0) * g_abs);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let cz = Complex::new(c, T::zero());
    let sz = Complex::new(s, T::zero());
    let ph_conj = phase.conj();
    let n = a.rows();

    // A <- A J with J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q).
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * cz - aiq * sz * ph_conj;
        a[(i, q)] = aip * sz + aiq * cz * ph_conj;
    }
    // A <- J† A.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * cz - aqj * sz * phase;
        a[(q, j)] = apj * sz + aqj * cz * phase;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * cz - viq * sz * ph_conj;
        v[(i, q)] = vip * sz + viq * cz * ph_conj;
    }
}

/// Makes the largest-modulus entry of every column real and positive.
pub(crate) fn fix_phases<T: RealScalar>(q: &mut ComplexMatrix<T>) {
    let (rows, cols) = (q.rows(), q.cols());
    for k in 0..cols {
        let mut best = 0;
        let mut best_abs = T::zero();
        for i in 0..rows {
            let a = q[(i, k)].norm();
            // strict comparison keeps the lowest index among near-ties
            if a > best_abs * (T::one() + T::lit(1e-9)) {
                best = i;
                best_abs = a;
            }
        }
        if best_abs > T::zero() {
            let ph = q[(best, k)].conj() / best_abs;
            for i in 0..rows {
                q[(i, k)] *= ph;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted_ascending() {
        let m = ComplexMatrix::from_real_diag(&[2.0, 1.0]);
        let e = m.eig_hermitian().unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let x = ComplexMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let e = x.eig_hermitian().unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = e.vector(0);
        let plus = e.vector(1);
        // phases are fixed so the leading entry is real positive
        assert!((minus[0] - c(s, 0.)).norm() < 1e-12 && (minus[1] - c(-s, 0.)).norm() < 1e-12);
        assert!((plus[0] - c(s, 0.)).norm() < 1e-12 && (plus[1] - c(s, 0.)).norm() < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let h: ComplexMatrix = random_hermitian(8, &mut rng);
            let e = h.eig_hermitian().unwrap();
            let err = e.reconstruct().max_abs_diff(&h);
            let scale = h.schatten_norm(crate::linalg::Schatten::Operator).unwrap();
            assert!(err <= 1e-9 * scale, "reconstruction residual {err}");
            assert!(e.vectors.isometry_deviation() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!(matches!(m.eig_hermitian(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let m = ComplexMatrix::<f32>::new(
            2,
            2,
            vec![
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let e = m.eig_hermitian().unwrap();
        assert!(e.values[0].abs() < 1e-6 && (e.values[1] - 2.0).abs() < 1e-6);
    }
}
