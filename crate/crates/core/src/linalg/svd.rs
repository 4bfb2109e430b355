//! One-sided (Hestenes) Jacobi singular value decomposition.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::scalar::RealScalar;

const MAX_SWEEPS: usize = 80;

/// `m = U Σ V†` with full unitaries `u` (rows×rows) and `v` (cols×cols) and
/// singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T: RealScalar = f64> {
    pub u: ComplexMatrix<T>,
    pub s: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: RealScalar> Svd<T> {
    /// Rebuilds `U Σ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let (m, n) = (self.u.rows(), self.v.rows());
        ComplexMatrix::from_fn(m, n, |i, j| {
            self.s
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (k, &s)| {
                    acc + self.u[(i, k)] * self.v[(j, k)].conj() * s
                })
        })
    }

    /// Numerical rank at relative tolerance `rel` of the largest singular value.
    pub fn rank(&self, rel: T) -> usize {
        let top = self.s.first().copied().unwrap_or_else(T::zero);
        self.s.iter().filter(|&&s| s > rel * top).count()
    }
}

impl<T: RealScalar> ComplexMatrix<T> {
    pub fn svd(&self) -> Svd<T> {
        if self.rows() >= self.cols() {
            tall_svd(self)
        } else {
            let t = tall_svd(&self.dagger());
            Svd {
                u: t.v,
                s: t.s,
                v: t.u,
            }
        }
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<T> {
        let mut a = if self.rows() >= self.cols() {
            self.clone()
        } else {
            self.dagger()
        };
        let mut s = orthogonalize_columns(&mut a, None);
        s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
        s
    }
}

fn tall_svd<T: RealScalar>(m: &ComplexMatrix<T>) -> Svd<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    let norms = orthogonalize_columns(&mut a, Some(&mut v));

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s: Vec<T> = order.iter().map(|&k| norms[k]).collect();
    let v = ComplexMatrix::from_fn(cols, cols, |i, k| v[(i, order[k])]);

    let top = s.first().copied().unwrap_or_else(T::zero);
    let cutoff = top * T::epsilon() * T::lit(rows.max(cols) as f64);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(rows);
    for (k, &sk) in s.iter().enumerate() {
        if sk <= cutoff || sk == T::zero() {
            break;
        }
        basis.push(a.column(order[k]).iter().map(|&z| z / sk).collect());
    }
    let u = complete_orthonormal(&basis, rows);
    Svd { u, s, v }
}

/// Rotates the columns of `a` until they are mutually orthogonal and
/// returns their norms. Rotations are accumulated into `v` when given.
fn orthogonalize_columns<T: RealScalar>(
    a: &mut ComplexMatrix<T>,
    mut v: Option<&mut ComplexMatrix<T>>,
) -> Vec<T> {
    let (rows, n) = (a.rows(), a.cols());
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::<T>::zero();
                for i in 0..rows {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (T::lit(2.0) * g);
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
                let pc = phase.conj();
                rotate_columns(a, p, q, c, s, pc);
                if let Some(v) = v.as_deref_mut() {
                    rotate_columns(v, p, q, c, s, pc);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n)
        .map(|j| {
            (0..rows)
                .fold(T::zero(), |acc, i| acc + a[(i, j)].norm_sqr())
                .sqrt()
        })
        .collect()
}

fn rotate_columns<T: RealScalar>(
    m: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
    pc: Complex<T>,
) {
    for i in 0..m.rows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = x * c - y * pc * s;
        m[(i, q)] = x * s + y * pc * c;
    }
}

/// Extends orthonormal vectors of length `n` to an `n×n` unitary whose first
/// columns are the given ones. Missing columns are taken from the standard
/// basis by Gram–Schmidt, preferring the direction with largest residual.
pub fn complete_orthonormal<T: RealScalar>(
    columns: &[Vec<Complex<T>>],
    n: usize,
) -> ComplexMatrix<T> {
    let mut basis: Vec<Vec<Complex<T>>> = columns.to_vec();
    while basis.len() < n {
        let mut best: Option<(T, Vec<Complex<T>>)> = None;
        for e in 0..n {
            let mut r = vec![Complex::zero(); n];
            r[e] = Complex::new(T::one(), T::zero());
            // two passes of Gram–Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let proj = super::vector::inner(b, &r);
                    for (ri, &bi) in r.iter_mut().zip(b) {
                        *ri -= proj * bi;
                    }
                }
            }
            let nr = r.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if best
                .as_ref()
                .is_none_or(|(bn, _)| nr > *bn * (T::one() + T::lit(1e-12)))
            {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.expect("n > 0");
        basis.push(r.into_iter().map(|z| z / nr).collect());
    }
    ComplexMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::ginibre;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reconstructs_rectangular_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, c) in [(4, 4), (5, 3), (3, 5), (1, 4), (6, 1)] {
            let m: ComplexMatrix = ginibre(r, c, &mut rng);
            let svd = m.svd();
            assert!(svd.reconstruct().max_abs_diff(&m) < 1e-12, "{r}x{c}");
            assert!(svd.u.isometry_deviation() < 1e-12);
            assert!(svd.v.isometry_deviation() < 1e-12);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_gets_full_unitary() {
        let v: Vec<Complex<f64>> = vec![1.0.into(), 2.0.into(), Complex::new(0.0, 1.0)];
        let m = ComplexMatrix::outer(&v, &v);
        let svd = m.svd();
        assert_eq!(svd.rank(1e-12), 1);
        assert!((svd.s[0] - 6.0).abs() < 1e-12);
        assert!(svd.u.isometry_deviation() < 1e-12);
        assert!(svd.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let svd = ComplexMatrix::<f64>::zeros(3, 2).svd();
        assert_eq!(svd.s, vec![0.0, 0.0]);
        assert!(svd.u.isometry_deviation() < 1e-15);
    }

    #[test]
    fn completion_extends_a_column() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let col = vec![Complex::new(s, 0.0), Complex::new(0.0, s), Complex::zero()];
        let u = complete_orthonormal(std::slice::from_ref(&col), 3);
        assert_eq!(u.column(0), col);
        assert!(u.isometry_deviation() < 1e-15);
    }
}
