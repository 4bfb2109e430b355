//! Random matrices and states.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;
use crate::scalar::RealScalar;

fn normal<T: RealScalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: RealScalar, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    let half = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(normal::<T, R>(rng), normal::<T, R>(rng)) * half
    })
}

/// Haar-distributed unitary via Gram–Schmidt on a Ginibre matrix.
///
/// Gram–Schmidt yields the QR factor with positive real diagonal, which is the
/// normalization that makes `Q` exactly Haar.
pub fn haar_unitary<T: RealScalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(d, d, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let proj = super::vector::inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = super::vector::norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// Haar-random unit vector.
pub fn random_unit_vector<T: RealScalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..n)
        .map(|_| Complex::new(normal::<T, R>(rng), normal::<T, R>(rng)))
        .collect();
    let nv = super::vector::norm(&v);
    v.into_iter().map(|z| z / nv).collect()
}

/// Hermitian matrix `(G + G†)/2` with Ginibre `G`.
pub fn random_hermitian<T: RealScalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ginibre::<T, R>(n, n, rng).hermitian_part()
}

/// Full-rank density matrix `G G† / Tr(G G†)` (Hilbert–Schmidt measure).
pub fn random_density<T: RealScalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    let p = &g * &g.dagger();
    let tr = p.trace().re;
    p.scale_real(T::one() / tr).hermitian_part()
}

/// Pure state `|ψ⟩⟨ψ|` for Haar `ψ`.
pub fn random_pure_density<T: RealScalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    let v = random_unit_vector::<T, R>(n, rng);
    ComplexMatrix::outer(&v, &v)
}

/// Random contraction: a Ginibre matrix rescaled to operator norm `r ∈ [0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    r: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let g = ginibre::<f64, R>(rows, cols, rng);
    let s = g.singular_values()[0];
    g.scale_real(r / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let u: ComplexMatrix = haar_unitary(4, &mut a);
        let v: ComplexMatrix = haar_unitary(4, &mut b);
        assert!(u.is_unitary(1e-13));
        assert_eq!(u, v);
    }

    #[test]
    fn densities_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: ComplexMatrix = random_density(3, &mut rng);
        assert!((r.trace().re - 1.0).abs() < 1e-14);
        assert!(r.eigvals_hermitian().unwrap()[0] > 0.0);
    }
}
