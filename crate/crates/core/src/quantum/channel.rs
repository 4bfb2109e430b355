use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, ComplexMatrix};
use crate::scalar::RealScalar;

/// Relative Choi eigenvalue threshold below which a Kraus direction is dropped.
pub const KRAUS_RANK_TOL: f64 = 1e-9;
/// Trace-preservation tolerance for accepted Kraus lists.
pub const TP_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel<T: RealScalar = f64> {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

/// Isometric dilation `V: C^{d_in} -> C^{d_out} ⊗ C^{anc_dim}`.
#[derive(Debug, Clone)]
pub struct Stinespring<T: RealScalar = f64> {
    pub isometry: ComplexMatrix<T>,
    pub anc_dim: usize,
}

impl<T: RealScalar> Channel<T> {
    /// Validates shapes and `Σ K†K = Id`.
    pub fn new(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| {
            Error::InvalidParameter("a channel needs at least one Kraus operator".into())
        })?;
        let (d_out, d_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shape",
                    expected: d_out * d_in,
                    found: k.rows() * k.cols(),
                });
            }
        }
        let ch = Self { d_in, d_out, kraus };
        let dev = ch.tp_deviation();
        let tol = T::lit(TP_TOL).max(T::default_tol());
        if dev > tol {
            return Err(Error::NotTracePreserving {
                deviation: dev.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn unitary(u: ComplexMatrix<T>) -> Result<Self> {
        let n = u.require_square()?;
        if !u.is_unitary(T::lit(TP_TOL).max(T::default_tol())) {
            return Err(Error::NotUnitary {
                deviation: u.isometry_deviation().to_f64().unwrap_or(f64::INFINITY),
            });
        }
        Ok(Self {
            d_in: n,
            d_out: n,
            kraus: vec![u],
        })
    }

    /// Completely depolarizing channel `ρ ↦ Tr(ρ) Id/d`, as the Weyl twirl.
    pub fn depolarizing(d: usize) -> Self {
        let s = T::one() / T::lit(d as f64);
        let kraus = (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| weyl(d, a, b).scale_real(s))
            .collect();
        Self {
            d_in: d,
            d_out: d,
            kraus,
        }
    }

    /// Random channel with `k` Kraus operators, cut from a Haar isometry.
    pub fn random<R: rand::Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Self {
        let u = crate::linalg::random::haar_unitary::<T, R>(d * k, rng);
        let kraus = (0..k)
            .map(|j| ComplexMatrix::from_fn(d, d, |o, i| u[(j * d + o, i)]))
            .collect();
        Self {
            d_in: d,
            d_out: d,
            kraus,
        }
    }

    #[inline]
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    #[inline]
    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix<T>> {
        self.kraus
    }

    /// Largest entrywise deviation of `Σ K†K` from the identity.
    pub fn tp_deviation(&self) -> T {
        let mut s = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            s += &(&k.dagger() * k);
        }
        s.max_abs_diff(&ComplexMatrix::identity(self.d_in))
    }

    /// `Σ_k K_k ρ K_k†`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let n = rho.require_square()?;
        if n != self.d_in {
            return Err(Error::DimensionMismatch {
                context: "channel input",
                expected: self.d_in,
                found: n,
            });
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out += &(&(k * rho) * &k.dagger());
        }
        Ok(out)
    }

    /// `(self ⊗ id_k)(ρ)` on `C^{d_in} ⊗ C^k`.
    pub fn apply_with_ancilla(&self, rho: &ComplexMatrix<T>, k: usize) -> Result<ComplexMatrix<T>> {
        let id = ComplexMatrix::identity(k);
        let ext = self
            .kraus
            .iter()
            .map(|op| op.tensor(&id))
            .collect::<Result<Vec<_>>>()?;
        Self {
            d_in: self.d_in * k,
            d_out: self.d_out * k,
            kraus: ext,
        }
        .apply(rho)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if first.d_out != self.d_in {
            return Err(Error::DimensionMismatch {
                context: "channel composition",
                expected: self.d_in,
                found: first.d_out,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| first.kraus.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            d_in: first.d_in,
            d_out: self.d_out,
            kraus,
        }
        .canonical())
    }

    /// Choi matrix `Σ_ij c(E_ij) ⊗ E_ij` on output ⊗ input.
    pub fn choi(&self) -> ComplexMatrix<T> {
        let n = self.d_out * self.d_in;
        let mut j = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = k.entries();
            for a in 0..n {
                if v[a] == Complex::zero() {
                    continue;
                }
                for b in 0..n {
                    j[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        j
    }

    /// Minimal Kraus list from the Choi eigendecomposition.
    pub fn from_choi(j: &ComplexMatrix<T>, d_in: usize, d_out: usize) -> Result<Self> {
        let n = j.require_square()?;
        if n != d_in * d_out {
            return Err(Error::DimensionMismatch {
                context: "Choi matrix",
                expected: d_in * d_out,
                found: n,
            });
        }
        let eig = j.eig_hermitian()?;
        let top = eig.values.last().copied().unwrap_or_else(T::zero);
        let cutoff = T::lit(KRAUS_RANK_TOL) * top;
        let mut kraus = Vec::new();
        for k in (0..n).rev() {
            let lambda = eig.values[k];
            if lambda <= cutoff || lambda <= T::zero() {
                break;
            }
            let s = lambda.sqrt();
            let v = eig.vector(k);
            kraus.push(ComplexMatrix::from_fn(d_out, d_in, |o, i| {
                v[o * d_in + i] * s
            }));
        }
        Self::new(kraus)
    }

    /// Numerical Kraus rank (Choi rank at relative tolerance 1e-9).
    pub fn kraus_rank(&self) -> usize {
        let j = self.choi();
        let vals = j.eigvals_hermitian().expect("Choi matrices are Hermitian");
        let top = vals.last().copied().unwrap_or_else(T::zero);
        let cutoff = T::lit(KRAUS_RANK_TOL) * top;
        vals.iter().filter(|&&l| l > cutoff).count()
    }

    /// Rewrites the Kraus list in minimal eigen-Kraus form.
    pub fn canonical(&self) -> Self {
        Self::from_choi(&self.choi(), self.d_in, self.d_out).unwrap_or_else(|_| self.clone())
    }

    /// Single Kraus operator if the channel is unitary.
    pub fn as_unitary(&self) -> Option<ComplexMatrix<T>> {
        if self.d_in != self.d_out {
            return None;
        }
        let tol = T::lit(1e-9).max(T::default_tol());
        let c = if self.kraus.len() == 1 {
            self.clone()
        } else {
            self.canonical()
        };
        match c.kraus.as_slice() {
            [u] if u.is_unitary(tol) => Some(u.clone()),
            _ => None,
        }
    }

    /// Stinespring isometry with ancilla dimension equal to the Kraus rank.
    ///
    /// `V[(o·r + k), i] = K_k[o, i]`, so the ancilla is the last factor.
    pub fn stinespring(&self) -> Stinespring<T> {
        let rank = self.kraus_rank();
        let minimal = if self.kraus.len() == rank {
            self.clone()
        } else {
            self.canonical()
        };
        let r = minimal.kraus.len();
        let isometry = ComplexMatrix::from_fn(self.d_out * r, self.d_in, |row, i| {
            minimal.kraus[row % r][(row / r, i)]
        });
        Stinespring {
            isometry,
            anc_dim: r,
        }
    }
}

impl<T: RealScalar> Stinespring<T> {
    /// `Tr_anc[V ρ V†]`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let out = &(&self.isometry * rho) * &self.isometry.dagger();
        out.partial_trace(
            (self.isometry.rows() / self.anc_dim, self.anc_dim),
            crate::linalg::Subsystem::B,
        )
    }

    /// Unitary on `C^{d_in} ⊗ C^{anc}` agreeing with the isometry on
    /// inputs `|x⟩ ⊗ |0⟩`. Requires `d_out = d_in`.
    pub fn unitary_completion(&self) -> Result<ComplexMatrix<T>> {
        let r = self.anc_dim;
        let d_in = self.isometry.cols();
        let n = self.isometry.rows();
        if n != d_in * r {
            return Err(Error::DimensionMismatch {
                context: "unitary completion needs equal input and output dimension",
                expected: d_in * r,
                found: n,
            });
        }
        crate::linalg::check_dim(n)?;
        let cols: Vec<_> = (0..d_in).map(|x| self.isometry.column(x)).collect();
        let basis = complete_orthonormal(&cols, n);
        // column x·r of the unitary is V|x>, the rest fill the complement
        let mut u = ComplexMatrix::zeros(n, n);
        let mut extra = d_in;
        for c in 0..n {
            let src = if c % r == 0 {
                c / r
            } else {
                extra += 1;
                extra - 1
            };
            for row in 0..n {
                u[(row, c)] = basis[(row, src)];
            }
        }
        Ok(u)
    }
}

/// Weyl operator `X^a Z^b` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩`.
pub fn weyl<T: RealScalar>(d: usize, a: usize, b: usize) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let angle = T::lit(2.0 * std::f64::consts::PI * ((b * j) % d) as f64 / d as f64);
        m[((j + a) % d, j)] = Complex::new(angle.cos(), angle.sin());
    }
    m
}

#[derive(Deserialize)]
struct ChannelRepr<T: RealScalar> {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

impl<'de, T: RealScalar + Deserialize<'de>> Deserialize<'de> for Channel<T> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = ChannelRepr::<T>::deserialize(deserializer)?;
        let ch = Channel::new(repr.kraus).map_err(serde::de::Error::custom)?;
        if ch.d_in != repr.d_in || ch.d_out != repr.d_out {
            return Err(serde::de::Error::custom(
                "declared channel dimensions disagree with Kraus shapes",
            ));
        }
        Ok(ch)
    }
}

pub fn apply_channel<T: RealScalar>(
    c: &Channel<T>,
    rho: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    c.apply(rho)
}

pub fn choi_matrix<T: RealScalar>(c: &Channel<T>) -> ComplexMatrix<T> {
    c.choi()
}

pub fn kraus_from_choi<T: RealScalar>(
    j: &ComplexMatrix<T>,
    d_in: usize,
    d_out: usize,
) -> Result<Channel<T>> {
    Channel::from_choi(j, d_in, d_out)
}

pub fn stinespring_dilation<T: RealScalar>(c: &Channel<T>) -> Stinespring<T> {
    c.stinespring()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_unitary, random_density};
    use crate::linalg::Subsystem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn ket0(d: usize) -> M {
        let mut m = M::zeros(d, d);
        m[(0, 0)] = 1.0.into();
        m
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho: M = random_density(3, &mut rng);
        assert_eq!(Channel::identity(3).apply(&rho).unwrap(), rho);
    }

    #[test]
    fn depolarizing_outputs_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..=4 {
            let rho: M = random_density(d, &mut rng);
            let out = Channel::<f64>::depolarizing(d).apply(&rho).unwrap();
            let target = M::identity(d).scale_real(1.0 / d as f64);
            assert!(out.max_abs_diff(&target) < 1e-14);
        }
    }

    #[test]
    fn unitary_channel_on_ket0() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u: M = haar_unitary(2, &mut rng);
        let out = Channel::unitary(u.clone())
            .unwrap()
            .apply(&ket0(2))
            .unwrap();
        let col = u.column(0);
        assert!(out.max_abs_diff(&M::outer(&col, &col)) < 1e-15);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = M::identity(2).scale_real(0.5);
        assert!(matches!(
            Channel::new(vec![k]),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn choi_examples() {
        let j = Channel::<f64>::identity(2).choi();
        let omega: Vec<Complex<f64>> = [1.0, 0.0, 0.0, 1.0].iter().map(|&x| x.into()).collect();
        assert!(j.max_abs_diff(&M::outer(&omega, &omega)) < 1e-15);
        assert_eq!(j.trace().re, 2.0);

        let dep = Channel::<f64>::depolarizing(2).choi();
        assert!(dep.max_abs_diff(&M::identity(4).scale_real(0.5)) < 1e-15);

        let tr_out = dep.partial_trace((2, 2), Subsystem::A).unwrap();
        assert!(tr_out.max_abs_diff(&M::identity(2)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = Channel::unitary(haar_unitary::<f64, _>(3, &mut rng)).unwrap();
        let vals = u.choi().eigvals_hermitian().unwrap();
        assert!((vals[8] - 3.0).abs() < 1e-12 && vals[7].abs() < 1e-12);
    }

    #[test]
    fn stinespring_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u: M = haar_unitary(3, &mut rng);
        let st = Channel::unitary(u.clone()).unwrap().stinespring();
        assert_eq!(st.anc_dim, 1);
        assert_eq!(st.isometry, u);

        assert_eq!(Channel::<f64>::depolarizing(2).stinespring().anc_dim, 4);
    }

    #[test]
    fn unitary_completion_contains_isometry() {
        let ch = Channel::<f64>::depolarizing(2);
        let st = ch.stinespring();
        let w = st.unitary_completion().unwrap();
        assert!(w.is_unitary(1e-12));
        for x in 0..2 {
            assert_eq!(w.column(x * st.anc_dim), st.isometry.column(x));
        }
    }

    #[test]
    fn weyl_operators_are_unitary() {
        for (a, b) in [(0, 0), (1, 2), (2, 1)] {
            assert!(weyl::<f64>(3, a, b).is_unitary(1e-14));
        }
    }

    #[test]
    fn json_round_trip() {
        let ch = Channel::<f64>::depolarizing(2);
        let s = serde_json::to_string(&ch).unwrap();
        let back: Channel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
    }
}
