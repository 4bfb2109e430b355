use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::haar_unitary;
use crate::quantum::{Branched, Processor};
use crate::CMatrix;

pub const DEFAULT_CERTIFY_SAMPLES: usize = 10_000;
pub const DEFAULT_MAX_CANDIDATES: usize = 20_000;
const MAX_CERTIFY_ROUNDS: u64 = 16;

/// Empirical covering certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetCertification {
    pub samples: usize,
    pub max_residual: f64,
}

/// Finite set of unitaries covering `U(d)` at operator-norm resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryNet {
    pub d: usize,
    pub resolution: f64,
    pub members: Vec<CMatrix>,
    pub certification: NetCertification,
}

impl UnitaryNet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether the sampled covering radius stayed within the resolution.
    pub fn certified(&self) -> bool {
        self.certification.max_residual <= self.resolution
    }

    /// Index and distance of the nearest member.
    pub fn nearest(&self, u: &CMatrix) -> (usize, f64) {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| (i, op_distance(u, m)))
            .fold(
                (0, f64::INFINITY),
                |best, c| if c.1 < best.1 { c } else { best },
            )
    }

    /// Checks member dimensions and unitarity.
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidParameter("net has no members".into()));
        }
        for m in &self.members {
            if m.rows() != self.d || m.cols() != self.d {
                return Err(Error::DimensionMismatch {
                    context: "net member",
                    expected: self.d,
                    found: m.rows(),
                });
            }
            if !m.is_unitary(1e-9) {
                return Err(Error::NotUnitary {
                    deviation: m.isometry_deviation(),
                });
            }
        }
        Ok(())
    }
}

/// `‖U − V‖_∞` for unitaries, from `‖U − V‖² = 2 − λ_min(W + W†)`, `W = V†U`.
pub fn op_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    if u.rows() == 2 {
        return op_distance_2(u, v);
    }
    let w = &v.dagger() * u;
    let h = &w + &w.dagger();
    let lmin = h.eigvals_hermitian().expect("Hermitian by construction")[0];
    (2.0 - lmin).max(0.0).sqrt()
}

/// Allocation-free qubit case.
fn op_distance_2(u: &CMatrix, v: &CMatrix) -> f64 {
    let (u, v) = (u.entries(), v.entries());
    // W = V†U, row-major
    let w = |i: usize, j: usize| v[i].conj() * u[j] + v[2 + i].conj() * u[2 + j];
    let a = 2.0 * w(0, 0).re;
    let b = 2.0 * w(1, 1).re;
    let c = (w(0, 1) + w(1, 0).conj()).norm();
    let lmin = 0.5 * (a + b) - (0.25 * (a - b) * (a - b) + c * c).sqrt();
    (2.0 - lmin).max(0.0).sqrt()
}

type Cell = [i64; 4];

/// Spatial hash over the first-column coordinates. Entries of `U − V` are
/// bounded by `‖U − V‖`, so every member within `ε` sits in a neighbouring
/// cell of width `ε`.
struct Grid {
    width: f64,
    cells: FxHashMap<Cell, Vec<u32>>,
    /// Qubit members packed inline, so the hot loop avoids the heap.
    packed: Vec<[f64; 8]>,
}

fn pack(u: &CMatrix) -> [f64; 8] {
    let e = u.entries();
    [
        e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im,
    ]
}

/// Whether `‖U − V‖ ≤ ε` for packed qubit unitaries, i.e.
/// `λ_min(W + W†) ≥ 2 − ε²` with `W = V†U`, decided without square roots.
#[inline]
fn within_2(u: &[f64; 8], v: &[f64; 8], threshold: f64) -> bool {
    // W_ij = Σ_k conj(V_ki) U_kj
    let w = |i: usize, j: usize| {
        let (a, b) = ((2 * i, 2 * j), (4 + 2 * i, 4 + 2 * j));
        let re =
            v[a.0] * u[a.1] + v[a.0 + 1] * u[a.1 + 1] + v[b.0] * u[b.1] + v[b.0 + 1] * u[b.1 + 1];
        let im =
            v[a.0] * u[a.1 + 1] - v[a.0 + 1] * u[a.1] + v[b.0] * u[b.1 + 1] - v[b.0 + 1] * u[b.1];
        (re, im)
    };
    let a = 2.0 * w(0, 0).0;
    let b = 2.0 * w(1, 1).0;
    let (w01, w10) = (w(0, 1), w(1, 0));
    let c2 = (w01.0 + w10.0).powi(2) + (w01.1 - w10.1).powi(2);
    let mid = 0.5 * (a + b) - threshold;
    mid >= 0.0 && mid * mid >= 0.25 * (a - b) * (a - b) + c2
}

impl Grid {
    fn new(width: f64) -> Self {
        Self {
            width,
            cells: FxHashMap::default(),
            packed: Vec::new(),
        }
    }

    fn key(&self, u: &CMatrix) -> Cell {
        let c = [u[(0, 0)].re, u[(0, 0)].im, u[(1, 0)].re, u[(1, 0)].im];
        c.map(|x| (x / self.width).floor() as i64)
    }

    fn insert(&mut self, u: &CMatrix, idx: usize) {
        self.cells.entry(self.key(u)).or_default().push(idx as u32);
        if u.rows() == 2 {
            self.packed.push(pack(u));
        }
    }

    fn neighbours(&self, u: &CMatrix) -> impl Iterator<Item = usize> + '_ {
        let k = self.key(u);
        (0..81usize).flat_map(move |o| {
            let off = [o % 3, (o / 3) % 3, (o / 9) % 3, o / 27].map(|x| x as i64 - 1);
            let cell = [k[0] + off[0], k[1] + off[1], k[2] + off[2], k[3] + off[3]];
            self.cells
                .get(&cell)
                .into_iter()
                .flatten()
                .map(|&i| i as usize)
        })
    }

    fn covers(&self, u: &CMatrix, members: &[CMatrix], eps: f64) -> bool {
        if u.rows() == 2 {
            let pu = pack(u);
            let threshold = 2.0 - eps * eps;
            return self
                .neighbours(u)
                .any(|i| within_2(&pu, &self.packed[i], threshold));
        }
        self.neighbours(u)
            .any(|i| op_distance(u, &members[i]) <= eps)
    }

    /// Smallest distance to a member found in the neighbouring cells.
    fn nearby_min(&self, u: &CMatrix, members: &[CMatrix]) -> f64 {
        self.neighbours(u)
            .map(|i| op_distance(u, &members[i]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Greedy random covering: Haar candidates join the net when farther than
/// `eps` from every member; the run stops after `max_candidates` consecutive
/// covered draws and is then certified on fresh samples.
///
/// `max_residual` is `∞` when no batch came back covered within the round
/// limit; `certified()` is then false.
pub fn build_epsilon_net(
    d: usize,
    eps: f64,
    seed: u64,
    max_candidates: usize,
) -> Result<UnitaryNet> {
    build_epsilon_net_with(d, eps, seed, max_candidates, DEFAULT_CERTIFY_SAMPLES)
}

pub fn build_epsilon_net_with(
    d: usize,
    eps: f64,
    seed: u64,
    max_candidates: usize,
    certify_samples: usize,
) -> Result<UnitaryNet> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "net dimension must be >= 2, got {d}"
        )));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "net resolution must lie in (0, 2), got {eps}"
        )));
    }
    if max_candidates == 0 {
        return Err(Error::InvalidParameter(
            "max_candidates must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<CMatrix> = Vec::new();
    let mut grid = Grid::new(eps);
    let mut covered_run = 0;
    while covered_run < max_candidates {
        let u: CMatrix = haar_unitary(d, &mut rng);
        if grid.covers(&u, &members, eps) {
            covered_run += 1;
        } else {
            grid.insert(&u, members.len());
            members.push(u);
            covered_run = 0;
        }
    }

    // Uncovered certification samples join the net and a fresh batch is
    // drawn; the reported residual is that of the last batch.
    let mut max_residual = f64::INFINITY;
    for stream in 1..=MAX_CERTIFY_ROUNDS {
        let mut cert_rng = ChaCha8Rng::seed_from_u64(seed);
        cert_rng.set_stream(stream);
        let samples: Vec<CMatrix> = (0..certify_samples)
            .map(|_| haar_unitary(d, &mut cert_rng))
            .collect();
        let nearest: Vec<f64> = samples
            .par_iter()
            .map(|u| {
                let near = grid.nearby_min(u, &members);
                if near <= eps {
                    near
                } else {
                    members
                        .iter()
                        .map(|m| op_distance(u, m))
                        .fold(f64::INFINITY, f64::min)
                }
            })
            .collect();
        max_residual = nearest.iter().copied().fold(0.0, f64::max);
        if max_residual <= eps {
            break;
        }
        for (u, &r) in samples.into_iter().zip(&nearest) {
            if r > eps && !grid.covers(&u, &members, eps) {
                grid.insert(&u, members.len());
                members.push(u);
            }
        }
    }

    Ok(UnitaryNet {
        d,
        resolution: eps,
        members,
        certification: NetCertification {
            samples: certify_samples,
            max_residual,
        },
    })
}

/// The controlled unitary `Σ_i U_i ⊗ |i⟩⟨i|` over the net members.
pub fn build_controlled_processor(net: &UnitaryNet) -> Result<Processor> {
    net.validate()?;
    Processor::branched(
        net.d,
        Branched {
            inner: 1,
            idle: 1,
            blocks: net.members.clone(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn packed_test_matches_op_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let u: CMatrix = haar_unitary(2, &mut rng);
            let v: CMatrix = haar_unitary(2, &mut rng);
            let dist = op_distance(&u, &v);
            for eps in [0.25, 0.5, 1.0, 1.5] {
                if (dist - eps).abs() > 1e-9 {
                    assert_eq!(within_2(&pack(&u), &pack(&v), 2.0 - eps * eps), dist <= eps);
                }
            }
        }
    }

    #[test]
    fn op_distance_matches_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2, 3] {
            let u: CMatrix = haar_unitary(d, &mut rng);
            let v: CMatrix = haar_unitary(d, &mut rng);
            let direct = (&u - &v).singular_values()[0];
            assert!((op_distance(&u, &v) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_net_is_small_and_certified() {
        let net = build_epsilon_net_with(2, 1.9, 3, 2000, 2000).unwrap();
        assert!(net.len() <= 6, "{} members", net.len());
        assert!(
            net.certified(),
            "residual {}",
            net.certification.max_residual
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_epsilon_net(1, 0.5, 0, 10).is_err());
        assert!(build_epsilon_net(2, 2.0, 0, 10).is_err());
        assert!(build_epsilon_net(2, 0.5, 0, 0).is_err());
    }

    #[test]
    fn controlled_processor_two_blocks() {
        let x =
            ComplexMatrix::new(2, 2, vec![0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]).unwrap();
        let net = UnitaryNet {
            d: 2,
            resolution: 1.0,
            members: vec![CMatrix::identity(2), x.clone()],
            certification: NetCertification {
                samples: 0,
                max_residual: 0.0,
            },
        };
        let p = build_controlled_processor(&net).unwrap();
        assert_eq!((p.d(), p.m()), (2, 2));
        let v = p.joint_unitary().unwrap().unwrap();
        // data ⊗ memory ordering: V = Id ⊗ |0⟩⟨0| + X ⊗ |1⟩⟨1|
        let expect = &CMatrix::identity(2)
            .tensor(&CMatrix::from_real_diag(&[1.0, 0.0]))
            .unwrap()
            + &x.tensor(&CMatrix::from_real_diag(&[0.0, 1.0])).unwrap();
        assert_eq!(v, expect);
        let single = UnitaryNet {
            members: vec![CMatrix::identity(2)],
            ..net
        };
        let p1 = build_controlled_processor(&single).unwrap();
        assert_eq!(p1.joint_unitary().unwrap().unwrap(), CMatrix::identity(2));
    }
}
