use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{ginibre, random_unit_vector};
use crate::linalg::{ComplexMatrix, Schatten};
use crate::quantum::{Processor, ProcessorRepresentation};
use crate::CMatrix;

pub const DEFAULT_DISTORTION_SAMPLES: usize = 2000;
/// Slack on complete contractivity.
pub const CONTRACTIVITY_TOL: f64 = 1e-8;

/// Whether `σ` enters the correspondence transposed.
///
/// `Keep` is `Φ(σ) = Tr_d[V(σᵀ ⊗ Id)]`. `Drop` omits the transpose, which
/// turns the controlled-unitary map into `σ ↦ Σ_i Tr[U_i σ]|i⟩⟨i|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transpose {
    #[default]
    Keep,
    Drop,
}

/// `Φ_V : S_1(H_d) → B(H_m)` for a block-structured `V`.
///
/// `V` is stored as blocks `W_r` on `H_d ⊗ H_k` repeated over an idle factor,
/// with memory index `(i·R + r)·idle + c`; a dense `V` is the single-block
/// case. `Φ_V(σ)` is then block diagonal up to that permutation.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    d: usize,
    inner: usize,
    idle: usize,
    blocks: Vec<CMatrix>,
    convention: Transpose,
    label: String,
}

impl EmbeddingMap {
    /// Map of an arbitrary `(d·m) × (d·m)` matrix.
    pub fn from_matrix(v: CMatrix, d: usize) -> Result<Self> {
        let n = v.require_square()?;
        if d == 0 || n % d != 0 {
            return Err(Error::DimensionMismatch {
                context: "matrix size divisible by d",
                expected: d,
                found: n,
            });
        }
        Ok(Self {
            d,
            inner: n / d,
            idle: 1,
            blocks: vec![v],
            convention: Transpose::Keep,
            label: format!("matrix(d={d},m={})", n / d),
        })
    }

    pub fn with_convention(mut self, convention: Transpose) -> Self {
        self.convention = convention;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Dimension of the target `B(H_m)`.
    pub fn m(&self) -> usize {
        self.inner * self.blocks.len() * self.idle
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn convention(&self) -> Transpose {
        self.convention
    }

    fn coefficient(&self, sigma: &CMatrix, i: usize, j: usize) -> Complex64 {
        match self.convention {
            Transpose::Keep => sigma[(i, j)],
            Transpose::Drop => sigma[(j, i)],
        }
    }

    /// `Φ_{W_r}(σ)` on `H_k`.
    pub fn block_image(&self, r: usize, sigma: &CMatrix) -> CMatrix {
        let (d, k) = (self.d, self.inner);
        let w = &self.blocks[r];
        let mut out = ComplexMatrix::zeros(k, k);
        for i in 0..d {
            for j in 0..d {
                let s = self.coefficient(sigma, i, j);
                if s == Complex64::zero() {
                    continue;
                }
                for a in 0..k {
                    for b in 0..k {
                        out[(a, b)] += w[(i * k + a, j * k + b)] * s;
                    }
                }
            }
        }
        out
    }

    fn check_input(&self, sigma: &CMatrix) -> Result<()> {
        if sigma.rows() != self.d || sigma.cols() != self.d {
            return Err(Error::DimensionMismatch {
                context: "embedding input",
                expected: self.d,
                found: sigma.rows(),
            });
        }
        Ok(())
    }

    /// `Φ_V(σ)` as a full `m × m` matrix.
    pub fn apply(&self, sigma: &CMatrix) -> Result<CMatrix> {
        self.check_input(sigma)?;
        let m = self.m();
        crate::linalg::check_dim(m)?;
        let branches = self.blocks.len();
        let mut out = ComplexMatrix::zeros(m, m);
        for r in 0..branches {
            let img = self.block_image(r, sigma);
            for a in 0..self.inner {
                for b in 0..self.inner {
                    for c in 0..self.idle {
                        out[(
                            (a * branches + r) * self.idle + c,
                            (b * branches + r) * self.idle + c,
                        )] = img[(a, b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `‖Φ_V(σ)‖_∞`, computed block by block.
    pub fn image_norm(&self, sigma: &CMatrix) -> Result<f64> {
        self.check_input(sigma)?;
        let mut best = 0.0f64;
        for r in 0..self.blocks.len() {
            let img = self.block_image(r, sigma);
            best = best.max(img.schatten_norm(Schatten::Operator)?);
        }
        Ok(best)
    }

    /// `‖V‖_∞`, which is the completely bounded norm of `Φ_V`.
    pub fn cb_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|w| w.schatten_norm(Schatten::Operator).expect("operator norm"))
            .fold(0.0, f64::max)
    }

    /// Samples `‖Φ(σ)‖_∞ / ‖σ‖_1` over trace-norm-one `σ`, alternating
    /// rank-one `|ψ⟩⟨γ|` and normalized Ginibre draws.
    pub fn distortion(&self, samples: usize, seed: u64) -> Result<EmbeddingReport> {
        if samples == 0 {
            return Err(Error::InvalidParameter(
                "distortion needs at least one sample".into(),
            ));
        }
        let d = self.d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<CMatrix> = (0..samples)
            .map(|k| {
                if k % 2 == 0 {
                    let psi: Vec<Complex64> = random_unit_vector(d, &mut rng);
                    let gamma: Vec<Complex64> = random_unit_vector(d, &mut rng);
                    ComplexMatrix::outer(&psi, &gamma)
                } else {
                    let g: CMatrix = ginibre(d, d, &mut rng);
                    let n = g.schatten_norm(Schatten::Trace).expect("trace norm");
                    g.scale_real(1.0 / n)
                }
            })
            .collect();
        let ratios: Vec<f64> = inputs
            .par_iter()
            .map(|s| self.image_norm(s))
            .collect::<Result<_>>()?;
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        Ok(EmbeddingReport {
            processor: self.label.clone(),
            sampled_min_ratio: min,
            sampled_max_ratio: max,
            epsilon_used: (1.0 - min * min).max(0.0),
            samples,
        })
    }
}

/// Sampled distortion of `Φ_V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub processor: String,
    pub sampled_min_ratio: f64,
    pub sampled_max_ratio: f64,
    /// `1 − min²`, the accuracy this lower ratio corresponds to.
    pub epsilon_used: f64,
    pub samples: usize,
}

impl EmbeddingReport {
    /// `1 − min`, the distortion in the form `‖Φ(σ)‖ ≥ (1 − δ)‖σ‖`.
    pub fn delta(&self) -> f64 {
        (1.0 - self.sampled_min_ratio).max(0.0)
    }

    pub fn contractive(&self) -> bool {
        self.sampled_max_ratio <= 1.0 + CONTRACTIVITY_TOL
    }
}

fn kind(p: &Processor) -> &'static str {
    match p.representation() {
        ProcessorRepresentation::Kraus(_) => "dilated",
        ProcessorRepresentation::Unitary(_) => "unitary",
        ProcessorRepresentation::Branched(_) => "controlled",
    }
}

/// `Φ_V` of a processor; channels with more than one Kraus operator are
/// replaced by the unitary completion of their Stinespring dilation, whose
/// memory is `H_m ⊗ H_anc`.
pub fn embedding_map(p: &Processor) -> Result<EmbeddingMap> {
    let d = p.d();
    let label = format!("{}(d={d},m={})", kind(p), p.m());
    let mut map = match p.representation() {
        ProcessorRepresentation::Unitary(v) => EmbeddingMap::from_matrix(v.clone(), d)?,
        ProcessorRepresentation::Branched(b) => EmbeddingMap {
            d,
            inner: b.inner,
            idle: b.idle,
            blocks: b.blocks.clone(),
            convention: Transpose::Keep,
            label: String::new(),
        },
        ProcessorRepresentation::Kraus(c) => {
            let v = c.stinespring().unitary_completion()?;
            EmbeddingMap::from_matrix(v, d)?
        }
    };
    map.label = label;
    Ok(map)
}

pub fn embedding_map_with(p: &Processor, convention: Transpose) -> Result<EmbeddingMap> {
    Ok(embedding_map(p)?.with_convention(convention))
}

pub fn cb_norm(p: &Processor) -> Result<f64> {
    Ok(embedding_map(p)?.cb_norm())
}

pub fn distortion(p: &Processor, samples: usize, seed: u64) -> Result<EmbeddingReport> {
    embedding_map(p)?.distortion(samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::haar_unitary;
    use crate::linalg::{tensor, Subsystem};
    use crate::processors::{
        build_controlled_processor, build_teleportation_processor, NetCertification, UnitaryNet,
    };

    fn net_of(members: Vec<CMatrix>) -> UnitaryNet {
        UnitaryNet {
            d: members[0].rows(),
            resolution: 1.0,
            members,
            certification: NetCertification {
                samples: 0,
                max_residual: 0.0,
            },
        }
    }

    #[test]
    fn identity_processor_gives_trace_times_identity() {
        let p = Processor::unitary(CMatrix::identity(6), 2, 3).unwrap();
        let map = embedding_map(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: CMatrix = ginibre(2, 2, &mut rng);
        let expect = CMatrix::identity(3).scale(s.trace());
        assert!(map.apply(&s).unwrap().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn controlled_processor_map_is_diagonal_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let members: Vec<CMatrix> = (0..3).map(|_| haar_unitary(2, &mut rng)).collect();
        let p = build_controlled_processor(&net_of(members.clone())).unwrap();
        let s: CMatrix = ginibre(2, 2, &mut rng);
        let keep = embedding_map(&p).unwrap().apply(&s).unwrap();
        let drop = embedding_map_with(&p, Transpose::Drop)
            .unwrap()
            .apply(&s)
            .unwrap();
        for (i, u) in members.iter().enumerate() {
            assert!((keep[(i, i)] - (u * &s.transpose()).trace()).norm() < 1e-13);
            assert!((drop[(i, i)] - (u * &s).trace()).norm() < 1e-13);
        }
        assert!(keep.is_diagonal());
    }

    #[test]
    fn index_loop_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: CMatrix = haar_unitary(6, &mut rng);
        let map = EmbeddingMap::from_matrix(v.clone(), 2).unwrap();
        let s: CMatrix = ginibre(2, 2, &mut rng);
        let direct = (&v * &tensor(&s.transpose(), &CMatrix::identity(3)).unwrap())
            .partial_trace((2, 3), Subsystem::A)
            .unwrap();
        assert!(map.apply(&s).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn branched_map_matches_dense_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = crate::quantum::Branched {
            inner: 2,
            idle: 2,
            blocks: vec![haar_unitary(4, &mut rng), haar_unitary(4, &mut rng)],
        };
        let p = Processor::branched(2, b).unwrap();
        let dense = Processor::unitary(p.joint_unitary().unwrap().unwrap(), 2, 8).unwrap();
        let s: CMatrix = ginibre(2, 2, &mut rng);
        let a = embedding_map(&p).unwrap().apply(&s).unwrap();
        let b = embedding_map(&dense).unwrap().apply(&s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-13);
        let na = embedding_map(&p).unwrap().image_norm(&s).unwrap();
        assert!((na - b.schatten_norm(Schatten::Operator).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cb_norm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: CMatrix = haar_unitary(4, &mut rng);
        assert!(
            (cb_norm(&Processor::unitary(v.clone(), 2, 2).unwrap()).unwrap() - 1.0).abs() < 1e-12
        );
        let half = EmbeddingMap::from_matrix(v.scale_real(0.5), 2).unwrap();
        assert!((half.cb_norm() - 0.5).abs() < 1e-12);
        let tp = build_teleportation_processor(2).unwrap();
        assert!((cb_norm(&tp).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_is_not_an_embedding() {
        let p = Processor::unitary(CMatrix::identity(4), 2, 2).unwrap();
        let r = distortion(&p, 200, 6).unwrap();
        // |Tr σ| is small on generic trace-norm-one inputs
        assert!(r.sampled_min_ratio < 0.05, "{}", r.sampled_min_ratio);
        let traceless = CMatrix::from_real_diag(&[0.5, -0.5]);
        assert!(embedding_map(&p).unwrap().image_norm(&traceless).unwrap() < 1e-15);
    }

    #[test]
    fn teleportation_distortion_respects_accuracy() {
        let p = build_teleportation_processor(2).unwrap();
        let r = distortion(&p, 400, 7).unwrap();
        assert!(r.sampled_min_ratio >= 0.5 - 1e-6, "{}", r.sampled_min_ratio);
        assert!(r.contractive());
    }
}
