use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::program::{best_program_state, programming_error_with_tol, ProgrammingErrorReport};
use crate::error::{Error, Result};
use crate::linalg::{random::haar_unitary, ComplexMatrix, Schatten};
use crate::quantum::{Branched, Processor, ProgramState};
use crate::sdp::DEFAULT_TOL;
use crate::CMatrix;

/// Slack on `‖T‖∞ ≤ 1`.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Relative eigenvalue cutoff of the Gram matrix below which the map is
/// treated as non-injective.
pub const INJECTIVITY_TOL: f64 = 1e-10;
const PROBE_TARGETS: usize = 32;
const PROBE_SEED: u64 = 0xD1A;

/// `T = (plus + minus) / 2` with both factors unitary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RussoDye {
    pub plus: CMatrix,
    pub minus: CMatrix,
    pub weights: (f64, f64),
}

impl RussoDye {
    pub fn reconstruct(&self) -> CMatrix {
        (&self.plus + &self.minus).scale_real(0.5)
    }
}

/// Splits each singular value as `s = cos θ = (e^{iθ} + e^{-iθ}) / 2`.
pub fn russo_dye_decompose(t: &CMatrix) -> Result<RussoDye> {
    let n = t.require_square()?;
    let svd = t.svd();
    let top = svd.s.first().copied().unwrap_or(0.0);
    if top > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm: top });
    }
    let theta: Vec<f64> = svd.s.iter().map(|&s| s.clamp(-1.0, 1.0).acos()).collect();
    let factor = |sign: f64| {
        let phases: Vec<Complex64> = theta
            .iter()
            .map(|&th| Complex64::from_polar(1.0, sign * th))
            .collect();
        let ad = ComplexMatrix::from_fn(n, n, |i, j| svd.u[(i, j)] * phases[j]);
        &ad * &svd.v.dagger()
    };
    Ok(RussoDye {
        plus: factor(1.0),
        minus: factor(-1.0),
        weights: (0.5, 0.5),
    })
}

/// Images `Φ(E_ij)` of the matrix units under `Φ(σ) = Tr_d[T(σᵀ ⊗ Id)]`,
/// ordered by `i·d + j`. Block `(i, j)` of `T` is exactly `Φ(E_ij)`.
pub fn map_images(t: &CMatrix, d: usize) -> Result<Vec<CMatrix>> {
    let n = t.require_square()?;
    if d == 0 || n % d != 0 {
        return Err(Error::DimensionMismatch {
            context: "map matrix rows divisible by d",
            expected: d,
            found: n,
        });
    }
    let m = n / d;
    Ok((0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            ComplexMatrix::from_fn(m, m, |a, b| t[(i * m + a, j * m + b)])
        })
        .collect())
}

/// Applies `Φ` to `sigma`.
pub fn apply_map(images: &[CMatrix], sigma: &CMatrix) -> CMatrix {
    let d = sigma.rows();
    let m = images[0].rows();
    let mut out = ComplexMatrix::zeros(m, m);
    for i in 0..d {
        for j in 0..d {
            let s = sigma[(i, j)];
            if s != Complex64::zero() {
                out.add_scaled(s, &images[i * d + j]);
            }
        }
    }
    out
}

/// Record of the functional used to find programs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramFinderRecord {
    pub gram_rank: usize,
    /// Smallest Gram eigenvalue relative to the largest.
    pub gram_condition: f64,
    pub probe_targets: usize,
    /// Worst `1 − 1/‖A_U‖₁` over the probe targets.
    pub worst_probe_delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub processor: Processor,
    /// `δ` realized by the constructed functionals (worst over the probe set).
    pub achieved_delta: f64,
    /// `√(2δ)` for the requested `δ`.
    pub predicted_epsilon: f64,
    pub requested_delta: f64,
    /// True when `achieved_delta > requested_delta`.
    pub delta_exceeded: bool,
    pub program_state_finder: ProgramFinderRecord,
    pub russo_dye: RussoDye,
    #[serde(skip)]
    images: Vec<CMatrix>,
    #[serde(skip)]
    gram_inverse: Option<CMatrix>,
}

/// Builds a processor from a contraction `T` on `H_d ⊗ H_m`.
///
/// The processor is controlled on a two-level register over the Russo–Dye
/// factors of `T`, with a second copy of `H_m` for purifying program
/// functionals; its memory is `H_m ⊗ C² ⊗ H_m`, at most `d m³`.
pub fn synthesize_processor(t: &CMatrix, d: usize, delta: f64) -> Result<SynthesisResult> {
    if !(0.0..=1.0).contains(&delta) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1], got {delta}"
        )));
    }
    let images = map_images(t, d)?;
    let m = images[0].rows();
    let rd = russo_dye_decompose(t)?;

    let gram = gram_matrix(&images);
    let eig = gram.eig_hermitian()?;
    let top = eig.values[eig.values.len() - 1].max(0.0);
    let rank = eig
        .values
        .iter()
        .filter(|&&l| l > INJECTIVITY_TOL * top && top > 0.0)
        .count();
    if rank < d * d {
        return Err(Error::NonInjective {
            rank,
            needed: d * d,
        });
    }
    let gram_inverse = eig.map_values(|l| 1.0 / l);

    let processor = Processor::branched(
        d,
        Branched {
            inner: m,
            idle: m,
            blocks: vec![rd.plus.clone(), rd.minus.clone()],
        },
    )?;
    let mut result = SynthesisResult {
        processor,
        achieved_delta: 0.0,
        predicted_epsilon: (2.0 * delta).sqrt(),
        requested_delta: delta,
        delta_exceeded: false,
        program_state_finder: ProgramFinderRecord {
            gram_rank: rank,
            gram_condition: eig.values[0] / top,
            probe_targets: PROBE_TARGETS + 1,
            worst_probe_delta: 0.0,
        },
        russo_dye: rd,
        images,
        gram_inverse: Some(gram_inverse),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut worst = result.functional(&CMatrix::identity(d))?.delta_eff;
    for _ in 0..PROBE_TARGETS {
        let u: CMatrix = haar_unitary(d, &mut rng);
        worst = worst.max(result.functional(&u)?.delta_eff);
    }
    result.achieved_delta = worst;
    result.program_state_finder.worst_probe_delta = worst;
    result.delta_exceeded = worst > delta;
    Ok(result)
}

fn gram_matrix(images: &[CMatrix]) -> CMatrix {
    let n = images.len();
    ComplexMatrix::from_fn(n, n, |k, l| {
        images[l]
            .entries()
            .iter()
            .zip(images[k].entries())
            .fold(Complex64::zero(), |acc, (x, y)| acc + x.conj() * y)
    })
}

/// Functional `A_U` with `Tr(A_U Φ(X)) = q·Tr(Uᵀ X)`, normalized in trace norm.
#[derive(Debug, Clone)]
pub struct ProgramFunctional {
    pub a: CMatrix,
    /// `1/‖A‖₁` before normalization.
    pub q: f64,
    pub delta_eff: f64,
}

/// Which construction produced the chosen program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgramSource {
    /// Purified least-squares functional; guarantees error `≤ √(1 − q²)`.
    Functional,
    /// Top eigenvector of the entanglement-fidelity operator.
    FidelityEigenvector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesizedProgram {
    pub program: ProgramState,
    pub source: ProgramSource,
    pub report: ProgrammingErrorReport,
    /// Error guaranteed by the functional candidate, `√(1 − q²)`.
    pub functional_bound: f64,
    pub q: f64,
    /// True when `q < 1 − δ` for the requested `δ`.
    pub below_requested_quality: bool,
}

impl SynthesisResult {
    pub fn d(&self) -> usize {
        self.processor.d()
    }

    pub fn inner_dim(&self) -> usize {
        self.images[0].rows()
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    /// Least-squares inverse of `Φ` on its image composed with `X ↦ Tr(Uᵀ X)`,
    /// extended by zero on the orthocomplement of the image.
    pub fn functional(&self, u: &CMatrix) -> Result<ProgramFunctional> {
        let d = self.d();
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "target unitary",
                expected: d,
                found: u.rows(),
            });
        }
        let ginv = self.gram_inverse.as_ref().ok_or_else(|| {
            Error::InvalidParameter("synthesis result was deserialized without its map".into())
        })?;
        let rhs: Vec<Complex64> = (0..d * d).map(|k| u[(k / d, k % d)]).collect();
        let c = ginv.apply(&rhs);
        let m = self.inner_dim();
        let mut a = ComplexMatrix::zeros(m, m);
        for (cl, x) in c.iter().zip(&self.images) {
            a.add_scaled(*cl, &x.dagger());
        }
        let norm = a.schatten_norm(Schatten::Trace)?;
        let q = 1.0 / norm;
        Ok(ProgramFunctional {
            a: a.scale_real(q),
            q,
            delta_eff: 1.0 - q,
        })
    }

    /// Program from the purification `Σ √μ_i |α_i⟩|i⟩` of `A_U = Σ μ_i |α_i⟩⟨β_i|`,
    /// with the branch register in `(|0⟩ + |1⟩)/√2`.
    pub fn functional_program(&self, u: &CMatrix) -> Result<(ProgramState, f64)> {
        let f = self.functional(u)?;
        let m = self.inner_dim();
        let svd = f.a.svd();
        let mut xi = vec![Complex64::zero(); m * m];
        for (i, &mu) in svd.s.iter().enumerate() {
            let w = mu.max(0.0).sqrt();
            for a in 0..m {
                xi[a * m + i] += svd.u[(a, i)] * w;
            }
        }
        let super::super::quantum::ProcessorRepresentation::Branched(b) =
            self.processor.representation()
        else {
            unreachable!("synthesized processors are branched")
        };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![Complex64::zero(); b.memory_dim()];
        for i in 0..m {
            for r in 0..2 {
                for c in 0..m {
                    v[b.memory_index(i, r, c)] = xi[i * m + c] * s;
                }
            }
        }
        let v = crate::linalg::vector::normalize(&v)?;
        Ok((ProgramState::new(v, "synth-functional")?, f.q))
    }

    /// Certifies both program candidates for `u` and keeps the better one.
    pub fn program_for(&self, u: &CMatrix) -> Result<SynthesizedProgram> {
        self.program_for_with_tol(u, DEFAULT_TOL)
    }

    pub fn program_for_with_tol(&self, u: &CMatrix, tol: f64) -> Result<SynthesizedProgram> {
        let (phi_f, q) = self.functional_program(u)?;
        let rep_f = programming_error_with_tol(&self.processor, u, &phi_f, tol)?;
        let search = best_program_state(&self.processor, u)?;
        let rep_e = programming_error_with_tol(&self.processor, u, &search.program, tol)?;
        let (program, source, report) = if rep_e.half_diamond_error < rep_f.half_diamond_error {
            (search.program, ProgramSource::FidelityEigenvector, rep_e)
        } else {
            (phi_f, ProgramSource::Functional, rep_f)
        };
        Ok(SynthesizedProgram {
            program,
            source,
            report,
            functional_bound: (1.0 - q.min(1.0).powi(2)).max(0.0).sqrt(),
            q,
            below_requested_quality: q < 1.0 - self.requested_delta,
        })
    }
}
