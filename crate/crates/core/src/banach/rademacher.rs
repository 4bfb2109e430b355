use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Schatten};
use crate::CMatrix;

/// Largest family enumerated exactly.
pub const MAX_EXACT_FAMILY: usize = 30;
/// Families up to this size are enumerated in `Auto` mode.
pub const AUTO_EXACT_FAMILY: usize = 20;
const CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpace {
    TraceNorm,
    OperatorNorm,
}

impl NormSpace {
    pub fn norm(self, x: &CMatrix) -> Result<f64> {
        x.schatten_norm(match self {
            NormSpace::TraceNorm => Schatten::Trace,
            NormSpace::OperatorNorm => Schatten::Operator,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RademacherMode {
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
    /// Exact up to `AUTO_EXACT_FAMILY` elements, Monte Carlo beyond.
    Auto {
        samples: usize,
        seed: u64,
    },
}

/// `(E‖Σ ε_i x_i‖²)^{1/2}` against `(Σ ‖x_i‖²)^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    pub family: String,
    pub n: usize,
    pub space: NormSpace,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub exact: bool,
    /// Sign patterns drawn in Monte Carlo mode.
    pub samples: Option<usize>,
    /// Standard error of `lhs` in Monte Carlo mode.
    pub std_error: Option<f64>,
}

/// Rademacher average of a family of matrices in the given norm.
pub fn rademacher_average(
    family: &[CMatrix],
    space: NormSpace,
    mode: RademacherMode,
    description: impl Into<String>,
) -> Result<TypeEstimate> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty Rademacher family".into()))?;
    for x in family {
        if x.rows() != first.rows() || x.cols() != first.cols() {
            return Err(Error::DimensionMismatch {
                context: "Rademacher family",
                expected: first.rows(),
                found: x.rows(),
            });
        }
    }
    let norms = family
        .iter()
        .map(|x| space.norm(x))
        .collect::<Result<Vec<_>>>()?;
    let signed_norm = |signs: &[f64]| -> Result<f64> {
        let mut s = ComplexMatrix::zeros(first.rows(), first.cols());
        for (x, &e) in family.iter().zip(signs) {
            s.add_scaled(e.into(), x);
        }
        space.norm(&s)
    };
    rademacher_from_oracle(family.len(), &norms, signed_norm, space, mode, description)
}

/// Rademacher average driven by a norm oracle on sign patterns, for images
/// that are never materialized.
pub fn rademacher_from_oracle(
    n: usize,
    norms: &[f64],
    signed_norm: impl Fn(&[f64]) -> Result<f64> + Sync,
    space: NormSpace,
    mode: RademacherMode,
    description: impl Into<String>,
) -> Result<TypeEstimate> {
    if n == 0 || norms.len() != n {
        return Err(Error::InvalidParameter(
            "family size and norm list disagree or are empty".into(),
        ));
    }
    let rhs_sq: f64 = norms.iter().map(|x| x * x).sum();
    let exact = match mode {
        RademacherMode::Exact => true,
        RademacherMode::MonteCarlo { .. } => false,
        RademacherMode::Auto { .. } => n <= AUTO_EXACT_FAMILY,
    };
    let (mean_sq, samples, std_error) = if exact {
        if n > MAX_EXACT_FAMILY {
            return Err(Error::InvalidParameter(format!(
                "exact enumeration limited to {MAX_EXACT_FAMILY} elements, got {n}"
            )));
        }
        (exact_mean_square(n, &signed_norm)?, None, None)
    } else {
        let (samples, seed) = match mode {
            RademacherMode::MonteCarlo { samples, seed }
            | RademacherMode::Auto { samples, seed } => (samples, seed),
            RademacherMode::Exact => unreachable!(),
        };
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "Monte Carlo needs at least two samples".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let patterns: Vec<Vec<f64>> = (0..samples)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let values = patterns
            .par_iter()
            .map(|s| signed_norm(s).map(|v| v * v))
            .collect::<Result<Vec<f64>>>()?;
        let mean = values.iter().sum::<f64>() / samples as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let se_mean = (var / samples as f64).sqrt();
        let lhs = mean.sqrt();
        (
            mean,
            Some(samples),
            Some(if lhs > 0.0 {
                se_mean / (2.0 * lhs)
            } else {
                0.0
            }),
        )
    };
    let lhs = mean_sq.sqrt();
    let rhs = rhs_sq.sqrt();
    Ok(TypeEstimate {
        family: description.into(),
        n,
        space,
        lhs,
        rhs,
        // the quotient of squares keeps integer cases exact
        ratio: if rhs_sq > 0.0 {
            (mean_sq / rhs_sq).sqrt()
        } else {
            0.0
        },
        exact,
        samples,
        std_error,
    })
}

/// Mean of `‖Σ ε_i x_i‖²` over all patterns with `ε_0 = +1`, which covers
/// every pattern up to a global sign. Chunks are summed in a fixed order so
/// the result does not depend on scheduling.
fn exact_mean_square(
    n: usize,
    signed_norm: &(impl Fn(&[f64]) -> Result<f64> + Sync),
) -> Result<f64> {
    let total: u64 = 1 << (n - 1);
    let chunks = total.div_ceil(CHUNK as u64);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut signs = vec![1.0; n];
            let mut acc = 0.0;
            let end = ((c + 1) * CHUNK as u64).min(total);
            for pattern in c * CHUNK as u64..end {
                for (i, s) in signs.iter_mut().enumerate().skip(1) {
                    *s = if (pattern >> (i - 1)) & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                }
                let v = signed_norm(&signs)?;
                acc += v * v;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(partial.iter().sum::<f64>() / total as f64)
}

/// The diagonal family `{|i⟩⟨i|}` of `d × d` matrix units.
pub fn diagonal_family(d: usize) -> Vec<CMatrix> {
    (0..d)
        .map(|i| {
            let mut diag = vec![0.0; d];
            diag[i] = 1.0;
            ComplexMatrix::from_real_diag(&diag)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::ginibre;

    #[test]
    fn diagonal_family_trace_norm_ratio_is_sqrt_d() {
        for d in 1..=8 {
            let e = rademacher_average(
                &diagonal_family(d),
                NormSpace::TraceNorm,
                RademacherMode::Exact,
                "diag",
            )
            .unwrap();
            assert_eq!(e.lhs, d as f64);
            assert_eq!(e.rhs, (d as f64).sqrt());
            assert_eq!(e.ratio, (d as f64).sqrt());
        }
    }

    #[test]
    fn diagonal_family_operator_norm_ratio() {
        let d = 5;
        let e = rademacher_average(
            &diagonal_family(d),
            NormSpace::OperatorNorm,
            RademacherMode::Exact,
            "diag",
        )
        .unwrap();
        assert_eq!(e.lhs, 1.0);
        assert!((e.ratio - 1.0 / (d as f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_element_ratio_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: CMatrix = ginibre(3, 3, &mut rng);
        let e =
            rademacher_average(&[x], NormSpace::TraceNorm, RademacherMode::Exact, "one").unwrap();
        assert!((e.ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fam: Vec<CMatrix> = (0..10).map(|_| ginibre(3, 3, &mut rng)).collect();
        let exact =
            rademacher_average(&fam, NormSpace::OperatorNorm, RademacherMode::Exact, "g").unwrap();
        let mc = rademacher_average(
            &fam,
            NormSpace::OperatorNorm,
            RademacherMode::MonteCarlo {
                samples: 4000,
                seed: 3,
            },
            "g",
        )
        .unwrap();
        let se = mc.std_error.unwrap();
        assert!(
            (mc.lhs - exact.lhs).abs() <= 3.0 * se,
            "{} vs {} (se {se})",
            mc.lhs,
            exact.lhs
        );
    }

    #[test]
    fn auto_mode_switches_and_limits_apply() {
        let fam = diagonal_family(2);
        let auto = rademacher_average(
            &fam,
            NormSpace::TraceNorm,
            RademacherMode::Auto {
                samples: 10,
                seed: 0,
            },
            "d",
        )
        .unwrap();
        assert!(auto.exact);
        let norms = vec![1.0; 31];
        let r = rademacher_from_oracle(
            31,
            &norms,
            |_| Ok(1.0),
            NormSpace::TraceNorm,
            RademacherMode::Exact,
            "big",
        );
        assert!(r.is_err());
        assert!(
            rademacher_average(&[], NormSpace::TraceNorm, RademacherMode::Exact, "empty").is_err()
        );
    }
}
