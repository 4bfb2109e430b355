use num_complex::Complex64;
use num_traits::Zero;

use super::problem::{SdpProblem, Sense};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, ComplexMatrix};
use crate::CMatrix;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;
pub const DEFAULT_DAMPING: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Converged,
    /// Iteration budget exhausted; the solution is the best iterate seen.
    MaxIterations,
}

/// Starting point. `z` defaults to `C - A*(y)`, which must then be positive
/// definite.
#[derive(Debug, Clone)]
pub struct StartPoint {
    pub x: Vec<CMatrix>,
    pub y: Vec<f64>,
    pub z: Option<Vec<CMatrix>>,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub damping: f64,
    pub start: Option<StartPoint>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            damping: DEFAULT_DAMPING,
            start: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Objective values of one iterate, in the caller's sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateRecord {
    pub primal: f64,
    pub dual: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal objective `⟨C, X⟩`.
    pub value: f64,
    /// Dual objective `b·y`.
    pub dual_value: f64,
    pub primal: Vec<CMatrix>,
    pub dual: Vec<f64>,
    pub slack: Vec<CMatrix>,
    pub status: SdpStatus,
    pub iterations: usize,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub history: Vec<IterateRecord>,
}

impl SdpSolution {
    /// The primal variable as one block-diagonal matrix.
    pub fn primal_matrix(&self) -> CMatrix {
        ComplexMatrix::block_diag(&self.primal)
    }
}

/// `(block, row, col, weight)` terms of `A = Σ w E_{row,col}`.
type Terms = Vec<(usize, usize, usize, Complex64)>;

struct Workspace<'a> {
    p: &'a SdpProblem,
    c: Vec<CMatrix>,
    terms: Vec<Terms>,
    b: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let c = match p.sense {
            Sense::Minimize => p.objective.clone(),
            Sense::Maximize => p.objective.iter().map(|m| -m).collect(),
        };
        let terms = p
            .constraints
            .iter()
            .map(|k| {
                let mut t = Terms::new();
                for e in &k.entries {
                    if e.row == e.col {
                        t.push((e.block, e.row, e.row, Complex64::new(e.value.re, 0.0)));
                    } else {
                        t.push((e.block, e.row, e.col, e.value));
                        t.push((e.block, e.col, e.row, e.value.conj()));
                    }
                }
                t
            })
            .collect();
        let b = p.constraints.iter().map(|k| k.rhs).collect();
        Self { p, c, terms, b }
    }

    fn zeros(&self) -> Vec<CMatrix> {
        self.p
            .blocks
            .iter()
            .map(|&n| ComplexMatrix::zeros(n, n))
            .collect()
    }

    fn a_op(&self, x: &[CMatrix]) -> Vec<f64> {
        self.p.constraints.iter().map(|k| k.apply(x)).collect()
    }

    fn a_adj(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out = self.zeros();
        for (k, &yi) in self.p.constraints.iter().zip(y) {
            if yi != 0.0 {
                k.accumulate(yi, &mut out);
            }
        }
        out
    }

    /// Schur complement `M_ij = Re Tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &[CMatrix], zi: &[CMatrix]) -> Vec<f64> {
        let m = self.terms.len();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let mut s = Complex64::zero();
                for &(b, r, sc, w) in &self.terms[i] {
                    for &(b2, r2, s2, w2) in &self.terms[j] {
                        if b == b2 {
                            s += w * w2 * x[b][(sc, r2)] * zi[b][(s2, r)];
                        }
                    }
                }
                out[i * m + j] = s.re;
                out[j * m + i] = s.re;
            }
        }
        out
    }
}

fn inner(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.real_inner(y)).sum()
}

fn frob(a: &[CMatrix]) -> f64 {
    a.iter()
        .map(|m| m.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Largest `α` with `x + α dx ⪰ 0`, infinite when unconstrained.
fn max_step(x: &CMatrix, dx: &CMatrix) -> Result<f64> {
    let l = x.cholesky()?;
    let y = l.solve_lower(dx);
    let t = l.solve_lower(&y.dagger()).dagger().hermitian_part();
    let lmin = t.eigvals_hermitian()?[0];
    Ok(if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    })
}

fn herm(m: &CMatrix) -> CMatrix {
    m.hermitian_part()
}

struct Direction {
    dx: Vec<CMatrix>,
    dy: Vec<f64>,
    dz: Vec<CMatrix>,
}

/// Primal–dual interior point method with the HKM direction and Mehrotra
/// predictor–corrector steps.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let ws = Workspace::new(p);
    let n_total = p.dim() as f64;
    let m = p.constraints.len();
    let norm_b = ws.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = frob(&ws.c);

    let (mut x, mut y, mut z) = match &opts.start {
        Some(s) => {
            if s.x.len() != p.blocks.len() || s.y.len() != m {
                return Err(Error::InvalidParameter(
                    "start point does not match the problem shape".into(),
                ));
            }
            let z = match &s.z {
                Some(z) => z.clone(),
                None => {
                    let ay = ws.a_adj(&s.y);
                    ws.c.iter().zip(&ay).map(|(c, a)| herm(&(c - a))).collect()
                }
            };
            (s.x.clone(), s.y.clone(), z)
        }
        None => {
            let norm_a = p
                .constraints
                .iter()
                .map(|k| {
                    let mut t = ws.zeros();
                    k.accumulate(1.0, &mut t);
                    frob(&t)
                })
                .fold(0.0, f64::max);
            let sq = n_total.sqrt();
            let xi = p
                .constraints
                .iter()
                .map(|k| sq * (1.0 + k.rhs.abs()) / (1.0 + norm_a))
                .fold(1.0, f64::max);
            let eta = (1.0 + norm_c.max(norm_a)) / sq;
            let eta = eta.max(1.0);
            let x = p
                .blocks
                .iter()
                .map(|&n| ComplexMatrix::identity(n).scale_real(xi))
                .collect();
            let z = p
                .blocks
                .iter()
                .map(|&n| ComplexMatrix::identity(n).scale_real(eta))
                .collect();
            (x, vec![0.0; m], z)
        }
    };

    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut history = Vec::new();
    let mut best: Option<(f64, SdpSolution)> = None;

    for iter in 0..=opts.max_iterations {
        let ax = ws.a_op(&x);
        let rp: Vec<f64> = ws.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let ay = ws.a_adj(&y);
        let rd: Vec<CMatrix> = (0..p.blocks.len())
            .map(|k| herm(&(&(&ws.c[k] - &ay[k]) - &z[k])))
            .collect();
        let pobj = inner(&ws.c, &x);
        let dobj: f64 = ws.b.iter().zip(&y).map(|(b, v)| b * v).sum();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let dinf = frob(&rd) / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + 0.5 * (pobj.abs() + dobj.abs()));
        history.push(IterateRecord {
            primal: sign * pobj,
            dual: sign * dobj,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        });

        let merit = gap.max(pinf).max(dinf);
        let converged = merit <= opts.tol;
        if converged
            || iter == opts.max_iterations
            || best.as_ref().is_none_or(|(bm, _)| merit < *bm)
        {
            let sol = SdpSolution {
                value: sign * pobj,
                dual_value: sign * dobj,
                primal: x.clone(),
                dual: y.iter().map(|v| sign * v).collect(),
                slack: z.clone(),
                status: if converged {
                    SdpStatus::Converged
                } else {
                    SdpStatus::MaxIterations
                },
                iterations: iter,
                gap,
                primal_infeasibility: pinf,
                dual_infeasibility: dinf,
                history: Vec::new(),
            };
            if converged {
                return Ok(SdpSolution { history, ..sol });
            }
            if best.as_ref().is_none_or(|(bm, _)| merit < *bm) {
                best = Some((merit, sol));
            }
        }
        if iter == opts.max_iterations {
            break;
        }

        let mu = inner(&x, &z) / n_total;
        let zi = z
            .iter()
            .map(|b| b.inverse_hpd())
            .collect::<Result<Vec<_>>>()
            .map_err(|_| {
                Error::Solver(format!("dual slack lost definiteness at iteration {iter}"))
            })?;
        let mut schur = ws.schur(&x, &zi);
        let diag_max = (0..m).map(|i| schur[i * m + i]).fold(0.0, f64::max);

        let solve_dir = |rc: &[CMatrix], schur: &[f64]| -> Result<Direction> {
            let t: Vec<CMatrix> = (0..p.blocks.len())
                .map(|k| &rc[k] - &herm(&(&(&x[k] * &rd[k]) * &zi[k])))
                .collect();
            let at = ws.a_op(&t);
            let mut dy: Vec<f64> = rp.iter().zip(&at).map(|(r, a)| r - a).collect();
            solve_spd(schur, m, &mut dy)?;
            let ady = ws.a_adj(&dy);
            let dz: Vec<CMatrix> = (0..p.blocks.len())
                .map(|k| herm(&(&rd[k] - &ady[k])))
                .collect();
            let dx: Vec<CMatrix> = (0..p.blocks.len())
                .map(|k| herm(&(&rc[k] - &herm(&(&(&x[k] * &dz[k]) * &zi[k])))))
                .collect();
            Ok(Direction { dx, dy, dz })
        };
        let solve_reg = |rc: &[CMatrix], schur: &mut Vec<f64>| -> Result<Direction> {
            match solve_dir(rc, schur) {
                Ok(d) => Ok(d),
                Err(_) => {
                    // one retry with a tiny diagonal shift for near-singular Schur systems
                    for i in 0..m {
                        schur[i * m + i] += 1e-13 * diag_max.max(1.0);
                    }
                    solve_dir(rc, schur).map_err(|e| {
                        Error::Solver(format!("Newton system failed at iteration {iter}: {e}"))
                    })
                }
            }
        };

        let rc_aff: Vec<CMatrix> = x.iter().map(|b| -b).collect();
        let aff = solve_reg(&rc_aff, &mut schur)?;
        let step = |dx: &[CMatrix], dz: &[CMatrix]| -> Result<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..p.blocks.len() {
                ap = ap.min(max_step(&x[k], &dx[k])?);
                ad = ad.min(max_step(&z[k], &dz[k])?);
            }
            Ok((ap, ad))
        };
        let (ap, ad) =
            step(&aff.dx, &aff.dz).map_err(|e| Error::Solver(format!("step length: {e}")))?;
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let xa: Vec<CMatrix> = (0..x.len())
            .map(|k| {
                let mut t = x[k].clone();
                t.add_scaled(ap.into(), &aff.dx[k]);
                t
            })
            .collect();
        let za: Vec<CMatrix> = (0..z.len())
            .map(|k| {
                let mut t = z[k].clone();
                t.add_scaled(ad.into(), &aff.dz[k]);
                t
            })
            .collect();
        let mu_aff = inner(&xa, &za) / n_total;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        let rc: Vec<CMatrix> = (0..x.len())
            .map(|k| {
                let mut t = zi[k].scale_real(sigma * mu);
                t -= &x[k];
                t -= &herm(&(&(&aff.dx[k] * &aff.dz[k]) * &zi[k]));
                t
            })
            .collect();
        let dir = solve_reg(&rc, &mut schur)?;
        let (ap, ad) =
            step(&dir.dx, &dir.dz).map_err(|e| Error::Solver(format!("step length: {e}")))?;
        let ap = (opts.damping * ap).min(1.0);
        let ad = (opts.damping * ad).min(1.0);
        for k in 0..x.len() {
            x[k].add_scaled(ap.into(), &dir.dx[k]);
            x[k] = herm(&x[k]);
            z[k].add_scaled(ad.into(), &dir.dz[k]);
            z[k] = herm(&z[k]);
        }
        for (yi, d) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * d;
        }
    }

    let (_, sol) = best.expect("at least one iterate");
    Ok(SdpSolution { history, ..sol })
}
