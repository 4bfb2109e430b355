use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distances::{channel_distance, DistanceMethod};
use crate::error::{Error, Result};
use crate::linalg::{random::random_unit_vector, vector, ComplexMatrix};
use crate::quantum::{Channel, Processor, ProcessorRepresentation, ProgramState};
use crate::sdp::DEFAULT_TOL;
use crate::CMatrix;

/// Relative width of the top eigenspace treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgrammingErrorReport {
    pub target: CMatrix,
    pub best_program: ProgramState,
    pub half_diamond_error: f64,
    pub method: DistanceMethod,
    /// False when the SDP stopped at its iteration cap.
    pub certified: bool,
}

/// Half diamond distance between the program channel and `U(·)U†`.
pub fn programming_error(
    p: &Processor,
    u: &CMatrix,
    phi: &ProgramState,
) -> Result<ProgrammingErrorReport> {
    programming_error_with_tol(p, u, phi, DEFAULT_TOL)
}

pub fn programming_error_with_tol(
    p: &Processor,
    u: &CMatrix,
    phi: &ProgramState,
    tol: f64,
) -> Result<ProgrammingErrorReport> {
    if u.rows() != p.d() || u.cols() != p.d() {
        return Err(Error::DimensionMismatch {
            context: "target unitary",
            expected: p.d(),
            found: u.rows(),
        });
    }
    let induced = p.induced_channel(phi)?;
    let target = Channel::unitary(u.clone())?;
    let r = channel_distance(&induced, &target, tol)?;
    Ok(ProgrammingErrorReport {
        target: u.clone(),
        best_program: phi.clone(),
        half_diamond_error: r.value,
        method: r.method,
        certified: r.certified(),
    })
}

/// Outcome of the entanglement-fidelity program search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramSearch {
    pub program: ProgramState,
    /// `⟨φ|R_U|φ⟩`, the entanglement fidelity of the program channel with `U`.
    pub entanglement_fidelity: f64,
    /// Dimension of the top eigenspace of `R_U`.
    pub top_multiplicity: usize,
    pub degenerate: bool,
}

/// Coefficients `t[row][s] = Tr(U† M_{row,s})` of the program channel's
/// Kraus operators `L_row(φ) = Σ_s φ_s M_{row,s}`, so that the entanglement
/// fidelity is `‖t φ‖² / d²`.
fn fidelity_rows(p: &Processor, u: &CMatrix) -> Result<Vec<Vec<Complex64>>> {
    let (d, m) = (p.d(), p.m());
    let ud = u.conj();
    let from_kraus = |k: &CMatrix, rows: &mut Vec<Vec<Complex64>>| {
        for j in 0..m {
            rows.push(
                (0..m)
                    .map(|s| {
                        let mut t = Complex64::zero();
                        for a in 0..d {
                            for b in 0..d {
                                t += ud[(a, b)] * k[(a * m + j, b * m + s)];
                            }
                        }
                        t
                    })
                    .collect(),
            );
        }
    };
    let mut rows = Vec::new();
    match p.representation() {
        ProcessorRepresentation::Kraus(c) => {
            c.kraus().iter().for_each(|k| from_kraus(k, &mut rows))
        }
        ProcessorRepresentation::Unitary(v) => from_kraus(v, &mut rows),
        ProcessorRepresentation::Branched(b) => {
            let inner = b.inner;
            for (r, w) in b.blocks.iter().enumerate() {
                for c in 0..b.idle {
                    for k in 0..inner {
                        let mut row = vec![Complex64::zero(); m];
                        for s in 0..inner {
                            let mut t = Complex64::zero();
                            for a in 0..d {
                                for bb in 0..d {
                                    t += ud[(a, bb)] * w[(a * inner + k, bb * inner + s)];
                                }
                            }
                            row[b.memory_index(s, r, c)] = t;
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// `R_U` with `F_e(φ) = ⟨φ|R_U|φ⟩`.
pub fn fidelity_operator(p: &Processor, u: &CMatrix) -> Result<CMatrix> {
    let m = p.m();
    crate::linalg::check_dim(m)?;
    let rows = fidelity_rows(p, u)?;
    let scale = 1.0 / (p.d() * p.d()) as f64;
    let mut r = ComplexMatrix::zeros(m, m);
    for row in &rows {
        for s in 0..m {
            if row[s] == Complex64::zero() {
                continue;
            }
            for s2 in 0..m {
                r[(s, s2)] += row[s].conj() * row[s2] * scale;
            }
        }
    }
    Ok(r.hermitian_part())
}

/// Program maximizing the entanglement fidelity with `U`.
///
/// Ties inside a degenerate top eigenspace are broken by minimizing the
/// Hilbert–Schmidt distance between the Choi matrices of the program channel
/// and of `U`, started from a fixed-seed point of the eigenspace.
pub fn best_program_state(p: &Processor, u: &CMatrix) -> Result<ProgramSearch> {
    if u.rows() != p.d() || !u.is_unitary(1e-9) {
        return Err(Error::InvalidParameter(
            "target must be a d×d unitary".into(),
        ));
    }
    let d2 = (p.d() * p.d()) as f64;
    if let ProcessorRepresentation::Branched(b) = p.representation() {
        if b.inner == 1 && b.idle == 1 {
            return Ok(controlled_search(&b.blocks, u, d2));
        }
    }
    let r = fidelity_operator(p, u)?;
    let eig = r.eig_hermitian()?;
    let m = p.m();
    let top = eig.values[m - 1];
    let cutoff = top - DEGENERACY_TOL * top.abs().max(f64::MIN_POSITIVE);
    let space: Vec<Vec<Complex64>> = (0..m)
        .rev()
        .take_while(|&k| eig.values[k] >= cutoff)
        .map(|k| eig.vector(k))
        .collect();
    let multiplicity = space.len();
    let vector = if multiplicity == 1 {
        space[0].clone()
    } else {
        refine_in_eigenspace(p, u, &space)?
    };
    let fid = vector::inner(&vector, &r.apply(&vector)).re;
    Ok(ProgramSearch {
        program: ProgramState::new(vector, "best")?,
        entanglement_fidelity: fid,
        top_multiplicity: multiplicity,
        degenerate: multiplicity > 1,
    })
}

fn controlled_search(blocks: &[CMatrix], u: &CMatrix, d2: f64) -> ProgramSearch {
    let ud = u.dagger();
    let f: Vec<f64> = blocks
        .iter()
        .map(|w| (&ud * w).trace().norm_sqr() / d2)
        .collect();
    let top = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = top - DEGENERACY_TOL * top.abs().max(f64::MIN_POSITIVE);
    let winners: Vec<usize> = (0..f.len()).filter(|&i| f[i] >= cutoff).collect();
    let i = winners[0];
    ProgramSearch {
        program: ProgramState::basis(blocks.len(), i, format!("net[{i}]")),
        entanglement_fidelity: f[i],
        top_multiplicity: winners.len(),
        degenerate: winners.len() > 1,
    }
}

/// Minimizes `‖J(φ) − J_U‖₂²` over unit `φ` in the span of `space` by
/// projected gradient descent with backtracking.
fn refine_in_eigenspace(
    p: &Processor,
    u: &CMatrix,
    space: &[Vec<Complex64>],
) -> Result<Vec<Complex64>> {
    let k = space.len();
    let m = p.m();
    let combine = |c: &[Complex64]| -> Vec<Complex64> {
        let mut v = vec![Complex64::zero(); m];
        for (ci, b) in c.iter().zip(space) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += ci * bi;
            }
        }
        v
    };
    let ju = Channel::unitary(u.clone())?.choi();
    let objective = |c: &[Complex64]| -> Result<(f64, CMatrix)> {
        let j = choi_of(&p.program_kraus(&combine(c), false));
        let diff = &j - &ju;
        Ok((diff.frobenius_norm().powi(2), diff))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut c: Vec<Complex64> = random_unit_vector(k, &mut rng);
    let (mut f, mut diff) = objective(&c)?;
    let mut step = 1.0;
    let mut prev: Option<(Vec<Complex64>, Vec<Complex64>)> = None;
    for _ in 0..2000 {
        let g = gradient(p, space, &combine(&c), &diff)?;
        // tangent projection keeps the step on the unit sphere to first order
        let radial = vector::inner(&c, &g);
        let g: Vec<Complex64> = g.iter().zip(&c).map(|(gi, ci)| gi - radial * ci).collect();
        let gn = vector::norm(&g);
        if gn < 1e-12 {
            break;
        }
        // Barzilai–Borwein trial step
        if let Some((c0, g0)) = &prev {
            let sv: Vec<Complex64> = c.iter().zip(c0).map(|(a, b)| a - b).collect();
            let yv: Vec<Complex64> = g.iter().zip(g0).map(|(a, b)| a - b).collect();
            let sy = vector::inner(&sv, &yv).re;
            if sy > 0.0 {
                step = (vector::inner(&sv, &sv).re / sy).clamp(1e-6, 1e3);
            }
        }
        let mut accepted = false;
        while step > 1e-12 {
            let trial: Vec<Complex64> = c.iter().zip(&g).map(|(ci, gi)| ci - gi * step).collect();
            let trial = vector::normalize(&trial)?;
            let (ft, dt) = objective(&trial)?;
            if ft <= f - 1e-4 * step * gn * gn {
                prev = Some((c, g));
                c = trial;
                f = ft;
                diff = dt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(combine(&c))
}

fn choi_of(kraus: &[CMatrix]) -> CMatrix {
    let n = kraus[0].entries().len();
    let mut j = ComplexMatrix::zeros(n, n);
    for k in kraus {
        let v = k.entries();
        for a in 0..n {
            if v[a] == Complex64::zero() {
                continue;
            }
            for b in 0..n {
                j[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    j
}

/// Gradient of `‖J(φ) − J_U‖₂²` with respect to `conj(c)`, where
/// `φ = Σ c_i space_i`.
fn gradient(
    p: &Processor,
    space: &[Vec<Complex64>],
    phi: &[Complex64],
    diff: &CMatrix,
) -> Result<Vec<Complex64>> {
    // J(φ) = Σ_row vec(L_row) vec(L_row)†, L_row linear in φ; the derivative
    // along a direction e is Σ_row vec(L_row(e)) vec(L_row(φ))† + h.c.
    let lphi = p.program_kraus(phi, false);
    space
        .iter()
        .map(|e| {
            let le = p.program_kraus(e, false);
            // ∂f/∂conj(c_i) = 2 Σ_row vec(L_row(e_i))† D vec(L_row(φ))
            let mut s = Complex64::zero();
            for (a, b) in le.iter().zip(&lphi) {
                let db = diff.apply(b.entries());
                s += vector::inner(a.entries(), &db);
            }
            Ok(s * 2.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::haar_unitary;
    use crate::processors::net::{build_controlled_processor, NetCertification, UnitaryNet};
    use crate::processors::teleport::{build_teleportation_processor, teleportation_program};
    use crate::quantum::Branched;

    #[test]
    fn controlled_processor_block_programs_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let members: Vec<CMatrix> = (0..4).map(|_| haar_unitary(2, &mut rng)).collect();
        let net = UnitaryNet {
            d: 2,
            resolution: 1.0,
            members: members.clone(),
            certification: NetCertification {
                samples: 0,
                max_residual: 0.0,
            },
        };
        let p = build_controlled_processor(&net).unwrap();
        for (i, u) in members.iter().enumerate() {
            let s = best_program_state(&p, u).unwrap();
            assert_eq!(s.program.vector, vector::basis(4, i));
            let e = programming_error(&p, u, &s.program).unwrap();
            assert!(e.half_diamond_error < 1e-8);
            assert_eq!(e.method, DistanceMethod::ClosedForm);
        }
    }

    #[test]
    fn fidelity_operator_of_controlled_processor_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let blocks: Vec<CMatrix> = (0..3).map(|_| haar_unitary(2, &mut rng)).collect();
        let u: CMatrix = haar_unitary(2, &mut rng);
        let p = Processor::branched(
            2,
            Branched {
                inner: 1,
                idle: 1,
                blocks: blocks.clone(),
            },
        )
        .unwrap();
        let r = fidelity_operator(&p, &u).unwrap();
        for i in 0..3 {
            let expect = (&u.dagger() * &blocks[i]).trace().norm_sqr() / 4.0;
            assert!((r[(i, i)].re - expect).abs() < 1e-14);
        }
        assert!(r.is_diagonal() || r.max_abs_diff(&CMatrix::from_diag(&r.diagonal())) < 1e-15);
    }

    #[test]
    fn teleportation_identity_error() {
        let p = build_teleportation_processor(2).unwrap();
        let id = CMatrix::identity(2);
        let e = programming_error(&p, &id, &teleportation_program(&id).unwrap()).unwrap();
        assert!(
            (e.half_diamond_error - 0.75).abs() < 1e-6,
            "{}",
            e.half_diamond_error
        );
    }

    #[test]
    fn teleportation_search_finds_maximally_entangled_program() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = build_teleportation_processor(2).unwrap();
        let u: CMatrix = haar_unitary(2, &mut rng);
        let s = best_program_state(&p, &u).unwrap();
        assert!(s.degenerate && s.top_multiplicity == 4);
        // reduced program state on C is maximally mixed
        let v = &s.program.vector;
        let rho = ComplexMatrix::outer(v, v)
            .partial_trace((2, 2), crate::linalg::Subsystem::A)
            .unwrap();
        assert!(
            rho.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-6,
            "{rho:?}"
        );
    }
}
