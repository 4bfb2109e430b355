//! State and channel distances.

mod hull;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vector, ComplexMatrix};
use crate::quantum::Channel;
use crate::sdp::{self, Constraint, Part, SdpProblem, SdpStatus, Sense, SolverOptions, StartPoint};
use crate::CMatrix;

pub use hull::origin_distance_to_hull;

/// Tolerance on trace and positivity used to accept a density matrix.
pub const STATE_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as exact zeros when taking square roots.
const PSD_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Sdp,
    ClosedForm,
    SampledLowerBound,
}

/// A half diamond distance together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub method: DistanceMethod,
    pub tol: f64,
    /// Dual bound for SDP values; equal to `value` otherwise.
    pub upper_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdp_status: Option<SdpStatus>,
}

impl DistanceReport {
    fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: DistanceMethod::ClosedForm,
            tol: 0.0,
            upper_bound: value,
            sdp_status: None,
        }
    }

    /// True when the iterate met the requested tolerance.
    pub fn certified(&self) -> bool {
        !matches!(self.sdp_status, Some(SdpStatus::MaxIterations))
    }
}

fn check_state(rho: &CMatrix) -> Result<usize> {
    let n = rho.require_square()?;
    if !rho.is_hermitian(1e-10) {
        return Err(Error::NotState {
            reason: format!(
                "not Hermitian (deviation {:.3e})",
                rho.hermitian_deviation()
            ),
        });
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::NotState {
            reason: format!("trace {tr} differs from 1"),
        });
    }
    let lmin = rho.eigvals_hermitian()?[0];
    if lmin < -STATE_TOL {
        return Err(Error::NotState {
            reason: format!("negative eigenvalue {lmin:.3e}"),
        });
    }
    Ok(n)
}

fn check_pair(rho: &CMatrix, sigma: &CMatrix) -> Result<()> {
    let n = check_state(rho)?;
    let m = check_state(sigma)?;
    if n != m {
        return Err(Error::DimensionMismatch {
            context: "state pair",
            expected: n,
            found: m,
        });
    }
    Ok(())
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok(half_trace_norm(&(rho - sigma)))
}

fn half_trace_norm(h: &CMatrix) -> f64 {
    let vals = h
        .eigvals_hermitian()
        .expect("difference of states is Hermitian");
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

/// The pure vector of `ρ` when it has numerical rank one.
fn pure_vector(rho: &CMatrix) -> Option<Vec<Complex64>> {
    let e = rho.eig_hermitian().ok()?;
    let n = e.values.len();
    let top = e.values[n - 1];
    if n == 1 || e.values[n - 2].abs() <= PSD_FLOOR.max(1e-12 * top) {
        Some(e.vector(n - 1))
    } else {
        None
    }
}

fn sqrt_psd(rho: &CMatrix) -> CMatrix {
    let e = rho.eig_hermitian().expect("state is Hermitian");
    e.map_values(|l| if l > PSD_FLOOR { l.sqrt() } else { 0.0 })
}

/// Root fidelity `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    let f = if let Some(psi) = pure_vector(rho) {
        vector::inner(&psi, &sigma.apply(&psi)).re.max(0.0).sqrt()
    } else if let Some(psi) = pure_vector(sigma) {
        vector::inner(&psi, &rho.apply(&psi)).re.max(0.0).sqrt()
    } else {
        let prod = &sqrt_psd(rho) * &sqrt_psd(sigma);
        prod.singular_values().iter().sum()
    };
    Ok(f.min(1.0))
}

/// Fuchs–van de Graaf sandwich `1 − F ≤ D ≤ √(1 − F²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvdgReport {
    pub lower: f64,
    pub dist: f64,
    pub upper: f64,
    pub holds: bool,
}

pub fn fvdg_check(rho: &CMatrix, sigma: &CMatrix) -> Result<FvdgReport> {
    let f = fidelity(rho, sigma)?;
    let dist = half_trace_norm(&(rho - sigma));
    let lower = 1.0 - f;
    let upper = (1.0 - f * f).max(0.0).sqrt();
    Ok(FvdgReport {
        lower,
        dist,
        upper,
        holds: lower <= dist + 1e-9 && dist <= upper + 1e-9,
    })
}

fn check_channel_pair(c1: &Channel, c2: &Channel) -> Result<()> {
    if c1.d_in() != c2.d_in() || c1.d_out() != c2.d_out() {
        return Err(Error::DimensionMismatch {
            context: "channel pair",
            expected: c1.d_in() * c1.d_out(),
            found: c2.d_in() * c2.d_out(),
        });
    }
    Ok(())
}

/// `½‖c1 − c2‖⋄` by the semidefinite program
/// `max ⟨J, W⟩ s.t. W ⪯ Id_out ⊗ ρ, W ⪰ 0, ρ a density matrix`,
/// with `J` the Choi matrix of the difference.
pub fn diamond_distance(c1: &Channel, c2: &Channel, tol: f64) -> Result<DistanceReport> {
    check_channel_pair(c1, c2)?;
    let j = &c1.choi() - &c2.choi();
    diamond_from_choi(&j, c1.d_in(), c1.d_out(), tol)
}

/// Half diamond norm of the Hermiticity-preserving map with Choi matrix `j`
/// (output ⊗ input), assuming `j` is traceless on the output.
pub fn diamond_from_choi(
    j: &CMatrix,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<DistanceReport> {
    let n = d_in * d_out;
    if j.rows() != n || j.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "Choi matrix",
            expected: n,
            found: j.rows(),
        });
    }
    if j.max_abs() == 0.0 {
        return Ok(DistanceReport {
            value: 0.0,
            method: DistanceMethod::Sdp,
            tol,
            upper_bound: 0.0,
            sdp_status: Some(SdpStatus::Converged),
        });
    }
    let (w, s, r) = (0, 1, 2);
    let mut p = SdpProblem::new(vec![n, n, d_in], Sense::Maximize);
    p.objective[w] = j.hermitian_part();
    // W + S − Id_out ⊗ ρ = 0, one real equation per Hermitian component
    let mut y0 = Vec::new();
    let kappa = j.frobenius_norm() + 1.0;
    for a in 0..n {
        for b in a..n {
            let parts: &[Part] = if a == b {
                &[Part::Re]
            } else {
                &[Part::Re, Part::Im]
            };
            for &part in parts {
                let mut k = Constraint::new(0.0);
                k.push_component(w, a, b, part, 1.0);
                k.push_component(s, a, b, part, 1.0);
                if a / d_in == b / d_in {
                    k.push_component(r, a % d_in, b % d_in, part, -1.0);
                }
                p.constraints.push(k);
                y0.push(if a == b { kappa } else { 0.0 });
            }
        }
    }
    let mut tr = Constraint::new(1.0);
    for i in 0..d_in {
        tr.push_component(r, i, i, Part::Re, 1.0);
    }
    p.constraints.push(tr);
    y0.push(kappa * d_out as f64 + 1.0);

    let x0 = vec![
        ComplexMatrix::identity(n).scale_real(0.5 / d_in as f64),
        ComplexMatrix::identity(n).scale_real(0.5 / d_in as f64),
        ComplexMatrix::identity(d_in).scale_real(1.0 / d_in as f64),
    ];
    // y is given in the solver's internal (minimization) convention
    let y_int: Vec<f64> = y0.iter().map(|v| -v).collect();
    let opts = SolverOptions {
        tol,
        start: Some(StartPoint {
            x: x0,
            y: y_int,
            z: None,
        }),
        ..SolverOptions::default()
    };
    let sol = sdp::solve(&p, &opts)?;
    Ok(DistanceReport {
        value: sol.value.clamp(0.0, 1.0),
        method: DistanceMethod::Sdp,
        tol,
        upper_bound: sol.dual_value.max(sol.value).clamp(0.0, 1.0),
        sdp_status: Some(sol.status),
    })
}

/// Eigenvalues of a unitary, via the commuting Hermitian pair
/// `(N + N†)/2`, `(N − N†)/2i` diagonalized together.
pub fn unitary_eigenvalues(n: &CMatrix) -> Result<Vec<Complex64>> {
    // generic mixing constant separates eigenvalues sharing a real part
    const MIX: f64 = 0.618_033_988_749_894_9;
    let a = n.hermitian_part();
    let b = (n - &n.dagger()).scale(Complex64::new(0.0, -0.5));
    let mut h = a;
    h.add_scaled(MIX.into(), &b);
    let e = h.eig_hermitian()?;
    Ok((0..n.rows())
        .map(|k| {
            let v = e.vector(k);
            vector::inner(&v, &n.apply(&v))
        })
        .collect())
}

/// Closed form `√(1 − ν²)` with `ν` the distance from 0 to the convex hull of
/// the spectrum of `U†W`.
///
/// Evaluated as `sin(a/2)` with `a` the shortest arc covering the eigenphases,
/// which keeps full relative precision near zero.
pub fn unitary_diamond_distance(u: &CMatrix, w: &CMatrix) -> Result<f64> {
    for m in [u, w] {
        m.require_square()?;
        if !m.is_unitary(1e-9) {
            return Err(Error::NotUnitary {
                deviation: m.isometry_deviation(),
            });
        }
    }
    if u.rows() != w.rows() {
        return Err(Error::DimensionMismatch {
            context: "unitary pair",
            expected: u.rows(),
            found: w.rows(),
        });
    }
    let eigs = unitary_eigenvalues(&(&u.dagger() * w))?;
    Ok((covering_arc(&eigs).min(std::f64::consts::PI) / 2.0).sin())
}

/// Length of the shortest arc of the unit circle containing every phase.
fn covering_arc(eigs: &[Complex64]) -> f64 {
    let mut phases: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    phases.sort_by(f64::total_cmp);
    let n = phases.len();
    let tau = 2.0 * std::f64::consts::PI;
    let widest_gap = (0..n)
        .map(|k| {
            if k + 1 < n {
                phases[k + 1] - phases[k]
            } else {
                phases[0] + tau - phases[n - 1]
            }
        })
        .fold(0.0, f64::max);
    (tau - widest_gap).max(0.0)
}

/// Half diamond distance, preferring the closed form for unitary pairs.
pub fn channel_distance(c1: &Channel, c2: &Channel, tol: f64) -> Result<DistanceReport> {
    check_channel_pair(c1, c2)?;
    if let (Some(u), Some(w)) = (c1.as_unitary(), c2.as_unitary()) {
        return Ok(DistanceReport::closed_form(unitary_diamond_distance(
            &u, &w,
        )?));
    }
    diamond_distance(c1, c2, tol)
}

/// Optimal single-shot discrimination probability `½ + ¼‖c1 − c2‖⋄`.
pub fn distinguish_probability(c1: &Channel, c2: &Channel, tol: f64) -> Result<f64> {
    Ok(0.5 + 0.5 * channel_distance(c1, c2, tol)?.value)
}

/// Lower bound on the half diamond distance from explicit inputs on
/// `C^{d_in} ⊗ C^{k}`.
pub fn sampled_lower_bound(
    c1: &Channel,
    c2: &Channel,
    inputs: &[CMatrix],
    k: usize,
) -> Result<DistanceReport> {
    check_channel_pair(c1, c2)?;
    let mut best: f64 = 0.0;
    for rho in inputs {
        let a = c1.apply_with_ancilla(rho, k)?;
        let b = c2.apply_with_ancilla(rho, k)?;
        best = best.max(half_trace_norm(&(&a - &b)));
    }
    Ok(DistanceReport {
        value: best,
        method: DistanceMethod::SampledLowerBound,
        tol: 0.0,
        upper_bound: 1.0,
        sdp_status: None,
    })
}
