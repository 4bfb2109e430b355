use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::embedding::embedding_map;
use super::rademacher::{
    diagonal_family, rademacher_average, rademacher_from_oracle, NormSpace, RademacherMode,
    TypeEstimate,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::Processor;

/// Constant in `T₂(B(H_m)) ≤ (C log₂ m)^{1/2}`.
pub const DEFAULT_TYPE_CONSTANT: f64 = 4.0;
const CHAIN_TOL: f64 = 1e-9;

fn check_m(m_dim: usize) -> Result<()> {
    if m_dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "type-2 estimate needs dimension >= 2, got {m_dim}"
        )));
    }
    Ok(())
}

/// `(C log₂ m)^{1/2}` with `C = 4`.
pub fn type2_upper_bound_operator_norm(m_dim: usize) -> Result<f64> {
    type2_upper_bound_with(m_dim, DEFAULT_TYPE_CONSTANT)
}

pub fn type2_upper_bound_with(m_dim: usize, c: f64) -> Result<f64> {
    check_m(m_dim)?;
    Ok((c * (m_dim as f64).log2()).sqrt())
}

/// `m^{1/p} √p` at `p = log_{√2} m`, the exponent the estimate is read off at.
/// Returns `(p, value)`.
pub fn type2_proof_path(m_dim: usize) -> Result<(f64, f64)> {
    check_m(m_dim)?;
    let m = m_dim as f64;
    let p = (2.0 * m.log2()).max(2.0);
    Ok((p, m.powf(1.0 / p) * p.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessorKind {
    Unitary,
    Kraus,
}

/// `m ≥ 2^{log2_m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryBound {
    pub log2_m: f64,
    pub m: f64,
    /// Smallest integer memory allowed by the bound.
    pub m_integer: f64,
    /// `ε ≥ 1`, or the exponent is not positive.
    pub vacuous: bool,
}

/// `2^{(1−ε)d/C}` for unitary processors and
/// `2^{(1−ε)d/(3C) − (2/3)log₂ d}` for general channels, evaluated in log space.
pub fn memory_lower_bound_formula(
    d: usize,
    eps: f64,
    c: f64,
    kind: ProcessorKind,
) -> Result<MemoryBound> {
    if d == 0 || c.is_nan() || c <= 0.0 || !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bad bound parameters d={d} eps={eps} C={c}"
        )));
    }
    if eps >= 1.0 {
        return Ok(MemoryBound {
            log2_m: 0.0,
            m: 1.0,
            m_integer: 1.0,
            vacuous: true,
        });
    }
    let d = d as f64;
    let log2_m = match kind {
        ProcessorKind::Unitary => (1.0 - eps) * d / c,
        ProcessorKind::Kraus => (1.0 - eps) * d / (3.0 * c) - (2.0 / 3.0) * d.log2(),
    };
    let vacuous = log2_m <= 0.0;
    let log2_m = log2_m.max(0.0);
    let m = log2_m.exp2();
    Ok(MemoryBound {
        log2_m,
        m,
        m_integer: m.ceil(),
        vacuous,
    })
}

/// The inequalities `√d ≤ (1−ε)^{-1/2}·r ≤ (1−ε)^{-1/2}·(C log₂ m′)^{1/2}`,
/// with `r` the Rademacher ratio of the image of the diagonal family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeChain {
    pub d: usize,
    pub epsilon: f64,
    pub sqrt_d: f64,
    pub domain: TypeEstimate,
    pub image: TypeEstimate,
    pub m_prime: usize,
    pub type2_bound: f64,
    /// `(1−ε)^{-1/2}·r`.
    pub middle: f64,
    /// `(1−ε)^{-1/2}·(C log₂ m′)^{1/2}`.
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl TypeChain {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundWitness {
    pub kind: ProcessorKind,
    pub bound: MemoryBound,
    /// `None` for `ε ≥ 1`, where no chain is built.
    pub chain: Option<TypeChain>,
}

impl LowerBoundWitness {
    pub fn certified_m_lower(&self) -> f64 {
        self.bound.m
    }
}

pub fn memory_lower_bound_witness(p: &Processor, eps: f64) -> Result<LowerBoundWitness> {
    memory_lower_bound_witness_with(p, eps, DEFAULT_TYPE_CONSTANT)
}

/// Pushes the diagonal `±1` family through `Φ_V` and checks the type-2 chain
/// for a processor of certified accuracy `eps`.
pub fn memory_lower_bound_witness_with(
    p: &Processor,
    eps: f64,
    c: f64,
) -> Result<LowerBoundWitness> {
    let kind = if p.is_unitary() {
        ProcessorKind::Unitary
    } else {
        ProcessorKind::Kraus
    };
    let d = p.d();
    let bound = memory_lower_bound_formula(d, eps, c, kind)?;
    if bound.vacuous && eps >= 1.0 {
        return Ok(LowerBoundWitness {
            kind,
            bound,
            chain: None,
        });
    }
    let map = embedding_map(p)?;
    let family = diagonal_family(d);
    let domain = rademacher_average(
        &family,
        NormSpace::TraceNorm,
        RademacherMode::Exact,
        "diagonal units",
    )?;
    let norms = family
        .iter()
        .map(|x| map.image_norm(x))
        .collect::<Result<Vec<_>>>()?;
    let image = rademacher_from_oracle(
        d,
        &norms,
        |signs| {
            let diag: Vec<Complex64> = signs.iter().map(|&s| s.into()).collect();
            map.image_norm(&ComplexMatrix::from_diag(&diag))
        },
        NormSpace::OperatorNorm,
        RademacherMode::Exact,
        "image of diagonal units",
    )?;
    let m_prime = map.m();
    let type2_bound = type2_upper_bound_with(m_prime, c)?;
    let scale = 1.0 / (1.0 - eps).sqrt();
    let sqrt_d = (d as f64).sqrt();
    let middle = scale * image.ratio;
    let upper = scale * type2_bound;
    let chain = TypeChain {
        d,
        epsilon: eps,
        sqrt_d,
        lower_holds: sqrt_d <= middle + CHAIN_TOL,
        upper_holds: image.ratio <= type2_bound + CHAIN_TOL,
        domain,
        image,
        m_prime,
        type2_bound,
        middle,
        upper,
    };
    Ok(LowerBoundWitness {
        kind,
        bound,
        chain: Some(chain),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processors::build_teleportation_processor;

    #[test]
    fn type2_bound_examples() {
        assert!((type2_upper_bound_operator_norm(4).unwrap() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(type2_upper_bound_operator_norm(2).unwrap(), 2.0);
        assert!(type2_upper_bound_operator_norm(1).is_err());
        for m in 2..200 {
            let (_, v) = type2_proof_path(m).unwrap();
            assert!(v >= type2_upper_bound_operator_norm(m).unwrap() - 1e-12);
        }
    }

    #[test]
    fn lower_bound_formula_examples() {
        let b = memory_lower_bound_formula(2, 0.0, 4.0, ProcessorKind::Unitary).unwrap();
        assert_eq!(b.log2_m, 0.5);
        assert_eq!(b.m_integer, 2.0);
        let b = memory_lower_bound_formula(100, 0.0, 4.0, ProcessorKind::Unitary).unwrap();
        assert_eq!(b.log2_m, 25.0);
        assert_eq!(b.m, 33_554_432.0);
        let b = memory_lower_bound_formula(5, 1.0, 4.0, ProcessorKind::Unitary).unwrap();
        assert!(b.vacuous && b.m == 1.0);
    }

    #[test]
    fn teleportation_chain_holds() {
        let p = build_teleportation_processor(2).unwrap();
        let w = memory_lower_bound_witness(&p, 0.75).unwrap();
        assert_eq!(w.kind, ProcessorKind::Kraus);
        let chain = w.chain.unwrap();
        assert!(chain.holds(), "{chain:?}");
        assert_eq!(chain.domain.ratio, 2f64.sqrt());
    }
}
