use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::CMatrix;

/// Optimization direction of the primal objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Real or imaginary part of a matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// One Hermitian matrix-unit term of a constraint.
///
/// For `row != col` the term is `v E_{row,col} + conj(v) E_{col,row}`;
/// on the diagonal `v` must be real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

/// `⟨A, X⟩ = rhs` with `⟨A, X⟩ = Re Tr(A X)` and `A` given by its entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constraint {
    pub entries: Vec<SparseEntry>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(rhs: f64) -> Self {
        Self {
            entries: Vec::new(),
            rhs,
        }
    }

    pub fn with(mut self, block: usize, row: usize, col: usize, value: Complex64) -> Self {
        self.push(block, row, col, value);
        self
    }

    pub fn push(&mut self, block: usize, row: usize, col: usize, value: Complex64) {
        let (row, col, value) = if row <= col {
            (row, col, value)
        } else {
            (col, row, value.conj())
        };
        self.entries.push(SparseEntry {
            block,
            row,
            col,
            value,
        });
    }

    /// Adds a term contributing `coef · Re X_pq` or `coef · Im X_pq`
    /// (`p < q` for the imaginary part).
    pub fn push_component(&mut self, block: usize, p: usize, q: usize, part: Part, coef: f64) {
        let value = match part {
            Part::Re if p == q => Complex64::new(coef, 0.0),
            Part::Re => Complex64::new(0.5 * coef, 0.0),
            Part::Im => {
                assert!(p != q, "diagonal entries of a Hermitian matrix are real");
                let v = Complex64::new(0.0, 0.5 * coef);
                if p < q {
                    v
                } else {
                    -v
                }
            }
        };
        self.push(block, p, q, value);
    }

    /// Adds every nonzero upper-triangular entry of a dense Hermitian `a`.
    pub fn push_dense(&mut self, block: usize, a: &CMatrix) {
        for p in 0..a.rows() {
            for q in p..a.cols() {
                let v = if p == q {
                    Complex64::new(a[(p, p)].re, 0.0)
                } else {
                    a[(p, q)]
                };
                if v != Complex64::zero() {
                    self.entries.push(SparseEntry {
                        block,
                        row: p,
                        col: q,
                        value: v,
                    });
                }
            }
        }
    }

    /// `Re Tr(A X)` for block-diagonal `X`.
    pub fn apply(&self, x: &[CMatrix]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let xb = &x[e.block];
                if e.row == e.col {
                    e.value.re * xb[(e.row, e.row)].re
                } else {
                    2.0 * (e.value.conj() * xb[(e.row, e.col)]).re
                }
            })
            .sum()
    }

    /// Adds `s · A` into the block matrices.
    pub fn accumulate(&self, s: f64, out: &mut [CMatrix]) {
        for e in &self.entries {
            let m = &mut out[e.block];
            if e.row == e.col {
                m[(e.row, e.row)] += Complex64::new(s * e.value.re, 0.0);
            } else {
                m[(e.row, e.col)] += e.value * s;
                m[(e.col, e.row)] += e.value.conj() * s;
            }
        }
    }
}

/// Block-diagonal Hermitian semidefinite program
/// `opt ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub sense: Sense,
    pub blocks: Vec<usize>,
    pub objective: Vec<CMatrix>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    /// Problem with zero objective on the given block sizes.
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        let objective = blocks.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        Self {
            sense,
            blocks,
            objective,
            constraints: Vec::new(),
        }
    }

    /// Single-block problem from dense Hermitian data.
    pub fn dense(sense: Sense, c: CMatrix, constraints: Vec<(CMatrix, f64)>) -> Result<Self> {
        let n = c.require_square()?;
        let mut p = Self::new(vec![n], sense);
        p.objective[0] = c;
        for (a, b) in constraints {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch {
                    context: "SDP constraint",
                    expected: n,
                    found: a.rows(),
                });
            }
            if !a.is_hermitian(1e-10) {
                return Err(Error::NotHermitian {
                    deviation: a.hermitian_deviation(),
                });
            }
            let mut k = Constraint::new(b);
            k.push_dense(0, &a);
            p.constraints.push(k);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(Error::InvalidParameter(
                "SDP blocks must be nonempty".into(),
            ));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch {
                context: "SDP objective blocks",
                expected: self.blocks.len(),
                found: self.objective.len(),
            });
        }
        for (c, &n) in self.objective.iter().zip(&self.blocks) {
            if c.rows() != n || c.cols() != n {
                return Err(Error::DimensionMismatch {
                    context: "SDP objective block",
                    expected: n,
                    found: c.rows(),
                });
            }
            if !c.is_hermitian(1e-10) {
                return Err(Error::NotHermitian {
                    deviation: c.hermitian_deviation(),
                });
            }
        }
        for k in &self.constraints {
            if !k.rhs.is_finite() {
                return Err(Error::NonFinite);
            }
            for e in &k.entries {
                let n = *self.blocks.get(e.block).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "constraint refers to missing block {}",
                        e.block
                    ))
                })?;
                if e.row >= n || e.col >= n {
                    return Err(Error::InvalidParameter(
                        "constraint entry outside its block".into(),
                    ));
                }
                if e.row == e.col && e.value.im.abs() > 1e-10 * e.value.norm().max(1.0) {
                    return Err(Error::NotHermitian {
                        deviation: e.value.im.abs(),
                    });
                }
            }
        }
        Ok(())
    }
}
