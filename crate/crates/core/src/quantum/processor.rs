use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::channel::{Channel, TP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, vector, ComplexMatrix};
use crate::CMatrix;

/// Norm tolerance for program vectors.
pub const PROGRAM_NORM_TOL: f64 = 1e-10;

/// Unit memory vector selecting a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramState {
    pub vector: Vec<Complex64>,
    pub target_label: String,
}

impl ProgramState {
    pub fn new(vector: Vec<Complex64>, target_label: impl Into<String>) -> Result<Self> {
        let n = vector::norm(&vector);
        if (n - 1.0).abs() > PROGRAM_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "program vector has norm {n}, expected 1"
            )));
        }
        Ok(Self {
            vector,
            target_label: target_label.into(),
        })
    }

    /// `|k⟩` in a memory of dimension `m`.
    pub fn basis(m: usize, k: usize, target_label: impl Into<String>) -> Self {
        Self {
            vector: vector::basis(m, k),
            target_label: target_label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Block-controlled unitary `V = Σ_r W_r ⊗ |r⟩⟨r| ⊗ Id_idle`.
///
/// Each `W_r` acts on `data ⊗ inner`; the memory is `inner ⊗ R ⊗ idle` in that
/// order, so the joint space is never built unless asked for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branched {
    pub inner: usize,
    pub idle: usize,
    pub blocks: Vec<CMatrix>,
}

impl Branched {
    pub fn branches(&self) -> usize {
        self.blocks.len()
    }

    pub fn memory_dim(&self) -> usize {
        self.inner * self.blocks.len() * self.idle
    }

    /// Memory index of `(inner, r, idle)`.
    #[inline]
    pub fn memory_index(&self, i: usize, r: usize, c: usize) -> usize {
        (i * self.branches() + r) * self.idle + c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessorRepresentation {
    Kraus(Channel),
    Unitary(CMatrix),
    Branched(Branched),
}

/// Channel on data ⊗ memory with declared split `(d, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Processor {
    d: usize,
    m: usize,
    repr: ProcessorRepresentation,
}

impl Processor {
    pub fn from_channel(channel: Channel, d: usize, m: usize) -> Result<Self> {
        if channel.d_in() != d * m || channel.d_out() != d * m {
            return Err(Error::DimensionMismatch {
                context: "processor joint space",
                expected: d * m,
                found: channel.d_in(),
            });
        }
        if channel.kraus().len() == 1 && channel.kraus()[0].is_unitary(TP_TOL) {
            return Self::unitary(channel.into_kraus().remove(0), d, m);
        }
        Ok(Self {
            d,
            m,
            repr: ProcessorRepresentation::Kraus(channel),
        })
    }

    pub fn unitary(v: CMatrix, d: usize, m: usize) -> Result<Self> {
        let n = v.require_square()?;
        if n != d * m {
            return Err(Error::DimensionMismatch {
                context: "processor joint space",
                expected: d * m,
                found: n,
            });
        }
        if !v.is_unitary(TP_TOL) {
            return Err(Error::NotUnitary {
                deviation: v.isometry_deviation(),
            });
        }
        Ok(Self {
            d,
            m,
            repr: ProcessorRepresentation::Unitary(v),
        })
    }

    pub fn branched(d: usize, b: Branched) -> Result<Self> {
        if b.blocks.is_empty() || b.inner == 0 || b.idle == 0 {
            return Err(Error::InvalidParameter(
                "branched processor needs blocks and positive registers".into(),
            ));
        }
        for w in &b.blocks {
            if w.rows() != d * b.inner || w.cols() != d * b.inner {
                return Err(Error::DimensionMismatch {
                    context: "branch block",
                    expected: d * b.inner,
                    found: w.rows(),
                });
            }
            if !w.is_unitary(TP_TOL) {
                return Err(Error::NotUnitary {
                    deviation: w.isometry_deviation(),
                });
            }
        }
        Ok(Self {
            d,
            m: b.memory_dim(),
            repr: ProcessorRepresentation::Branched(b),
        })
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn representation(&self) -> &ProcessorRepresentation {
        &self.repr
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self.repr, ProcessorRepresentation::Kraus(_))
    }

    /// The joint unitary `V` when the processor is unitary.
    pub fn joint_unitary(&self) -> Result<Option<CMatrix>> {
        match &self.repr {
            ProcessorRepresentation::Kraus(_) => Ok(None),
            ProcessorRepresentation::Unitary(v) => Ok(Some(v.clone())),
            ProcessorRepresentation::Branched(b) => {
                let n = self.d * self.m;
                check_dim(n)?;
                let (r_count, inner, idle) = (b.branches(), b.inner, b.idle);
                let mut v = ComplexMatrix::zeros(n, n);
                for (r, w) in b.blocks.iter().enumerate() {
                    for a in 0..self.d * inner {
                        for bb in 0..self.d * inner {
                            let z = w[(a, bb)];
                            if z == Complex64::zero() {
                                continue;
                            }
                            for c in 0..idle {
                                v[((a * r_count + r) * idle + c, (bb * r_count + r) * idle + c)] =
                                    z;
                            }
                        }
                    }
                }
                Ok(Some(v))
            }
        }
    }

    /// The processor as a channel on the joint space.
    pub fn joint_channel(&self) -> Result<Channel> {
        match &self.repr {
            ProcessorRepresentation::Kraus(c) => Ok(c.clone()),
            _ => Channel::unitary(self.joint_unitary()?.expect("unitary representation")),
        }
    }

    fn check_program(&self, phi: &ProgramState) -> Result<()> {
        if phi.dim() != self.m {
            return Err(Error::DimensionMismatch {
                context: "program state",
                expected: self.m,
                found: phi.dim(),
            });
        }
        Ok(())
    }

    /// Data-side Kraus operators of `Tr_m[P(· ⊗ |φ⟩⟨φ|)]` before
    /// canonicalization.
    pub fn induced_kraus(&self, phi: &ProgramState) -> Result<Vec<CMatrix>> {
        self.check_program(phi)?;
        Ok(self.program_kraus(&phi.vector, true))
    }

    /// Kraus operators linear in `phi`, without normalization checks. With
    /// `skip_zero` unset the list layout does not depend on `phi`.
    pub(crate) fn program_kraus(&self, phi: &[Complex64], skip_zero: bool) -> Vec<CMatrix> {
        let (d, m) = (self.d, self.m);
        let slice = |k: &CMatrix, j: usize| {
            ComplexMatrix::from_fn(d, d, |a, b| {
                (0..m).fold(Complex64::zero(), |acc, s| {
                    acc + k[(a * m + j, b * m + s)] * phi[s]
                })
            })
        };
        let mut out = Vec::new();
        match &self.repr {
            ProcessorRepresentation::Kraus(c) => {
                for k in c.kraus() {
                    out.extend((0..m).map(|j| slice(k, j)));
                }
            }
            ProcessorRepresentation::Unitary(v) => out.extend((0..m).map(|j| slice(v, j))),
            ProcessorRepresentation::Branched(b) => {
                let inner = b.inner;
                for (r, w) in b.blocks.iter().enumerate() {
                    for c in 0..b.idle {
                        let local: Vec<Complex64> =
                            (0..inner).map(|i| phi[b.memory_index(i, r, c)]).collect();
                        if skip_zero && local.iter().all(|z| z.norm_sqr() == 0.0) {
                            continue;
                        }
                        for k in 0..inner {
                            out.push(ComplexMatrix::from_fn(d, d, |a, bb| {
                                (0..inner).fold(Complex64::zero(), |acc, s| {
                                    acc + w[(a * inner + k, bb * inner + s)] * local[s]
                                })
                            }));
                        }
                    }
                }
            }
        }
        out
    }

    /// The program channel `Tr_m[P(· ⊗ |φ⟩⟨φ|)]` in minimal Kraus form.
    pub fn induced_channel(&self, phi: &ProgramState) -> Result<Channel> {
        let kraus = self.induced_kraus(phi)?;
        Ok(Channel::new(kraus)?.canonical())
    }
}

pub fn induced_program_channel(p: &Processor, phi: &ProgramState) -> Result<Channel> {
    p.induced_channel(phi)
}

#[derive(Serialize, Deserialize)]
struct ChannelFields {
    d_in: usize,
    d_out: usize,
    kraus: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ProcessorRepr {
    d: usize,
    m: usize,
    is_unitary: bool,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    channel: Option<ChannelFields>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branched: Option<Branched>,
}

impl Serialize for Processor {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let n = self.d * self.m;
        let (channel, branched) = match &self.repr {
            ProcessorRepresentation::Kraus(c) => (Some(c.kraus().to_vec()), None),
            ProcessorRepresentation::Unitary(v) => (Some(vec![v.clone()]), None),
            ProcessorRepresentation::Branched(b) => (None, Some(b.clone())),
        };
        ProcessorRepr {
            d: self.d,
            m: self.m,
            is_unitary: self.is_unitary(),
            channel: channel.map(|kraus| ChannelFields {
                d_in: n,
                d_out: n,
                kraus,
            }),
            branched,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Processor {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ProcessorRepr::deserialize(deserializer)?;
        let p = match (r.channel, r.branched) {
            (_, Some(b)) => Processor::branched(r.d, b),
            (Some(c), None) if r.is_unitary => match <[CMatrix; 1]>::try_from(c.kraus) {
                Ok([v]) => Processor::unitary(v, r.d, r.m),
                Err(_) => {
                    return Err(D::Error::custom(
                        "unitary processor must carry exactly one operator",
                    ))
                }
            },
            (Some(c), None) => {
                Channel::new(c.kraus).and_then(|ch| Processor::from_channel(ch, r.d, r.m))
            }
            (None, None) => return Err(D::Error::custom("processor needs kraus or branched data")),
        }
        .map_err(D::Error::custom)?;
        if p.m != r.m {
            return Err(D::Error::custom(
                "declared memory dimension disagrees with the data",
            ));
        }
        Ok(p)
    }
}
