//! Processor descriptions read from JSON.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use upqp_core::processors::{
    best_program_state, build_controlled_processor, build_epsilon_net,
    build_teleportation_processor, net::DEFAULT_MAX_CANDIDATES, programming_error,
    synthesize_processor, ProgrammingErrorReport, SynthesisResult, UnitaryNet,
};
use upqp_core::quantum::Processor;
use upqp_core::CMatrix;

/// A processor, either explicit or by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessorSpec {
    Teleport {
        d: usize,
    },
    /// Builds a net and wraps it in the controlled unitary.
    Net {
        d: usize,
        epsilon: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_max_candidates")]
        max_candidates: usize,
    },
    /// A previously built net.
    NetMembers {
        net: UnitaryNet,
    },
    Processor {
        processor: Processor,
    },
    /// Synthesis from a contraction `T` on `H_d ⊗ H_m`.
    Synthesized {
        map: CMatrix,
        d: usize,
        delta: f64,
    },
}

fn default_max_candidates() -> usize {
    DEFAULT_MAX_CANDIDATES
}

pub struct Instance {
    pub processor: Processor,
    pub net: Option<UnitaryNet>,
    pub synthesis: Option<SynthesisResult>,
    pub label: String,
}

impl ProcessorSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing processor spec {}", path.display()))
    }

    pub fn instantiate(&self) -> Result<Instance> {
        Ok(match self {
            ProcessorSpec::Teleport { d } => Instance {
                processor: build_teleportation_processor(*d)?,
                net: None,
                synthesis: None,
                label: format!("teleport(d={d})"),
            },
            ProcessorSpec::Net {
                d,
                epsilon,
                seed,
                max_candidates,
            } => {
                let net = build_epsilon_net(*d, *epsilon, *seed, *max_candidates)?;
                Self::NetMembers { net }.instantiate()?
            }
            ProcessorSpec::NetMembers { net } => {
                net.validate()?;
                Instance {
                    processor: build_controlled_processor(net)?,
                    label: format!("net(d={},eps={},n={})", net.d, net.resolution, net.len()),
                    net: Some(net.clone()),
                    synthesis: None,
                }
            }
            ProcessorSpec::Processor { processor } => Instance {
                processor: processor.clone(),
                net: None,
                synthesis: None,
                label: format!("processor(d={},m={})", processor.d(), processor.m()),
            },
            ProcessorSpec::Synthesized { map, d, delta } => {
                let s = synthesize_processor(map, *d, *delta)?;
                Instance {
                    processor: s.processor.clone(),
                    net: None,
                    label: format!("synthesized(d={d},m={})", s.processor.m()),
                    synthesis: Some(s),
                }
            }
        })
    }
}

impl Instance {
    /// Best available program for `u` and its certified error.
    pub fn program_error(&self, u: &CMatrix) -> Result<ProgrammingErrorReport> {
        if let Some(s) = &self.synthesis {
            return Ok(s.program_for(u)?.report);
        }
        let search = best_program_state(&self.processor, u)?;
        Ok(programming_error(&self.processor, u, &search.program)?)
    }

    /// Accuracy known for the whole unitary group, when there is one.
    pub fn certified_accuracy(&self) -> Option<f64> {
        if let Some(n) = &self.net {
            return n.certified().then_some(n.resolution);
        }
        None
    }
}
