//! Reproducible experiments. Each writes `<name>.json` and `<name>.csv`
//! and reports a list of pass/fail checks.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::path::Path;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use upqp_core::banach::{
    diagonal_family, distortion, memory_lower_bound_witness_with, rademacher_average,
    type2_upper_bound_with, EmbeddingMap, NormSpace, RademacherMode,
};
use upqp_core::linalg::random::haar_unitary;
use upqp_core::processors::{
    build_epsilon_net_with, build_teleportation_processor, programming_error_with_tol,
    teleportation_program, UnitaryNet,
};
use upqp_core::quantum::Processor;
use upqp_core::CMatrix;

use crate::bounds::{
    bounds_csv, bounds_table, corollary_epsilon_floor, ub_net_log2, Constants, ConstantsRecord,
};
use crate::format::{fmt_bool, fmt_num, Table};
use crate::spec::{Instance, ProcessorSpec};

/// Tolerance passed to the diamond SDP wherever a value is compared to a
/// closed form.
pub const SDP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    NetBuild,
    NetErrorSweep,
    TeleportError,
    DistortionCheck,
    TypeWitness,
    SynthesizeThm2,
    Bounds,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Bounds,
        Experiment::TeleportError,
        Experiment::NetBuild,
        Experiment::NetErrorSweep,
        Experiment::DistortionCheck,
        Experiment::TypeWitness,
        Experiment::SynthesizeThm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::NetBuild => "net_build",
            Experiment::NetErrorSweep => "net_error_sweep",
            Experiment::TeleportError => "teleport_error",
            Experiment::DistortionCheck => "distortion_check",
            Experiment::TypeWitness => "type_witness",
            Experiment::SynthesizeThm2 => "synthesize_thm2",
            Experiment::Bounds => "bounds",
        }
    }

    fn stream(self) -> u64 {
        Self::ALL.iter().position(|&e| e == self).unwrap() as u64 + 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub constants: Constants,
    pub net_d: usize,
    pub net_eps: Vec<f64>,
    pub max_candidates: usize,
    pub certify_samples: usize,
    pub targets: usize,
    pub teleport_d: Vec<usize>,
    pub distortion_samples: usize,
    pub synth_targets: usize,
    pub bounds_d: Vec<usize>,
    pub bounds_eps: Vec<f64>,
    pub max_family_dim: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            constants: Constants::default(),
            net_d: 2,
            net_eps: vec![1.0, 0.5, 0.25],
            max_candidates: upqp_core::processors::net::DEFAULT_MAX_CANDIDATES,
            certify_samples: upqp_core::processors::net::DEFAULT_CERTIFY_SAMPLES,
            targets: 200,
            teleport_d: vec![2, 3],
            distortion_samples: upqp_core::banach::DEFAULT_DISTORTION_SAMPLES,
            synth_targets: 50,
            bounds_d: (2..=6).collect(),
            bounds_eps: (1..=9).map(|k| k as f64 / 10.0).collect(),
            max_family_dim: 8,
        }
    }
}

impl RunConfig {
    /// Small parameters for smoke runs.
    pub fn quick() -> Self {
        Self {
            net_eps: vec![1.0],
            max_candidates: 1000,
            certify_samples: 1000,
            targets: 8,
            teleport_d: vec![2],
            distortion_samples: 200,
            synth_targets: 4,
            bounds_d: vec![2, 3],
            bounds_eps: vec![0.25, 0.5],
            max_family_dim: 4,
            ..Self::default()
        }
    }

    fn rng(&self, e: Experiment, sub: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(e.stream() * 1000 + sub);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub name: String,
    pub json: Value,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    fn new(
        name: &str,
        cfg_seed: u64,
        constants: &Constants,
        parameters: Value,
        results: Value,
        table: Table,
        checks: Vec<Check>,
    ) -> Self {
        let json = json!({
            "experiment": name,
            "seed": cfg_seed,
            "constants": ConstantsRecord::from(*constants),
            "parameters": parameters,
            "results": results,
            "checks": checks,
        });
        Self {
            name: name.into(),
            json,
            table,
            checks,
        }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = serde_json::to_string_pretty(&self.json)?;
        std::fs::write(dir.join(format!("{}.json", self.name)), json + "\n")?;
        self.table.write(&dir.join(format!("{}.csv", self.name)))
    }
}

/// Runs experiments, sharing nets between those that need them.
pub struct Runner {
    pub cfg: RunConfig,
    nets: HashMap<u64, UnitaryNet>,
}

impl Runner {
    pub fn new(cfg: RunConfig) -> Self {
        Self {
            cfg,
            nets: HashMap::new(),
        }
    }

    pub fn run(&mut self, e: Experiment) -> Result<ExperimentOutput> {
        match e {
            Experiment::NetBuild => self.net_build(),
            Experiment::NetErrorSweep => self.net_error_sweep(),
            Experiment::TeleportError => self.teleport_error(),
            Experiment::DistortionCheck => self.distortion_check(),
            Experiment::TypeWitness => self.type_witness(),
            Experiment::SynthesizeThm2 => self.synthesize_thm2(),
            Experiment::Bounds => self.bounds(),
        }
    }

    fn net(&mut self, eps: f64) -> Result<&UnitaryNet> {
        let c = &self.cfg;
        match self.nets.entry(eps.to_bits()) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(build_epsilon_net_with(
                c.net_d,
                eps,
                c.seed,
                c.max_candidates,
                c.certify_samples,
            )?)),
        }
    }

    fn output(
        &self,
        e: Experiment,
        parameters: Value,
        results: Value,
        table: Table,
        checks: Vec<Check>,
    ) -> ExperimentOutput {
        ExperimentOutput::new(
            e.name(),
            self.cfg.seed,
            &self.cfg.constants,
            parameters,
            results,
            table,
            checks,
        )
    }

    fn net_build(&mut self) -> Result<ExperimentOutput> {
        let mut t = Table::new(&[
            "d",
            "epsilon",
            "seed",
            "members",
            "log2_members",
            "log2_ub_net",
            "certify_samples",
            "max_residual",
            "certified",
        ]);
        let mut checks = Vec::new();
        let mut results = Vec::new();
        for eps in self.cfg.net_eps.clone() {
            let (d, c_tilde, seed) = (self.cfg.net_d, self.cfg.constants.c_tilde, self.cfg.seed);
            let net = self.net(eps)?;
            t.push(vec![
                d.to_string(),
                fmt_num(eps),
                seed.to_string(),
                net.len().to_string(),
                fmt_num((net.len() as f64).log2()),
                fmt_num(ub_net_log2(d, eps, c_tilde)),
                net.certification.samples.to_string(),
                fmt_num(net.certification.max_residual),
                fmt_bool(net.certified()),
            ]);
            checks.push(Check::new(
                format!("net eps={} certified", fmt_num(eps)),
                net.certified(),
                format!(
                    "max residual {} over {} fresh samples",
                    fmt_num(net.certification.max_residual),
                    net.certification.samples
                ),
            ));
            results.push(json!({
                "epsilon": eps,
                "members": net.len(),
                "certification": net.certification,
            }));
        }
        let params = json!({"d": self.cfg.net_d, "epsilon": self.cfg.net_eps, "max_candidates": self.cfg.max_candidates});
        Ok(self.output(
            Experiment::NetBuild,
            params,
            Value::Array(results),
            t,
            checks,
        ))
    }

    fn net_error_sweep(&mut self) -> Result<ExperimentOutput> {
        let mut t = Table::new(&[
            "epsilon",
            "members",
            "target",
            "half_diamond_error",
            "nearest_op_distance",
            "within_epsilon",
        ]);
        let mut checks = Vec::new();
        let mut results = Vec::new();
        for (k, eps) in self.cfg.net_eps.clone().into_iter().enumerate() {
            let mut rng = self.cfg.rng(Experiment::NetErrorSweep, k as u64);
            let targets: Vec<CMatrix> = (0..self.cfg.targets)
                .map(|_| haar_unitary(self.cfg.net_d, &mut rng))
                .collect();
            let net = self.net(eps)?.clone();
            let inst = ProcessorSpec::NetMembers { net }.instantiate()?;
            let net = inst.net.as_ref().unwrap();
            let rows: Vec<(f64, f64)> = targets
                .par_iter()
                .map(|u| Ok((inst.program_error(u)?.half_diamond_error, net.nearest(u).1)))
                .collect::<Result<_>>()?;
            let mut worst: f64 = 0.0;
            for (i, &(err, near)) in rows.iter().enumerate() {
                worst = worst.max(err);
                t.push(vec![
                    fmt_num(eps),
                    net.len().to_string(),
                    i.to_string(),
                    fmt_num(err),
                    fmt_num(near),
                    fmt_bool(err <= eps),
                ]);
            }
            let mean = rows.iter().map(|r| r.0).sum::<f64>() / rows.len().max(1) as f64;
            checks.push(Check::new(
                format!(
                    "net eps={} error <= eps on {} Haar targets",
                    fmt_num(eps),
                    rows.len()
                ),
                net.certified() && worst <= eps,
                format!("worst {} mean {}", fmt_num(worst), fmt_num(mean)),
            ));
            results.push(json!({"epsilon": eps, "members": net.len(), "worst_error": worst, "mean_error": mean}));
        }
        let params =
            json!({"d": self.cfg.net_d, "epsilon": self.cfg.net_eps, "targets": self.cfg.targets});
        Ok(self.output(
            Experiment::NetErrorSweep,
            params,
            Value::Array(results),
            t,
            checks,
        ))
    }

    fn teleport_error(&mut self) -> Result<ExperimentOutput> {
        let mut t = Table::new(&[
            "d",
            "target",
            "half_diamond_error",
            "expected",
            "abs_deviation",
            "method",
        ]);
        let mut checks = Vec::new();
        let mut results = Vec::new();
        let n = self.cfg.targets.clamp(1, 20);
        for (k, &d) in self.cfg.teleport_d.iter().enumerate() {
            let p = build_teleportation_processor(d)?;
            let mut rng = self.cfg.rng(Experiment::TeleportError, k as u64);
            let targets: Vec<CMatrix> = (0..n).map(|_| haar_unitary(d, &mut rng)).collect();
            let expected = 1.0 - 1.0 / (d * d) as f64;
            let reports = targets
                .par_iter()
                .map(|u| programming_error_with_tol(&p, u, &teleportation_program(u)?, SDP_TOL))
                .collect::<upqp_core::Result<Vec<_>>>()?;
            let mut worst_dev: f64 = 0.0;
            for (i, r) in reports.iter().enumerate() {
                let dev = (r.half_diamond_error - expected).abs();
                worst_dev = worst_dev.max(dev);
                t.push(vec![
                    d.to_string(),
                    i.to_string(),
                    fmt_num(r.half_diamond_error),
                    fmt_num(expected),
                    fmt_num(dev),
                    serde_json::to_value(r.method)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                ]);
            }
            checks.push(Check::new(
                format!("teleport d={d} error = 1 - 1/d^2"),
                worst_dev <= 1e-6,
                format!(
                    "worst deviation {} from {}",
                    fmt_num(worst_dev),
                    fmt_num(expected)
                ),
            ));
            results.push(
                json!({"d": d, "expected": expected, "worst_deviation": worst_dev, "targets": n}),
            );
        }
        let params = json!({"d": self.cfg.teleport_d, "targets": n, "sdp_tol": SDP_TOL});
        Ok(self.output(
            Experiment::TeleportError,
            params,
            Value::Array(results),
            t,
            checks,
        ))
    }

    fn distortion_check(&mut self) -> Result<ExperimentOutput> {
        let samples = self.cfg.distortion_samples;
        let seed = self.cfg.seed;
        let mut cases: Vec<(String, Processor, Option<f64>)> = Vec::new();
        for &d in &self.cfg.teleport_d {
            cases.push((
                format!("teleport d={d}"),
                build_teleportation_processor(d)?,
                Some(1.0 - 1.0 / (d * d) as f64),
            ));
        }
        let eps = self
            .cfg
            .net_eps
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let net = self.net(eps)?.clone();
        let inst = ProcessorSpec::NetMembers { net }.instantiate()?;
        cases.push((
            format!("net eps={}", fmt_num(eps)),
            inst.processor.clone(),
            inst.certified_accuracy(),
        ));
        let mut rng = self.cfg.rng(Experiment::DistortionCheck, 0);
        let v: CMatrix = haar_unitary(4, &mut rng);
        cases.push((
            "haar unitary d=2 m=2".into(),
            Processor::unitary(v, 2, 2)?,
            None,
        ));

        let mut t = Table::new(&[
            "case",
            "d",
            "m",
            "unitary",
            "samples",
            "min_ratio",
            "max_ratio",
            "accuracy",
            "predicted_min",
            "lower_ok",
            "upper_ok",
        ]);
        let mut checks = Vec::new();
        let mut results = Vec::new();
        for (label, p, acc) in cases {
            let rep = distortion(&p, samples, seed)?;
            let predicted = acc.map(|e| (1.0 - e).max(0.0).sqrt());
            let lower_ok = predicted.map(|b| rep.sampled_min_ratio >= b - 1e-6);
            let upper_ok = p
                .is_unitary()
                .then_some(rep.sampled_max_ratio <= 1.0 + 1e-8);
            if let Some(ok) = lower_ok {
                checks.push(Check::new(
                    format!("{label}: min ratio >= sqrt(1 - eps)"),
                    ok,
                    format!(
                        "min {} bound {}",
                        fmt_num(rep.sampled_min_ratio),
                        fmt_num(predicted.unwrap())
                    ),
                ));
            }
            if let Some(ok) = upper_ok {
                checks.push(Check::new(
                    format!("{label}: max ratio <= 1"),
                    ok,
                    format!("max {}", fmt_num(rep.sampled_max_ratio)),
                ));
            }
            let opt = |x: Option<bool>| x.map(fmt_bool).unwrap_or_default();
            t.push(vec![
                label.clone(),
                p.d().to_string(),
                p.m().to_string(),
                fmt_bool(p.is_unitary()),
                samples.to_string(),
                fmt_num(rep.sampled_min_ratio),
                fmt_num(rep.sampled_max_ratio),
                acc.map(fmt_num).unwrap_or_default(),
                predicted.map(fmt_num).unwrap_or_default(),
                opt(lower_ok),
                opt(upper_ok),
            ]);
            results.push(json!({"case": label, "report": rep, "accuracy": acc}));
        }
        let params = json!({"samples": samples});
        Ok(self.output(
            Experiment::DistortionCheck,
            params,
            Value::Array(results),
            t,
            checks,
        ))
    }

    fn type_witness(&mut self) -> Result<ExperimentOutput> {
        let c = self.cfg.constants.c;
        let mut t = Table::new(&[
            "case",
            "d",
            "m_prime",
            "epsilon",
            "sqrt_d",
            "ratio",
            "middle",
            "type2_bound",
            "upper",
            "lower_holds",
            "upper_holds",
            "log2_m_lower",
        ]);
        let mut checks = Vec::new();
        let mut results = Vec::new();

        let mut worst_family: f64 = 0.0;
        for d in 2..=self.cfg.max_family_dim {
            let est = rademacher_average(
                &diagonal_family(d),
                NormSpace::TraceNorm,
                RademacherMode::Exact,
                "diagonal units",
            )?;
            let sqrt_d = (d as f64).sqrt();
            worst_family = worst_family.max((est.ratio - sqrt_d).abs());
            t.push(vec![
                "diagonal family".into(),
                d.to_string(),
                String::new(),
                String::new(),
                fmt_num(sqrt_d),
                fmt_num(est.ratio),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        checks.push(Check::new(
            format!(
                "diagonal family ratio = sqrt(d) for d <= {}",
                self.cfg.max_family_dim
            ),
            worst_family <= 1e-12,
            format!("worst deviation {}", fmt_num(worst_family)),
        ));

        let mut type2_ok = true;
        for m in [2usize, 4, 16, 256, 1 << 20] {
            let b = type2_upper_bound_with(m, c)?;
            type2_ok &= (b - (c * (m as f64).log2()).sqrt()).abs() <= 1e-12 * b;
        }
        checks.push(Check::new(
            "type-2 bound equals sqrt(C log2 m)",
            type2_ok,
            format!("C = {}", fmt_num(c)),
        ));

        let eps = self
            .cfg
            .net_eps
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let net = self.net(eps)?.clone();
        let inst = ProcessorSpec::NetMembers { net }.instantiate()?;
        let mut chains = vec![(
            "net".to_string(),
            inst.processor.clone(),
            inst.certified_accuracy(),
        )];
        for &d in &self.cfg.teleport_d {
            chains.push((
                format!("teleport d={d}"),
                build_teleportation_processor(d)?,
                Some(1.0 - 1.0 / (d * d) as f64),
            ));
        }
        for (label, p, acc) in chains {
            let Some(eps) = acc else {
                checks.push(Check::new(
                    format!("{label}: chain"),
                    false,
                    "no certified accuracy",
                ));
                continue;
            };
            let w = memory_lower_bound_witness_with(&p, eps, c)?;
            match &w.chain {
                Some(ch) => {
                    t.push(vec![
                        label.clone(),
                        ch.d.to_string(),
                        ch.m_prime.to_string(),
                        fmt_num(eps),
                        fmt_num(ch.sqrt_d),
                        fmt_num(ch.image.ratio),
                        fmt_num(ch.middle),
                        fmt_num(ch.type2_bound),
                        fmt_num(ch.upper),
                        fmt_bool(ch.lower_holds),
                        fmt_bool(ch.upper_holds),
                        fmt_num(w.bound.log2_m),
                    ]);
                    checks.push(Check::new(
                        format!("{label}: sqrt(d) <= middle <= upper"),
                        ch.holds(),
                        format!(
                            "{} <= {} <= {}",
                            fmt_num(ch.sqrt_d),
                            fmt_num(ch.middle),
                            fmt_num(ch.upper)
                        ),
                    ));
                }
                None => checks.push(Check::new(
                    format!("{label}: chain"),
                    true,
                    "vacuous for eps >= 1",
                )),
            }
            results.push(json!({"case": label, "witness": w}));
        }
        let params = json!({"max_family_dim": self.cfg.max_family_dim, "net_epsilon": eps});
        Ok(self.output(
            Experiment::TypeWitness,
            params,
            Value::Array(results),
            t,
            checks,
        ))
    }

    fn synthesize_thm2(&mut self) -> Result<ExperimentOutput> {
        let d = 2;
        let swap = swap_matrix(d);
        let map = EmbeddingMap::from_matrix(swap.clone(), d)?;
        let rep = map.distortion(self.cfg.distortion_samples, self.cfg.seed)?;
        let delta = rep.delta();
        let inst = ProcessorSpec::Synthesized {
            map: swap,
            d,
            delta,
        }
        .instantiate()?;
        let s = inst.synthesis.as_ref().unwrap();
        let m_in = d;
        let bound = (2.0 * delta).sqrt();
        let mut rng = self.cfg.rng(Experiment::SynthesizeThm2, 0);
        let targets: Vec<CMatrix> = (0..self.cfg.synth_targets)
            .map(|_| haar_unitary(d, &mut rng))
            .collect();
        let programs = targets
            .par_iter()
            .map(|u| s.program_for_with_tol(u, SDP_TOL))
            .collect::<upqp_core::Result<Vec<_>>>()?;
        let mut t = Table::new(&[
            "target",
            "half_diamond_error",
            "functional_bound",
            "q",
            "source",
            "sqrt_2delta",
            "within",
        ]);
        let mut worst: f64 = 0.0;
        let mut functional_ok = true;
        for (i, p) in programs.iter().enumerate() {
            let e = p.report.half_diamond_error;
            worst = worst.max(e);
            functional_ok &= e <= p.functional_bound + 1e-6;
            t.push(vec![
                i.to_string(),
                fmt_num(e),
                fmt_num(p.functional_bound),
                fmt_num(p.q),
                serde_json::to_value(p.source)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
                fmt_num(bound),
                fmt_bool(e <= bound + 1e-6),
            ]);
        }
        let m = s.processor.m();
        let checks = vec![
            Check::new(
                "synthesized error <= sqrt(2 delta)",
                worst <= bound + 1e-6,
                format!(
                    "worst {} bound {} (delta {})",
                    fmt_num(worst),
                    fmt_num(bound),
                    fmt_num(delta)
                ),
            ),
            Check::new(
                "synthesized error <= functional guarantee",
                functional_ok,
                "",
            ),
            Check::new(
                "synthesized memory <= d m^3",
                m <= d * m_in.pow(3),
                format!("memory {m}, d m^3 = {}", d * m_in.pow(3)),
            ),
        ];
        let results = json!({
            "distortion": rep,
            "measured_delta": delta,
            "sqrt_2delta": bound,
            "achieved_delta": s.achieved_delta,
            "delta_exceeded": s.delta_exceeded,
            "memory_dim": m,
            "program_state_finder": s.program_state_finder,
            "worst_error": worst,
        });
        let params = json!({"map": "swap", "d": d, "m": m_in, "samples": self.cfg.distortion_samples, "targets": self.cfg.synth_targets});
        Ok(self.output(Experiment::SynthesizeThm2, params, results, t, checks))
    }

    fn bounds(&mut self) -> Result<ExperimentOutput> {
        let k = self.cfg.constants;
        let rows = bounds_table(&self.cfg.bounds_d, &self.cfg.bounds_eps, &k)?;
        let t = bounds_csv(&rows, &k);
        let example = crate::bounds::bounds_row(100, 0.0, &k);
        let majenz = crate::bounds::bounds_row(2, 0.5, &k);
        let floor = corollary_epsilon_floor(1024, 1.0, 2.0, k.c)?;
        let checks = vec![
            Check::new(
                "unitary lower bound at d=100, eps=0 is 2^25",
                example.lb_thm3_unitary.log2 == 25.0
                    && example.lb_thm3_unitary.value == Some(33_554_432.0),
                format!("log2 {}", fmt_num(example.lb_thm3_unitary.log2)),
            ),
            Check::new(
                "majenz bound at d=2, eps=0.5 is 16",
                majenz.lb_majenz.value == Some(16.0),
                "",
            ),
            Check::new(
                "corollary constant C' = 32 for k=1, s=2, C=4",
                floor.c_prime == 32.0,
                fmt_num(floor.c_prime),
            ),
            Check::new(
                "corollary floor at d=1024 is 0.6875",
                floor.floor == 0.6875,
                fmt_num(floor.floor),
            ),
        ];
        let params = json!({"d": self.cfg.bounds_d, "epsilon": self.cfg.bounds_eps});
        let results = json!({"rows": rows, "corollary_example": floor});
        Ok(self.output(Experiment::Bounds, params, results, t, checks))
    }
}

/// `SWAP` on `H_d ⊗ H_d`.
pub fn swap_matrix(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, c| {
        if r == (c % d) * d + c / d {
            1.0.into()
        } else {
            0.0.into()
        }
    })
}

/// Programming errors of an arbitrary processor on seeded Haar targets.
pub fn error_table(inst: &Instance, targets: usize, seed: u64) -> Result<(Table, Vec<f64>)> {
    let d = inst.processor.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let us: Vec<CMatrix> = (0..targets).map(|_| haar_unitary(d, &mut rng)).collect();
    let errs: Vec<f64> = us
        .par_iter()
        .map(|u| Ok(inst.program_error(u)?.half_diamond_error))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["processor", "target", "half_diamond_error"]);
    for (i, e) in errs.iter().enumerate() {
        t.push(vec![inst.label.clone(), i.to_string(), fmt_num(*e)]);
    }
    Ok((t, errs))
}
