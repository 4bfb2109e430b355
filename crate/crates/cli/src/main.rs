use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;
use upqp_cli::bounds::{
    bounds_csv, bounds_table, corollary_csv, corollary_epsilon_floor, Constants, ConstantsRecord,
};
use upqp_cli::experiments::{error_table, Check, Experiment, RunConfig, Runner};
use upqp_cli::format::{fmt_num, read_csv, Table};
use upqp_cli::spec::ProcessorSpec;
use upqp_cli::{parse_f64_range, parse_usize_range};
use upqp_core::banach::{distortion, memory_lower_bound_witness_with, EmbeddingMap};
use upqp_core::processors::{build_epsilon_net_with, net};
use upqp_core::CMatrix;

#[derive(Parser)]
#[command(
    name = "upqp",
    version,
    about = "Programmable quantum processor experiments and memory bounds"
)]
struct Cli {
    /// Use every core for sweeps; results are identical either way.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct ConstantArgs {
    #[arg(long, default_value_t = 1.0)]
    k_perez: f64,
    #[arg(long, default_value_t = 1.0)]
    k_majenz: f64,
    /// Type-2 constant `C`.
    #[arg(long = "type-constant", default_value_t = 4.0)]
    c: f64,
    /// Covering constant `C̃`.
    #[arg(long, default_value_t = 9.0)]
    c_tilde: f64,
}

impl From<ConstantArgs> for Constants {
    fn from(a: ConstantArgs) -> Self {
        Constants {
            k_perez: a.k_perez,
            k_majenz: a.k_majenz,
            c: a.c,
            c_tilde: a.c_tilde,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate memory lower and upper bounds.
    Bounds {
        #[arg(long, default_value = "2:6")]
        d: String,
        #[arg(long, default_value = "0.1:0.9:0.1")]
        eps: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Accuracy floor for memories polynomial in d.
    Corollary {
        #[arg(long)]
        d: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long = "type-constant", default_value_t = 4.0)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an epsilon-net of U(d) and write it as a processor spec.
    Net {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = net::DEFAULT_MAX_CANDIDATES)]
        max_candidates: usize,
        #[arg(long, default_value_t = net::DEFAULT_CERTIFY_SAMPLES)]
        certify_samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Programming error on random target unitaries.
    Error {
        #[arg(long)]
        processor: PathBuf,
        /// `haar:N`.
        #[arg(long, default_value = "haar:100")]
        targets: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampled distortion of the processor's embedding.
    Distortion {
        #[arg(long)]
        processor: PathBuf,
        #[arg(long, default_value_t = upqp_core::banach::DEFAULT_DISTORTION_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type-2 witness and memory lower bound.
    Typewitness {
        #[arg(long)]
        processor: PathBuf,
        /// Error CSV from `upqp error`; its worst error is used as the accuracy.
        #[arg(long, conflicts_with = "eps")]
        eps_cert: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "type-constant", default_value_t = 4.0)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a processor from a contraction.
    Synth {
        /// JSON `{"d": .., "t": matrix, "delta": optional}`.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 20)]
        targets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named experiment, or all of them.
    Run {
        #[arg(value_enum)]
        name: Option<Experiment>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Small parameters for smoke runs.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        constants: ConstantArgs,
    },
}

#[derive(Deserialize)]
struct MapFile {
    d: usize,
    t: CMatrix,
    delta: Option<f64>,
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn write_pair(out: &Path, value: &serde_json::Value, table: &Table) -> Result<()> {
    write_json(&out.with_extension("json"), value)?;
    table.write(&out.with_extension("csv"))
}

fn report(checks: &[Check]) -> bool {
    let mut ok = true;
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {}{}",
            c.name,
            if c.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", c.detail)
            }
        );
        ok &= c.passed;
    }
    ok
}

fn parse_targets(s: &str) -> Result<usize> {
    match s.split_once(':') {
        Some(("haar", n)) => Ok(n.parse()?),
        _ => bail!("targets must look like haar:N, got {s}"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bounds {
            d,
            eps,
            out,
            constants,
        } => {
            let k: Constants = constants.into();
            let rows = bounds_table(&parse_usize_range(&d)?, &parse_f64_range(&eps)?, &k)?;
            write_pair(
                &out,
                &json!({"constants": ConstantsRecord::from(k), "rows": rows}),
                &bounds_csv(&rows, &k),
            )?;
            println!("wrote {} rows", rows.len());
            Ok(true)
        }
        Command::Corollary { d, k, s, c, out } => {
            let rows = parse_usize_range(&d)?
                .into_iter()
                .map(|d| corollary_epsilon_floor(d, k, s, c))
                .collect::<Result<Vec<_>>>()?;
            let t = corollary_csv(&rows, k, s, c);
            match out {
                Some(out) => write_pair(&out, &json!({"k": k, "s": s, "c": c, "rows": rows}), &t)?,
                None => print!("{}", String::from_utf8(t.to_csv()?)?),
            }
            Ok(true)
        }
        Command::Net {
            d,
            eps,
            seed,
            max_candidates,
            certify_samples,
            out,
        } => {
            let net = build_epsilon_net_with(d, eps, seed, max_candidates, certify_samples)?;
            println!(
                "{} members, max residual {} over {} samples",
                net.len(),
                fmt_num(net.certification.max_residual),
                net.certification.samples
            );
            let certified = net.certified();
            write_json(
                &out,
                &serde_json::to_value(ProcessorSpec::NetMembers { net })?,
            )?;
            if !certified {
                println!("FAIL net not certified at resolution {}", fmt_num(eps));
            }
            Ok(certified)
        }
        Command::Error {
            processor,
            targets,
            seed,
            out,
        } => {
            let inst = ProcessorSpec::load(&processor)?.instantiate()?;
            let (t, errs) = error_table(&inst, parse_targets(&targets)?, seed)?;
            let worst = errs.iter().copied().fold(0.0, f64::max);
            let mut checks = Vec::new();
            if let Some(eps) = inst.certified_accuracy() {
                checks.push(Check::new(
                    "error <= certified accuracy",
                    worst <= eps,
                    format!("worst {}", fmt_num(worst)),
                ));
            }
            write_pair(
                &out,
                &json!({"processor": inst.label, "seed": seed, "errors": errs, "worst": worst, "checks": checks}),
                &t,
            )?;
            println!("worst error {}", fmt_num(worst));
            Ok(report(&checks))
        }
        Command::Distortion {
            processor,
            samples,
            seed,
            out,
        } => {
            let inst = ProcessorSpec::load(&processor)?.instantiate()?;
            let rep = distortion(&inst.processor, samples, seed)?;
            println!(
                "min {} max {} cb norm {}",
                fmt_num(rep.sampled_min_ratio),
                fmt_num(rep.sampled_max_ratio),
                fmt_num(upqp_core::banach::cb_norm(&inst.processor)?)
            );
            let mut checks = Vec::new();
            if inst.processor.is_unitary() {
                checks.push(Check::new(
                    "max ratio <= 1",
                    rep.contractive(),
                    fmt_num(rep.sampled_max_ratio),
                ));
            }
            if let Some(eps) = inst.certified_accuracy() {
                let b = (1.0 - eps).sqrt();
                checks.push(Check::new(
                    "min ratio >= sqrt(1 - eps)",
                    rep.sampled_min_ratio >= b - 1e-6,
                    fmt_num(b),
                ));
            }
            if let Some(out) = out {
                write_json(&out, &json!({"report": rep, "checks": checks}))?;
            }
            Ok(report(&checks))
        }
        Command::Typewitness {
            processor,
            eps_cert,
            eps,
            c,
            out,
        } => {
            let inst = ProcessorSpec::load(&processor)?.instantiate()?;
            let eps = match (eps, eps_cert) {
                (Some(e), _) => e,
                (None, Some(path)) => {
                    let t = read_csv(&path)?;
                    let col = t
                        .column("half_diamond_error")
                        .context("error CSV lacks half_diamond_error")?;
                    col.iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()?
                        .into_iter()
                        .fold(0.0, f64::max)
                }
                (None, None) => inst
                    .certified_accuracy()
                    .context("pass --eps or --eps-cert")?,
            };
            let w = memory_lower_bound_witness_with(&inst.processor, eps, c)?;
            let mut checks = Vec::new();
            if let Some(ch) = &w.chain {
                println!(
                    "sqrt(d) {} <= {} <= {}",
                    fmt_num(ch.sqrt_d),
                    fmt_num(ch.middle),
                    fmt_num(ch.upper)
                );
                checks.push(Check::new("type-2 chain", ch.holds(), ""));
            }
            println!(
                "memory >= 2^{} (vacuous: {})",
                fmt_num(w.bound.log2_m),
                w.bound.vacuous
            );
            if let Some(out) = out {
                write_json(
                    &out,
                    &json!({"epsilon": eps, "witness": w, "checks": checks}),
                )?;
            }
            Ok(report(&checks))
        }
        Command::Synth {
            map,
            targets,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&map)
                .with_context(|| format!("reading {}", map.display()))?;
            let f: MapFile = serde_json::from_str(&text)?;
            let delta = match f.delta {
                Some(d) => d,
                None => EmbeddingMap::from_matrix(f.t.clone(), f.d)?
                    .distortion(2000, seed)?
                    .delta(),
            };
            let inst = ProcessorSpec::Synthesized {
                map: f.t,
                d: f.d,
                delta,
            }
            .instantiate()?;
            let s = inst.synthesis.as_ref().unwrap();
            let (t, errs) = error_table(&inst, targets, seed)?;
            let worst = errs.iter().copied().fold(0.0, f64::max);
            let bound = (2.0 * delta).sqrt();
            let checks = vec![Check::new(
                "error <= sqrt(2 delta)",
                worst <= bound + 1e-6,
                format!("worst {} bound {}", fmt_num(worst), fmt_num(bound)),
            )];
            write_json(
                &out,
                &serde_json::to_value(ProcessorSpec::Processor {
                    processor: s.processor.clone(),
                })?,
            )?;
            write_json(
                &out.with_extension("report.json"),
                &json!({"delta": delta, "synthesis": s, "errors": errs, "checks": checks}),
            )?;
            t.write(&out.with_extension("csv"))?;
            Ok(report(&checks))
        }
        Command::Run {
            name,
            all,
            out,
            seed,
            quick,
            constants,
        } => {
            let mut cfg = if quick {
                RunConfig::quick()
            } else {
                RunConfig::default()
            };
            cfg.seed = seed;
            cfg.constants = constants.into();
            let list: Vec<Experiment> = match (name, all) {
                (Some(n), false) => vec![n],
                (None, true) => Experiment::ALL.to_vec(),
                _ => bail!("give exactly one of an experiment name or --all"),
            };
            let mut runner = Runner::new(cfg);
            let mut failures = Vec::new();
            for e in list {
                let o = runner.run(e)?;
                o.write(&out)?;
                println!("== {}", o.name);
                report(&o.checks);
                failures.extend(
                    o.failures()
                        .into_iter()
                        .map(|c| json!({"experiment": o.name, "check": c})),
                );
            }
            let ok = failures.is_empty();
            write_json(
                &out.join("report.json"),
                &json!({"passed": ok, "failures": failures}),
            )?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.parallel {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()
            .expect("configuring the thread pool");
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
