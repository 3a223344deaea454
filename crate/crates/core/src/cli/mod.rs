//! Command surface of the `redgreen` binary.
//!
//! Exit codes: 0 success, 2 validation failure, 3 equal-setting violation
//! found by `verify`, 4 I/O failure.

pub mod records;
pub mod report;
pub mod spec;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::models::{AdaptiveStrategy, QuantumReference};
use crate::rational::{ratio, Ratio};
use crate::referee::{
    locality_replay_check, run_adaptive_experiment, run_experiment_sharded, ExperimentConfig,
    LocalityVerdict, RefereeError, ReplayTarget,
};
use crate::stats::{tally, StatsError};
use crate::types::{RunRecord, SettingPair};
use crate::verifier;

use report::{
    AnalyzeReport, ComplianceDoc, EnumerateReport, EnumerationRowDoc, Exact, LocalityDoc,
    SimulateConfig, SimulateReport, Statistics, VerifyReport, VERSION,
};
use spec::{AdaptiveModel, Model, ModelSpecDocument};

/// Probes used for the locality check embedded in simulate reports.
pub const LOCALITY_PROBES: u64 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid model document at {}: {message}", if path.is_empty() { "<root>" } else { path.as_str() })]
    Validation { path: String, message: String },
    #[error("records line {line}: malformed record {content:?}")]
    MalformedRecord { line: usize, content: String },
    #[error("{0}")]
    Stats(#[from] StatsError),
    #[error("{0}")]
    Referee(#[from] RefereeError),
    #[error("{0}")]
    Unsupported(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            _ => EXIT_VALIDATION,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "redgreen",
    version,
    about = "Simulate and verify the red/green two-detector Bell experiment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment on a model and report the statistics.
    Simulate {
        /// Model document (JSON).
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report destination; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the raw run records here.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Parallel workers for non-adaptive models. Does not change results.
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Let the source see the ambient condition before preparing.
        #[arg(long)]
        ambient_at_source: bool,
    },
    /// Exact analysis of an instruction-set, mixture or microsetting model.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate all eight instruction sets and the resulting bound.
    Enumerate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute statistics from a records file.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulateOptions {
    pub trials: u64,
    pub seed: u64,
    pub shards: usize,
    pub ambient_at_source: bool,
}

impl SimulateOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimulateOptions {
            trials,
            seed,
            shards: 1,
            ambient_at_source: false,
        }
    }
}

impl AdaptiveStrategy for AdaptiveModel {
    fn next(&self, history: &[RunRecord]) -> Vec<Ratio> {
        match self {
            AdaptiveModel::Constant(s) => s.next(history),
            AdaptiveModel::Parity(s) => s.next(history),
            AdaptiveModel::LeastSame(s) => s.next(history),
        }
    }
}

fn locality<T: ReplayTarget>(model: &T, seed: u64) -> LocalityDoc {
    match locality_replay_check(model, seed, LOCALITY_PROBES) {
        LocalityVerdict::Pass => LocalityDoc {
            passed: true,
            witness: None,
        },
        LocalityVerdict::Fail(w) => LocalityDoc {
            passed: false,
            witness: Some(w),
        },
    }
}

fn quantum_same_fraction(q: &QuantumReference) -> Ratio {
    SettingPair::all()
        .map(|p| q.table().same_color(p))
        .sum::<Ratio>()
        * ratio(1, 9)
}

/// Records, exact same-color expectation (when one exists) and locality
/// verdict (for models that can be probed).
type ModelRun = (Vec<RunRecord>, Option<Ratio>, Option<LocalityDoc>);

fn run_model(model: &Model, opts: &SimulateOptions) -> Result<ModelRun, CliError> {
    let cfg = ExperimentConfig {
        trials: opts.trials,
        seed: opts.seed,
        ambient_at_source: opts.ambient_at_source,
    };
    let shards = opts.shards;
    Ok(match model {
        Model::QuantumReference(q) => (
            run_experiment_sharded(q, &cfg, shards)?,
            Some(quantum_same_fraction(q)),
            None,
        ),
        Model::NonlocalControl(c) => {
            let q = QuantumReference::new(c.table().clone());
            (
                run_experiment_sharded(c, &cfg, shards)?,
                Some(quantum_same_fraction(&q)),
                Some(locality(c, opts.seed)),
            )
        }
        Model::InstructionSet(s) => (
            run_experiment_sharded(s, &cfg, shards)?,
            Some(verifier::same_fraction(*s)),
            Some(locality(s, opts.seed)),
        ),
        Model::Mixture(m) => (
            run_experiment_sharded(m, &cfg, shards)?,
            Some(verifier::mixture_same_fraction(m)),
            Some(locality(m, opts.seed)),
        ),
        Model::Microsetting(m) => (
            run_experiment_sharded(m, &cfg, shards)?,
            verifier::exact_same_fraction(m).ok(),
            Some(locality(m, opts.seed)),
        ),
        Model::Adaptive(a) => (
            run_adaptive_experiment(a, opts.trials, opts.seed)?,
            None,
            None,
        ),
    })
}

pub fn simulate(
    doc: &ModelSpecDocument,
    opts: &SimulateOptions,
) -> Result<(SimulateReport, Vec<RunRecord>), CliError> {
    let model = doc.build()?;
    let (records, exact, locality) = run_model(&model, opts)?;
    let statistics = Statistics::from_tally(&tally(&records))?;
    let report = SimulateReport {
        command: "simulate",
        version: VERSION,
        config: SimulateConfig {
            model: doc.clone(),
            trials: opts.trials,
            seed: opts.seed,
            ambient_at_source: opts.ambient_at_source,
        },
        statistics,
        exact_same_fraction: exact.map(Exact),
        locality,
    };
    Ok((report, records))
}

pub fn verify(doc: &ModelSpecDocument) -> Result<VerifyReport, CliError> {
    let bound = verifier::min_same_fraction_over_mixtures().minimum;
    let compliant = ComplianceDoc {
        compliant: true,
        witness: None,
    };
    let (compliance, exact, collapse) = match doc.build()? {
        Model::InstructionSet(s) => (compliant, Some(verifier::same_fraction(s)), None),
        Model::Mixture(m) => (compliant, Some(verifier::mixture_same_fraction(&m)), None),
        Model::Microsetting(m) => {
            let report = verifier::collapse_analysis(&m);
            let compliance = ComplianceDoc {
                compliant: report.witness.is_none(),
                witness: report.witness.as_ref().map(Into::into),
            };
            (
                compliance,
                verifier::exact_same_fraction(&m).ok(),
                Some((&report).into()),
            )
        }
        _ => return Err(CliError::Unsupported(format!(
            "verify supports instruction-set, instruction-mixture and microsetting models, not {}",
            doc.kind()
        ))),
    };
    Ok(VerifyReport {
        command: "verify",
        version: VERSION,
        model: doc.clone(),
        meets_bound: exact.as_ref().map(|e| *e >= bound),
        exact_same_fraction: exact.map(Exact),
        bound: Exact(bound),
        compliance,
        collapse,
    })
}

pub fn enumerate() -> EnumerateReport {
    let bound = verifier::min_same_fraction_over_mixtures();
    EnumerateReport {
        command: "enumerate",
        version: VERSION,
        instruction_sets: bound
            .vertices
            .iter()
            .map(|r| EnumerationRowDoc {
                set: r.set,
                same_fraction: Exact(r.same_fraction.clone()),
                pure: r.pure,
            })
            .collect(),
        bound: (&bound).into(),
        certificate: (&verifier::incompatibility_certificate()).into(),
    }
}

pub fn analyze(text: &str) -> Result<AnalyzeReport, CliError> {
    let records = records::parse_records(text)?;
    Ok(AnalyzeReport {
        command: "analyze",
        version: VERSION,
        statistics: Statistics::from_tally(&tally(&records))?,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_document(path: &Path) -> Result<ModelSpecDocument, CliError> {
    spec::parse_document(&read(path)?)
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Simulate {
            model,
            trials,
            seed,
            out,
            records,
            shards,
            ambient_at_source,
        } => {
            let doc = load_document(&model)?;
            let opts = SimulateOptions {
                trials,
                seed,
                shards,
                ambient_at_source,
            };
            let (report, recs) = simulate(&doc, &opts)?;
            if let Some(path) = records {
                write(&path, &records::write_records(&recs))?;
            }
            emit(out.as_deref(), &report::to_json(&report))?;
            Ok(EXIT_OK)
        }
        Command::Verify { model, out } => {
            let report = verify(&load_document(&model)?)?;
            emit(out.as_deref(), &report::to_json(&report))?;
            Ok(if report.compliance.compliant {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        Command::Enumerate { out } => {
            emit(out.as_deref(), &report::to_json(&enumerate()))?;
            Ok(EXIT_OK)
        }
        Command::Analyze { records, out } => {
            let report = analyze(&read(&records)?)?;
            emit(out.as_deref(), &report::to_json(&report))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
