//! `estimand` - simulate, check and dissect composite-strategy estimands in
//! two-arm trials.
//!
//! Subcommands:
//!
//! - `simulate`: run the seeded Monte Carlo study and report the performance
//!   measures (mean risk difference, rejection fraction, mean excess events)
//!   with Monte Carlo standard errors;
//! - `oracle`: print the closed-form population quantities the simulation
//!   estimates;
//! - `check`: lint an estimand definition for categories that apply to a
//!   proper subset of the arms;
//! - `decompose`: report the potential-outcome decomposition of the
//!   composite contrast on a freshly generated cohort.
//!
//! Exit codes: 0 success (including a causal/unassessed `check` verdict),
//! 1 usage or configuration error, 2 runtime failure, 3 non-causal verdict
//! from `check`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use estimand_core::checker::{check_estimand, Verdict, VerdictStatus};
use estimand_core::config::{parse_estimand_json, parse_scenario_json, ParseError};
use estimand_core::dgm::{assign_arms, cohort_to_csv, generate_cohort, DgmError};
use estimand_core::engine::{reps_to_csv, run_simulation, EngineError, PerformanceSummary};
use estimand_core::model::{validate_scenario, ScenarioConfig, ScenarioError};
use estimand_core::oracle::{summarize_population, OracleSummary};
use estimand_core::outcomes::{decomposition_report, OutcomeError};
use estimand_core::presets;
use estimand_core::seed::mix_seed;

const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "estimand",
    version,
    about = "Simulation engine and linter for composite-strategy estimands in two-arm trials",
    after_help = "Cap simulation workers with the RAYON_NUM_THREADS environment variable; \
                  results are identical for any worker count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the scenario configuration comes from: a JSON file or the preset
/// registry. Exactly one must be given.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Path to a scenario configuration (JSON, strict schema)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Name of a registered preset; an unknown name lists the registry
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo study and report the performance measures
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Override the master seed from the configuration
        #[arg(long)]
        seed: Option<u64>,
        /// Override the replication count from the configuration
        #[arg(long, value_name = "N")]
        reps: Option<u64>,
        /// Directory to write summary.json, reps.csv and manifest.json into
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// What to print on stdout
        #[arg(long, value_enum, default_value_t = SimulateFormat::Json)]
        format: SimulateFormat,
    },
    /// Print the closed-form population quantities implied by a scenario
    Oracle {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Lint an estimand definition for arm-asymmetric event categories
    Check {
        /// Path to an estimand definition (JSON, strict schema)
        #[arg(long, value_name = "FILE")]
        estimand: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckFormat::Text)]
        format: CheckFormat,
    },
    /// Report the potential-outcome decomposition on a generated cohort
    Decompose {
        #[command(flatten)]
        source: Source,
        /// Override the master seed from the configuration
        #[arg(long)]
        seed: Option<u64>,
        /// Number of patients to generate (even)
        #[arg(long, value_name = "N", default_value_t = 1_000_000)]
        cohort_size: u64,
        /// Also dump the generated cohort as CSV to this file
        #[arg(long, value_name = "FILE")]
        dump_cohort: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimulateFormat {
    /// Summary document as pretty-printed JSON
    Json,
    /// Human-readable summary table (same numbers as the JSON)
    Table,
    /// The per-replication table as CSV
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckFormat {
    Text,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("file {0:?} not found")]
    FileNotFound(PathBuf),
    #[error("cannot read {path:?}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path:?}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("unknown preset {name:?}; known presets: {}", known.join(", "))]
    UnknownPreset {
        name: String,
        known: Vec<&'static str>,
    },
    #[error("a simulation needs at least 2 replications, got {0}")]
    TooFewReps(u64),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
}

impl From<DgmError> for CliError {
    fn from(err: DgmError) -> Self {
        CliError::Engine(EngineError::Dgm(err))
    }
}

impl CliError {
    /// 1 for usage/configuration problems, 2 for runtime failures.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::FileNotFound(_)
            | CliError::UnknownPreset { .. }
            | CliError::TooFewReps(_)
            | CliError::Parse(_)
            | CliError::Scenario(_)
            | CliError::Engine(EngineError::Dgm(_)) => 1,
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Engine(_)
            | CliError::Outcome(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Simulate {
            source,
            seed,
            reps,
            out,
            format,
        } => simulate(source, seed, reps, out, format),
        Command::Oracle { source, format } => oracle(source, format),
        Command::Check { estimand, format } => check(&estimand, format),
        Command::Decompose {
            source,
            seed,
            cohort_size,
            dump_cohort,
        } => decompose(source, seed, cohort_size, dump_cohort),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            CliError::FileNotFound(path.to_path_buf())
        } else {
            CliError::Read {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolve the scenario from `--config`/`--preset`, apply overrides, and
/// re-validate. Returns the effective config and the preset name, if any.
fn load_scenario(
    source: &Source,
    seed_override: Option<u64>,
    reps_override: Option<u64>,
) -> Result<(ScenarioConfig, Option<String>), CliError> {
    let (mut config, preset_name) = match (&source.config, &source.preset) {
        (Some(path), None) => (parse_scenario_json(&read_file(path)?)?, None),
        (None, Some(name)) => {
            let config = presets::preset(name).ok_or_else(|| CliError::UnknownPreset {
                name: name.clone(),
                known: presets::PRESET_NAMES.to_vec(),
            })?;
            (config, Some(name.clone()))
        }
        // clap's group makes the source exactly one of the two.
        _ => unreachable!("clap enforces exactly one of --config/--preset"),
    };
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    if let Some(reps) = reps_override {
        config.n_reps = reps;
    }
    let config = validate_scenario(config)?;
    Ok((config, preset_name))
}

/// Summary JSON document: the performance summary plus the effective
/// configuration and the artifact version.
#[derive(Serialize)]
struct SummaryDocument<'a> {
    artifact_version: &'static str,
    config: &'a ScenarioConfig,
    #[serde(flatten)]
    summary: &'a PerformanceSummary,
}

#[derive(Serialize)]
struct ManifestOutputs {
    summary: &'static str,
    reps: &'static str,
}

/// Run manifest: everything needed to reproduce the summary from the
/// per-replication CSV, plus provenance.
#[derive(Serialize)]
struct RunManifest<'a> {
    artifact_version: &'static str,
    preset: &'a Option<String>,
    seed: u64,
    timestamp: String,
    config: &'a ScenarioConfig,
    outputs: ManifestOutputs,
}

fn simulate(
    source: Source,
    seed: Option<u64>,
    reps: Option<u64>,
    out: Option<PathBuf>,
    format: SimulateFormat,
) -> Result<ExitCode, CliError> {
    let (config, preset_name) = load_scenario(&source, seed, reps)?;
    if config.n_reps < 2 {
        return Err(CliError::TooFewReps(config.n_reps));
    }
    let mut output = run_simulation(&config)?;
    output.summary.preset = preset_name;

    let document = SummaryDocument {
        artifact_version: ARTIFACT_VERSION,
        config: &config,
        summary: &output.summary,
    };
    let summary_json = serde_json::to_string_pretty(&document).expect("summary serializes");

    match format {
        SimulateFormat::Json => println!("{summary_json}"),
        SimulateFormat::Table => print!("{}", summary_table(&output.summary)),
        SimulateFormat::Csv => print!("{}", reps_to_csv(&output.reps)),
    }

    if let Some(dir) = out {
        fs::create_dir_all(&dir).map_err(|source| CliError::Write {
            path: dir.clone(),
            source,
        })?;
        write_file(&dir.join("summary.json"), &format!("{summary_json}\n"))?;
        write_file(&dir.join("reps.csv"), &reps_to_csv(&output.reps))?;
        let manifest = RunManifest {
            artifact_version: ARTIFACT_VERSION,
            preset: &output.summary.preset,
            seed: config.seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: &config,
            outputs: ManifestOutputs {
                summary: "summary.json",
                reps: "reps.csv",
            },
        };
        let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        write_file(&dir.join("manifest.json"), &format!("{manifest_json}\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Full-precision table; the numbers are the same bits the JSON carries.
fn summary_table(summary: &PerformanceSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "preset: {}",
        summary.preset.as_deref().unwrap_or("(custom)")
    );
    let _ = writeln!(out, "seed: {}", summary.seed);
    let _ = writeln!(out, "n_reps: {}", summary.n_reps);
    let _ = writeln!(out, "{:<24} {:<24} mcse", "measure", "estimate");
    let mut row = |name: &str, estimate: f64, mcse: f64| {
        let _ = writeln!(out, "{name:<24} {:<24} {}", estimate, mcse);
    };
    row("mean_rd", summary.mean_rd, summary.mcse_rd);
    row(
        "rejection_fraction",
        summary.rejection_fraction,
        summary.mcse_rejection,
    );
    row("mean_excess", summary.mean_excess, summary.mcse_excess);
    row(
        "mean_rd_pp",
        summary.percent.mean_rd_pp,
        summary.percent.mcse_rd_pp,
    );
    row(
        "rejection_pp",
        summary.percent.rejection_pp,
        summary.percent.mcse_rejection_pp,
    );
    out
}

fn oracle(source: Source, format: ReportFormat) -> Result<ExitCode, CliError> {
    let (config, _) = load_scenario(&source, None, None)?;
    let summary = summarize_population(&config)?;
    match format {
        ReportFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("oracle summary serializes")
            );
        }
        ReportFormat::Table => print!("{}", oracle_table(&summary)),
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle_table(summary: &OracleSummary) -> String {
    let mut out = String::new();
    let mut row = |name: &str, value: f64| {
        let _ = writeln!(out, "{name:<24} {value}");
    };
    row("p_event_treat", summary.p_event_treat);
    row("p_event_control", summary.p_event_control);
    row("true_rd", summary.true_rd);
    row("expected_excess", summary.expected_excess);
    row("asymptotic_rejection", summary.asymptotic_rejection);
    out
}

fn check(estimand: &Path, format: CheckFormat) -> Result<ExitCode, CliError> {
    let spec = parse_estimand_json(&read_file(estimand)?)?;
    let verdict = check_estimand(&spec);
    match format {
        CheckFormat::Text => print!("{}", verdict_text(&verdict)),
        CheckFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&verdict).expect("verdict serializes")
            );
        }
    }
    Ok(match verdict.status {
        VerdictStatus::NonCausal => ExitCode::from(3),
        VerdictStatus::Causal | VerdictStatus::Unassessed => ExitCode::SUCCESS,
    })
}

fn verdict_text(verdict: &Verdict) -> String {
    let mut out = String::new();
    match verdict.status {
        VerdictStatus::Causal => {
            let _ = writeln!(out, "verdict: causal");
            let _ = writeln!(
                out,
                "every assessed category applies to all arms; the outcome definition is shared"
            );
        }
        VerdictStatus::Unassessed => {
            let _ = writeln!(out, "verdict: unassessed");
            let _ = writeln!(
                out,
                "no event uses a composite or while-on-treatment strategy"
            );
        }
        VerdictStatus::NonCausal => {
            let _ = writeln!(out, "verdict: non-causal");
            let _ = writeln!(out, "offending categories:");
            for offender in &verdict.offending {
                let _ = writeln!(
                    out,
                    "  - event {:?} ({} strategy): category {:?} cannot occur in: {}",
                    offender.event,
                    offender.strategy,
                    offender.category,
                    offender.missing_arms.join(", ")
                );
            }
        }
    }
    let _ = writeln!(out, "induced outcome definitions:");
    for (arm, definition) in &verdict.rendered_definitions {
        let _ = writeln!(out, "  {arm}: {definition}");
    }
    out
}

fn decompose(
    source: Source,
    seed: Option<u64>,
    cohort_size: u64,
    dump_cohort: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let (mut config, _) = load_scenario(&source, seed, None)?;
    config.n = cohort_size;
    let config = validate_scenario(config)?;

    let mut cohort = generate_cohort(&config, mix_seed(config.seed, 1))?;
    assign_arms(&mut cohort, mix_seed(config.seed, 2))?;
    let report = decomposition_report(&cohort)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("decomposition serializes")
    );
    if let Some(path) = dump_cohort {
        write_file(&path, &cohort_to_csv(&cohort))?;
    }
    Ok(ExitCode::SUCCESS)
}
