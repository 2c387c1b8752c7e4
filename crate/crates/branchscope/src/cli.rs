//! Command-line interface: `enumerate`, `estimate`, `validate`, `report`,
//! and `serve`.
//!
//! Exit codes: 0 on success, 1 on runtime failures (and on validation
//! mismatches or a dead initial state), 2 on usage errors, including
//! unreadable or malformed input CSV.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::env::StateKey;
use crate::enumeration::{bfs_enumerate_with, id_enumerate_with, EnumerationConfig};
use crate::envs::server::{serve, ServeOptions};
use crate::envs::{make_env, parse_params, MakeEnvError, BUILTIN_ENVS};
use crate::estimator::{estimate_branching, estimate_from_trace};
use crate::report::{self, format_branching, ResultRow};
use crate::trace::Termination;
use crate::validator;

/// Environment variable overriding the seen-set memory budget, in MiB.
pub const MEM_LIMIT_VAR: &str = "BRANCHSCOPE_MEM_LIMIT_MB";

/// Upper bound on no-op steps taken by `--warmup`.
pub const WARMUP_MAX_STEPS: u32 = 10_000;

#[derive(Parser)]
#[command(
    name = "branchscope",
    version,
    about = "Estimates branching factors of deterministic environments by exhaustive state enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate distinct states frame by frame and write the trace as CSV.
    Enumerate(EnumerateArgs),
    /// Estimate the branching factor from a state count and frame number.
    Estimate(EstimateArgs),
    /// Run both engines on an environment and report any disagreement.
    Validate(ValidateArgs),
    /// Aggregate a directory of trace CSVs into one results table.
    Report(ReportArgs),
    /// Expose an environment over the line protocol on stdin/stdout.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Bfs,
    Id,
}

#[derive(clap::Args)]
struct EnumerateArgs {
    /// Environment name (a built-in, or `adapter` with `--param cmd=...`).
    #[arg(long)]
    env: String,
    /// Environment parameter, repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Stop once this many distinct states have been counted.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    #[arg(long, value_enum, default_value_t = Engine::Bfs)]
    engine: Engine,
    /// Advance past a dead initial state with no-ops before enumerating.
    #[arg(long)]
    warmup: bool,
    /// Trace CSV destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker count for frame expansion; never changes the output.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Deduplicate on 128-bit fingerprints instead of full keys.
    #[arg(long)]
    fingerprint: bool,
}

#[derive(clap::Args)]
#[command(group = ArgGroup::new("source").required(true).args(["states", "trace"]))]
struct EstimateArgs {
    /// Distinct states observed by frame `--frames`.
    #[arg(long, requires = "frames")]
    states: Option<u64>,
    /// Frame at which the count was taken.
    #[arg(long, requires = "states")]
    frames: Option<u32>,
    /// Read states/frames from the final row of a trace CSV instead.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(group = ArgGroup::new("target").required(true).args(["env", "all_builtin"]))]
struct ValidateArgs {
    /// Environment name.
    #[arg(long)]
    env: Option<String>,
    /// Environment parameter, repeatable.
    #[arg(long = "param", value_name = "K=V", conflicts_with = "all_builtin")]
    params: Vec<String>,
    /// Cross-check every built-in environment with default parameters.
    #[arg(long)]
    all_builtin: bool,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Mismatch CSV destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// Directory of trace CSVs produced by `enumerate`.
    #[arg(long, value_name = "DIR")]
    traces: PathBuf,
    /// Results CSV destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ServeArgs {
    /// Environment name.
    #[arg(long)]
    env: String,
    /// Environment parameter, repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Answer `INIT` with this key (hex) instead of the real initial state.
    #[arg(long, value_name = "HEX")]
    init_override: Option<String>,
    /// Serve the override only after this many honest `INIT` replies.
    #[arg(long, value_name = "N", default_value_t = 1)]
    init_override_after: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(message: impl std::fmt::Display) -> CliError {
    CliError::Usage(message.to_string())
}

fn runtime(message: impl std::fmt::Display) -> CliError {
    CliError::Runtime(message.to_string())
}

fn from_make_env(error: MakeEnvError) -> CliError {
    match error {
        MakeEnvError::Env(inner) => runtime(inner),
        other => usage(other),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate(args) => cmd_enumerate(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Report(args) => cmd_report(&args),
        Command::Serve(args) => cmd_serve(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.code())
        }
    }
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<ExitCode, CliError> {
    if args.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let params = parse_params(&args.params).map_err(from_make_env)?;
    let mut env = make_env(&args.env, &params).map_err(from_make_env)?;

    if args.warmup {
        let warm = validator::warm_up(env.as_mut(), WARMUP_MAX_STEPS).map_err(runtime)?;
        if warm.steps > 0 {
            eprintln!("warmed up: {} no-op step(s)", warm.steps);
        }
    } else if validator::detect_dead_initial(env.as_mut()).map_err(runtime)? {
        eprintln!("warning: dead initial state detected; rerun with --warmup");
        return Ok(ExitCode::from(1));
    }

    let mut config = EnumerationConfig::new(args.cap);
    config.workers = args.workers;
    config.fingerprint = args.fingerprint;
    if let Some(budget) = seen_budget_from_env()? {
        config.seen_budget_bytes = budget;
    }
    let trace = match args.engine {
        Engine::Bfs => bfs_enumerate_with(env.as_mut(), &config),
        Engine::Id => id_enumerate_with(env.as_mut(), &config),
    }
    .map_err(runtime)?;

    let sink = open_sink(args.out.as_deref())?;
    report::write_trace(sink, &args.env, &trace.records).map_err(runtime)?;

    match estimate_from_trace(&trace) {
        Ok(estimate) => {
            let note = match trace.terminated_by {
                Termination::FrontierExhausted => " (frontier exhausted)",
                Termination::CapReached => "",
            };
            eprintln!(
                "env={} frames={} states={} b={}{note}",
                args.env,
                estimate.frames,
                estimate.states,
                format_branching(estimate.b)
            );
        }
        Err(_) => eprintln!("env={} trace too short to estimate b", args.env),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(args: &EstimateArgs) -> Result<ExitCode, CliError> {
    let (states, frames) = match (&args.trace, args.states, args.frames) {
        (Some(path), _, _) => {
            let file = File::open(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let rows = report::read_trace(file)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let last = rows
                .last()
                .ok_or_else(|| usage(format!("{} has no data rows", path.display())))?;
            (last.record.cumulative_states, last.record.frame)
        }
        (None, Some(states), Some(frames)) => (states, frames),
        _ => return Err(usage("provide --trace or both --states and --frames")),
    };
    let estimate = estimate_branching(states, frames).map_err(usage)?;
    println!("b={}", format_branching(estimate.b));
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: &ValidateArgs) -> Result<ExitCode, CliError> {
    let targets: Vec<(String, BTreeMap<String, String>)> = if args.all_builtin {
        BUILTIN_ENVS
            .iter()
            .map(|name| (name.to_string(), BTreeMap::new()))
            .collect()
    } else {
        let name = args.env.clone().expect("clap enforces the target group");
        vec![(name, parse_params(&args.params).map_err(from_make_env)?)]
    };

    let mut config = EnumerationConfig::new(args.cap);
    if let Some(budget) = seen_budget_from_env()? {
        config.seen_budget_bytes = budget;
    }

    let mut records = Vec::with_capacity(targets.len());
    for (name, params) in &targets {
        let mut env = make_env(name, params).map_err(from_make_env)?;
        let record = validator::cross_check_with(env.as_mut(), &config).map_err(runtime)?;
        records.push(record);
    }

    let sink = open_sink(args.out.as_deref())?;
    report::write_mismatches(sink, &records).map_err(runtime)?;

    if records.iter().all(|r| r.b_diff == 0.0) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_report(args: &ReportArgs) -> Result<ExitCode, CliError> {
    let entries = std::fs::read_dir(&args.traces)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.traces.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|entry| entry.path())
        .filter(|path| path.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(usage(format!(
            "no trace CSVs found in {}",
            args.traces.display()
        )));
    }

    let mut results = Vec::new();
    for path in &paths {
        let file =
            File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let rows = report::read_trace(file)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let groups =
            report::group_traces(&rows).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        for (env, records) in groups {
            let last = records.last().expect("group is never empty");
            match estimate_branching(last.cumulative_states, last.frame) {
                Ok(estimate) => results.push(ResultRow {
                    env,
                    frames: estimate.frames,
                    states: estimate.states,
                    branching_factor: estimate.b,
                }),
                Err(_) => {
                    eprintln!("warning: skipping '{env}': trace too short to estimate");
                }
            }
        }
    }

    let sink = open_sink(args.out.as_deref())?;
    report::write_results(sink, results).map_err(runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(args: &ServeArgs) -> Result<ExitCode, CliError> {
    let params = parse_params(&args.params).map_err(from_make_env)?;
    let mut env = make_env(&args.env, &params).map_err(from_make_env)?;
    let options = ServeOptions {
        init_override: args
            .init_override
            .as_deref()
            .map(|hex| parse_hex_key(hex, env.descriptor().state_key_len))
            .transpose()?,
        init_override_after: args.init_override_after,
    };
    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout().lock();
    serve(env.as_mut(), &options, stdin, stdout).map_err(runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn seen_budget_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(MEM_LIMIT_VAR) {
        Ok(raw) => parse_mem_limit(&raw).map(Some).map_err(usage),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(error) => Err(usage(format!("{MEM_LIMIT_VAR}: {error}"))),
    }
}

fn parse_mem_limit(raw: &str) -> Result<u64, String> {
    match raw.trim().parse::<u64>() {
        Ok(0) | Err(_) => Err(format!(
            "{MEM_LIMIT_VAR} must be a positive integer number of MiB (got '{raw}')"
        )),
        Ok(mib) => Ok(mib * 1024 * 1024),
    }
}

fn parse_hex_key(hex: &str, expected_len: usize) -> Result<StateKey, CliError> {
    let hex = hex.trim();
    if !hex.is_ascii() || !hex.len().is_multiple_of(2) {
        return Err(usage(format!(
            "--init-override must be an even-length hex string (got '{hex}')"
        )));
    }
    let mut bytes = Vec::with_capacity(hex.len() / 2);
    for index in (0..hex.len()).step_by(2) {
        let pair = &hex[index..index + 2];
        let byte = u8::from_str_radix(pair, 16)
            .map_err(|_| usage(format!("--init-override contains non-hex digits '{pair}'")))?;
        bytes.push(byte);
    }
    if bytes.len() != expected_len {
        return Err(usage(format!(
            "--init-override is {} byte(s) but this environment's keys are {expected_len}",
            bytes.len()
        )));
    }
    Ok(StateKey::new(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_args_parse() {
        let cli = Cli::try_parse_from([
            "branchscope",
            "enumerate",
            "--env",
            "uniform_tree",
            "--param",
            "b=2",
            "--cap",
            "7",
            "--engine",
            "id",
            "--workers",
            "4",
        ])
        .unwrap();
        match cli.command {
            Command::Enumerate(args) => {
                assert_eq!(args.env, "uniform_tree");
                assert_eq!(args.params, vec!["b=2".to_string()]);
                assert_eq!(args.cap, 7);
                assert_eq!(args.engine, Engine::Id);
                assert_eq!(args.workers, 4);
                assert!(!args.warmup);
            }
            _ => panic!("parsed the wrong subcommand"),
        }
    }

    #[test]
    fn estimate_requires_a_source() {
        assert!(Cli::try_parse_from(["branchscope", "estimate"]).is_err());
    }

    #[test]
    fn estimate_rejects_states_without_frames() {
        assert!(Cli::try_parse_from(["branchscope", "estimate", "--states", "4"]).is_err());
    }

    #[test]
    fn estimate_rejects_mixing_trace_and_counts() {
        assert!(Cli::try_parse_from([
            "branchscope",
            "estimate",
            "--states",
            "4",
            "--frames",
            "2",
            "--trace",
            "t.csv",
        ])
        .is_err());
    }

    #[test]
    fn validate_requires_a_target() {
        assert!(Cli::try_parse_from(["branchscope", "validate"]).is_err());
    }

    #[test]
    fn validate_rejects_params_with_all_builtin() {
        assert!(Cli::try_parse_from([
            "branchscope",
            "validate",
            "--all-builtin",
            "--param",
            "b=2",
        ])
        .is_err());
    }

    #[test]
    fn mem_limit_parses_mib() {
        assert_eq!(parse_mem_limit("512").unwrap(), 512 * 1024 * 1024);
        assert_eq!(parse_mem_limit(" 64 ").unwrap(), 64 * 1024 * 1024);
        assert!(parse_mem_limit("0").is_err());
        assert!(parse_mem_limit("lots").is_err());
    }

    #[test]
    fn hex_keys_parse_and_validate_length() {
        let key = parse_hex_key("0005", 2).unwrap();
        assert_eq!(key.as_bytes(), &[0, 5]);
        let key = parse_hex_key("FFfe", 2).unwrap();
        assert_eq!(key.as_bytes(), &[0xff, 0xfe]);
        assert!(parse_hex_key("005", 2).is_err());
        assert!(parse_hex_key("zz00", 2).is_err());
        assert!(parse_hex_key("0005", 4).is_err());
    }
}
