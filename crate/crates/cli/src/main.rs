//! Command-line entry points: `match` (solve one pair of graphs),
//! `project` (run the doubly stochastic projection on a matrix CSV), and
//! `bench` (batch experiments with CSV/JSONL reports).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver or
//! projection did not converge (outputs are still written).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fram_core::assignment::assignment_to_matrix;
use fram_core::graph::{graph_from_json, MatchingProblem};
use fram_core::harness::{
    records_to_csv, records_to_jsonl, run_experiment, set_thread_cap, GeneratorKind, InstanceSpec,
    PrecisionChoice, RunRecord,
};
use fram_core::matrix::Matrix;
use fram_core::metrics::node_accuracy;
use fram_core::precision::{fram_mixed, FloatFormat, PrecisionPolicy, FP32};
use fram_core::projection::{sdsn, SdsnConfig};
use fram_core::solver::{fram_match, FramConfig, MatchResult, Variant};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "fram", version, about = "Graph matching solver and benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Match two graphs given as JSON files.
    Match(MatchArgs),
    /// Project a matrix CSV onto the doubly stochastic set.
    Project(ProjectArgs),
    /// Run a batch of synthetic matching experiments.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolverOpts {
    /// Regularization strength of the assignment projection.
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    /// Step size of the fixed-point update.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Weight of the node-similarity term.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Stopping threshold on the normalized iterate change.
    #[arg(long = "delta-th", default_value_t = 1e-4)]
    delta_th: f64,
    /// Convergence threshold of the inner projection.
    #[arg(long = "gamma-th", default_value_t = 1e-3)]
    gamma_th: f64,
    /// Cap on outer iterations.
    #[arg(long = "max-outer", default_value_t = 100)]
    max_outer: usize,
    /// Cap on inner projection passes.
    #[arg(long = "sdsn-max", default_value_t = 1000)]
    sdsn_max: usize,
    /// Fixed projection passes used by the dspfp variant.
    #[arg(long = "dsn-iters", default_value_t = 30)]
    dsn_iters: usize,
}

impl SolverOpts {
    fn config(&self, variant: Variant) -> FramConfig {
        FramConfig {
            theta: self.theta,
            alpha: self.alpha,
            lambda: self.lambda,
            delta_th: self.delta_th,
            gamma_th: self.gamma_th,
            max_outer: self.max_outer,
            sdsn_max: self.sdsn_max,
            variant,
            dsn_iters: self.dsn_iters,
        }
    }
}

#[derive(Args)]
struct MatchArgs {
    /// First graph (JSON).
    #[arg(long = "graph-a")]
    graph_a: PathBuf,
    /// Second graph (JSON).
    #[arg(long = "graph-b")]
    graph_b: PathBuf,
    /// Solver variant.
    #[arg(long, default_value = "fram")]
    variant: String,
    /// Execution policy: fp64, mixed, or custom:<grad>,<proj>,<upd>.
    #[arg(long, default_value = "fp64")]
    precision: String,
    /// Ground-truth permutation (JSON array) for accuracy reporting.
    #[arg(long = "ground-truth")]
    ground_truth: Option<PathBuf>,
    /// Also write the result JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverOpts,
}

#[derive(Args)]
struct ProjectArgs {
    /// Input matrix (CSV, one row per line).
    #[arg(long)]
    matrix: PathBuf,
    /// Regularization strength.
    #[arg(long)]
    theta: f64,
    /// Convergence threshold.
    #[arg(long = "gamma-th", default_value_t = 1e-3)]
    gamma_th: f64,
    /// Cap on projection passes.
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
    /// Output matrix CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace JSON path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance family: er (Erdos-Renyi) or geo (geometric).
    #[arg(long, default_value = "er")]
    generator: String,
    /// Nodes per graph.
    #[arg(long)]
    n: usize,
    /// Edge probability (Erdos-Renyi only).
    #[arg(long = "p-edge", default_value_t = 0.05)]
    p_edge: f64,
    /// Comma-separated noise levels.
    #[arg(long, default_value = "0.05,0.15,0.25")]
    noise: String,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Base seed; repeat r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated solver variants.
    #[arg(long, default_value = "fram")]
    variants: String,
    /// Comma-separated execution policies.
    #[arg(long, default_value = "fp64")]
    precision: String,
    /// Output directory for results.csv and results.jsonl.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverOpts,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<fram_core::FramError> for CliError {
    fn from(e: fram_core::FramError) -> Self {
        CliError::data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Ok(cap) = std::env::var("FRAM_THREADS") {
        match cap.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                set_thread_cap(threads);
            }
            _ => {
                eprintln!("error: FRAM_THREADS must be a positive integer, got {cap:?}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }

    let outcome = match cli.command {
        Command::Match(args) => cmd_match(args),
        Command::Project(args) => cmd_project(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn parse_variant(name: &str) -> Result<Variant, CliError> {
    Variant::by_name(name)
        .ok_or_else(|| CliError::usage(format!("unknown variant {name:?} (expected fram or dspfp)")))
}

/// Accepts fp64, mixed, or custom:<grad>,<proj>,<upd>. Custom policies
/// accumulate at the wider of the gradient format and FP32.
fn parse_precision(spec: &str) -> Result<Option<PrecisionPolicy>, CliError> {
    match spec {
        "fp64" => Ok(None),
        "mixed" => Ok(Some(PrecisionPolicy::mixed())),
        other => {
            let rest = other.strip_prefix("custom:").ok_or_else(|| {
                CliError::usage(format!(
                    "unknown precision {other:?} (expected fp64, mixed, or custom:<grad>,<proj>,<upd>)"
                ))
            })?;
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::usage(
                    "custom precision needs exactly three formats: custom:<grad>,<proj>,<upd>",
                ));
            }
            let fmt = |name: &str| {
                FloatFormat::by_name(name).ok_or_else(|| {
                    CliError::usage(format!(
                        "unknown format {name:?} (expected fp64, fp32, tf32, bf16, or fp16)"
                    ))
                })
            };
            let gradient_fmt = fmt(parts[0])?;
            let projection_fmt = fmt(parts[1])?;
            let update_fmt = fmt(parts[2])?;
            let accumulate_fmt = if gradient_fmt.mantissa_bits >= FP32.mantissa_bits {
                gradient_fmt
            } else {
                FP32
            };
            let policy = PrecisionPolicy {
                gradient_fmt,
                projection_fmt,
                update_fmt,
                accumulate_fmt,
            };
            policy
                .validate()
                .map_err(|e| CliError::usage(e.to_string()))?;
            Ok(Some(policy))
        }
    }
}

fn solve(
    problem: &MatchingProblem,
    cfg: &FramConfig,
    policy: Option<&PrecisionPolicy>,
) -> Result<MatchResult, CliError> {
    let result = match policy {
        None => fram_match(problem, cfg)?,
        Some(pol) => fram_mixed(problem, cfg, pol)?,
    };
    Ok(result)
}

fn cmd_match(args: MatchArgs) -> Result<u8, CliError> {
    let variant = parse_variant(&args.variant)?;
    let policy = parse_precision(&args.precision)?;
    let cfg = args.solver.config(variant);

    let g_a = graph_from_json(&read_file(&args.graph_a)?)?;
    let g_b = graph_from_json(&read_file(&args.graph_b)?)?;
    let problem = MatchingProblem::new(g_a, g_b, cfg.lambda)?;

    let truth = match &args.ground_truth {
        None => None,
        Some(path) => {
            let perm: Vec<usize> = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::data(format!("ground truth: {e}")))?;
            if perm.len() != problem.n() {
                return Err(CliError::data(format!(
                    "ground truth has {} entries for {} nodes",
                    perm.len(),
                    problem.n()
                )));
            }
            let m = assignment_to_matrix(
                &fram_core::assignment::Assignment { perm, score: 0.0 },
                problem.n(),
            );
            Some(m)
        }
    };

    let result = solve(&problem, &cfg, policy.as_ref())?;
    let m = assignment_to_matrix(&result.assignment, problem.n());
    let accuracy = truth
        .as_ref()
        .map(|t| node_accuracy(&m, t))
        .transpose()?;

    let trace: Vec<serde_json::Value> = result
        .trace
        .iter()
        .enumerate()
        .map(|(t, r)| {
            json!({
                "t": t + 1,
                "delta": r.delta,
                "objective": r.objective,
                "inner_iterations": r.inner_iterations,
                "wall_ms": r.wall_ms,
            })
        })
        .collect();
    let mut output = json!({
        "schema": 1,
        "variant": variant.name(),
        "precision": args.precision,
        "assignment": result.assignment.perm,
        "objective": result.objective,
        "matching_error": result.matching_error,
        "converged": result.converged,
        "outer_iters": result.outer_iters,
        "trace": trace,
    });
    if let Some(acc) = accuracy {
        output["accuracy"] = json!(acc);
    }
    let text = serde_json::to_string_pretty(&output).expect("serialization");
    println!("{text}");
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }

    if result.converged {
        Ok(0)
    } else {
        eprintln!("solver did not converge within {} iterations", cfg.max_outer);
        Ok(EXIT_NO_CONVERGENCE)
    }
}

fn cmd_project(args: ProjectArgs) -> Result<u8, CliError> {
    let matrix = Matrix::from_csv(&read_file(&args.matrix)?)?;
    let cfg = SdsnConfig::new(args.theta, args.gamma_th, args.max_iters);
    let (projected, trace) = sdsn(&matrix, &cfg).map_err(|e| match e {
        fram_core::FramError::Negative { .. } => {
            CliError::data(format!("SDSN requires nonnegative input: {e}"))
        }
        other => CliError::from(other),
    })?;

    let csv = projected.to_csv();
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    let trace_json = serde_json::to_string_pretty(&json!({
        "schema": 1,
        "iterations": trace.iterations,
        "gamma_history": trace.gamma_history,
        "converged": trace.converged,
    }))
    .expect("serialization");
    if let Some(path) = &args.trace {
        write_file(path, &trace_json)?;
    }

    if trace.converged {
        Ok(0)
    } else {
        eprintln!("projection did not converge within {} passes", args.max_iters);
        Ok(EXIT_NO_CONVERGENCE)
    }
}

fn parse_list<T, F>(text: &str, what: &str, parse: F) -> Result<Vec<T>, CliError>
where
    F: Fn(&str) -> Result<T, CliError>,
{
    let items: Vec<T> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(s.trim()))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::usage(format!("empty {what} list")));
    }
    Ok(items)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, CliError> {
    let generator = GeneratorKind::by_name(&args.generator)
        .ok_or_else(|| CliError::usage(format!("unknown generator {:?}", args.generator)))?;
    let noises = parse_list(&args.noise, "noise", |s| {
        s.parse::<f64>()
            .map_err(|e| CliError::usage(format!("bad noise value {s:?}: {e}")))
    })?;
    let variants = parse_list(&args.variants, "variant", |s| parse_variant(s))?;
    let precisions = parse_list(&args.precision, "precision", |s| {
        Ok(match parse_precision(s)? {
            None => PrecisionChoice::Fp64,
            Some(pol) if pol == PrecisionPolicy::mixed() && s == "mixed" => PrecisionChoice::Mixed,
            Some(pol) => PrecisionChoice::Custom(pol),
        })
    })?;
    if args.seeds == 0 {
        return Err(CliError::usage("--seeds must be at least 1"));
    }

    let specs: Vec<InstanceSpec> = noises
        .iter()
        .map(|&noise| InstanceSpec {
            generator,
            n: args.n,
            p_edge: match generator {
                GeneratorKind::ErdosRenyi => Some(args.p_edge),
                GeneratorKind::Geometric => None,
            },
            noise,
            seed: args.seed,
        })
        .collect();

    let cfg = args.solver.config(variants[0]);
    let records = run_experiment(&specs, &cfg, &variants, &precisions, args.seeds)?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::data(format!("{}: {e}", args.out.display())))?;
    write_file(&args.out.join("results.csv"), &records_to_csv(&records)?)?;
    write_file(&args.out.join("results.jsonl"), &records_to_jsonl(&records)?)?;

    print_summary(&records);
    Ok(0)
}

/// Mean and (sample) standard deviation per (noise, variant, precision)
/// cell, recomputable from the CSV.
fn print_summary(records: &[RunRecord]) {
    let mut keys: Vec<(String, String, String)> = Vec::new();
    for r in records {
        let key = (format!("{}", r.noise), r.variant.clone(), r.precision.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    println!("noise      variant  precision  accuracy           matching_error       wall_ms");
    for (noise, variant, precision) in keys {
        let cell: Vec<&RunRecord> = records
            .iter()
            .filter(|r| {
                format!("{}", r.noise) == noise && r.variant == variant && r.precision == precision
            })
            .collect();
        let acc: Vec<f64> = cell.iter().filter_map(|r| r.accuracy).collect();
        let err: Vec<f64> = cell.iter().filter_map(|r| r.matching_error).collect();
        let wall: Vec<f64> = cell.iter().map(|r| r.wall_ms).collect();
        println!(
            "{:<10} {:<8} {:<10} {:>7.4} +- {:<7.4} {:>9.4} +- {:<7.4} {:>9.2}",
            noise,
            variant,
            precision,
            mean(&acc),
            std_dev(&acc),
            mean(&err),
            std_dev(&err),
            mean(&wall),
        );
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
