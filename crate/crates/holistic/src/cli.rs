//! Command-line front end: CSV ingestion, configuration, the synthetic
//! benchmark harness, and machine-readable JSON reports (schema v1).

use crate::error::{Error, Result};
use crate::fit::{self, HolisticProblem};
use crate::linalg::Matrix;
use crate::mc::{self, PlantedSpec};
use crate::mip::Limits;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "holistic", version, about = "Subset-selection regression with significance and multicollinearity constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tune and fit the constrained subset-selection model on a CSV dataset.
    Fit(FitArgs),
    /// Detect multicollinear relations in a CSV design matrix.
    DetectMc(DetectArgs),
    /// Generate a synthetic design with planted relations.
    Synth(SynthArgs),
    /// Run the seeded detection benchmark over synthetic instances.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub target: String,
    /// Comma-separated cardinality grid, e.g. "1,2,3".
    #[arg(long)]
    pub k_grid: Option<String>,
    /// Comma-separated Gamma grid, e.g. "0,0.01,0.1".
    #[arg(long)]
    pub gamma_grid: Option<String>,
    #[arg(long, default_value_t = fit::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = fit::DEFAULT_RHO)]
    pub rho: f64,
    #[arg(long, default_value_t = fit::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = fit::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-solve wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Worker count; 1 is the determinism reference and the only mode here.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    pub intercept: bool,
    #[arg(long, default_value_t = false)]
    pub standardize: bool,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = fit::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = fit::DEFAULT_DELTA)]
    pub delta: f64,
    /// Append a ones column before forming the Gram matrix.
    #[arg(long, default_value_t = false)]
    pub intercept: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Comma-separated planted relation sizes, e.g. "3,3,4"; empty for none.
    #[arg(long, default_value = "")]
    pub relations: String,
    /// Entrywise Gaussian noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination for the generated design.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value = "3,3,4")]
    pub relations: String,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    #[arg(long, default_value_t = fit::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = fit::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// --- CSV ingestion ---------------------------------------------------------

/// Strict CSV reader: comma-separated, header row, every cell numeric.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Matrix)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> =
        reader.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(String::from).collect();
    if headers.is_empty() {
        return Err(Error::Parse("empty header row".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::Parse(format!(
                "row {}: {} fields, expected {}",
                row_idx + 2,
                record.len(),
                headers.len()
            )));
        }
        for (col_idx, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}, column '{}': '{}' is not numeric",
                    row_idx + 2,
                    headers[col_idx],
                    cell
                ))
            })?;
            columns[col_idx].push(v);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok((headers, Matrix::from_columns(&columns)?))
}

fn write_csv(path: &Path, headers: &[String], x: &Matrix) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    w.write_record(headers).map_err(|e| Error::Parse(e.to_string()))?;
    for i in 0..x.rows() {
        let row: Vec<String> = x.row(i).iter().map(|v| format!("{v}")).collect();
        w.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_grid<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::Parse(format!("invalid {what} entry '{t}'")))
        })
        .collect()
}

fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Parse(e.to_string()))?;
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            writeln!(f, "{text}")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

// --- commands --------------------------------------------------------------

fn relation_json(names: &[String], r: &mc::MulticollinearRelation) -> Value {
    json!({
        "support": r.support,
        "support_names": r.support.iter().map(|&j| names[j].clone()).collect::<Vec<_>>(),
        "coefficients": r.coefficients,
        "theta": r.theta,
    })
}

pub fn cmd_detect_mc(args: &DetectArgs) -> Result<Value> {
    let t0 = Instant::now();
    let (mut names, x) = read_csv(&args.input)?;
    let v = mc::small_eigenvectors(&x, args.epsilon, args.intercept)?;
    if args.intercept {
        names.push("(intercept)".into());
    }
    let relations =
        if v.dim() > 0 { mc::iterative_mc(&v, args.delta)? } else { Vec::new() };
    let cuts: Vec<_> = relations.iter().map(mc::emit_cut).collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "detect-mc",
        "config": {
            "input": args.input.display().to_string(),
            "epsilon": args.epsilon,
            "delta": args.delta,
            "intercept": args.intercept,
        },
        "dim_v": v.dim(),
        "small_eigenvalues": v.values,
        "complement_min_eigenvalue": v.complement_values.first(),
        "relations": relations.iter().map(|r| relation_json(&names, r)).collect::<Vec<_>>(),
        "cuts": cuts,
        "timings": { "total_secs": t0.elapsed().as_secs_f64() },
    }))
}

pub fn cmd_synth(args: &SynthArgs) -> Result<Value> {
    let sizes: Vec<usize> = parse_grid(&args.relations, "relation size")?;
    let spec = PlantedSpec {
        relation_sizes: sizes,
        gamma_range: (-10.0, 10.0),
        noise_sigma: args.noise,
        seed: args.seed,
    };
    let (x, planted) = mc::synth_generate(args.n, args.p, &spec)?;
    let names: Vec<String> = (1..=args.p).map(|j| format!("x{j}")).collect();
    write_csv(&args.out, &names, &x)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "synth",
        "config": {
            "n": args.n,
            "p": args.p,
            "relation_sizes": spec.relation_sizes,
            "gamma_range": spec.gamma_range,
            "noise_sigma": spec.noise_sigma,
            "seed": args.seed,
            "out": args.out.display().to_string(),
        },
        "planted_supports": planted,
    }))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<Value> {
    let sizes: Vec<usize> = parse_grid(&args.relations, "relation size")?;
    let mut master = ChaCha8Rng::seed_from_u64(args.seed);
    let instance_seeds: Vec<u64> = (0..args.instances).map(|_| master.gen()).collect();
    let mut per_instance = Vec::new();
    let mut acc_sum = 0.0;
    let mut fpr_sum = 0.0;
    let mut time_sum = 0.0;
    for (i, &inst_seed) in instance_seeds.iter().enumerate() {
        let spec = PlantedSpec {
            relation_sizes: sizes.clone(),
            gamma_range: (-10.0, 10.0),
            noise_sigma: args.noise,
            seed: inst_seed,
        };
        let t0 = Instant::now();
        let (x, planted) = mc::synth_generate(args.n, args.p, &spec)?;
        let v = mc::small_eigenvectors(&x, args.epsilon, false)?;
        let relations =
            if v.dim() > 0 { mc::iterative_mc(&v, args.delta)? } else { Vec::new() };
        let found: Vec<Vec<usize>> = relations.iter().map(|r| r.support.clone()).collect();
        let (acc, fpr) = mc::evaluate_detection(&found, &planted);
        let secs = t0.elapsed().as_secs_f64();
        acc_sum += acc;
        fpr_sum += fpr;
        time_sum += secs;
        per_instance.push(json!({
            "instance": i,
            "seed": inst_seed,
            "planted": planted,
            "found": found,
            "acc": acc,
            "fpr": fpr,
            "timings": { "total_secs": secs },
        }));
    }
    let count = args.instances.max(1) as f64;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "bench",
        "config": {
            "n": args.n,
            "p": args.p,
            "relation_sizes": sizes,
            "noise_sigma": args.noise,
            "instances": args.instances,
            "epsilon": args.epsilon,
            "delta": args.delta,
            "seed": args.seed,
        },
        "instances": per_instance,
        "mean_acc": if args.instances == 0 { Value::Null } else { json!(acc_sum / count) },
        "mean_fpr": if args.instances == 0 { Value::Null } else { json!(fpr_sum / count) },
        "timings": { "mean_secs": if args.instances == 0 { 0.0 } else { time_sum / count } },
    }))
}

fn fit_config_json(args: &FitArgs, prob: &HolisticProblem) -> Value {
    json!({
        "input": args.input.display().to_string(),
        "target": args.target,
        "k_grid": prob.k_grid,
        "gamma_grid": prob.gamma_grid,
        "alpha": prob.alpha,
        "rho": prob.rho,
        "epsilon": prob.epsilon,
        "delta": prob.delta,
        "seed": prob.seed,
        "time_limit_secs": prob.limits.time_limit_secs,
        "threads": args.threads,
        "intercept": prob.intercept,
        "standardize": prob.standardize,
    })
}

/// Returns the report plus the process exit code (0, or 5 when infeasible).
pub fn cmd_fit(args: &FitArgs) -> Result<(Value, i32)> {
    let t0 = Instant::now();
    let (names, data) = read_csv(&args.input)?;
    let target_idx = names
        .iter()
        .position(|h| h == &args.target)
        .ok_or_else(|| Error::Parse(format!("target column '{}' not found", args.target)))?;
    let y = data.column(target_idx);
    let feature_idx: Vec<usize> =
        (0..data.cols()).filter(|&j| j != target_idx).collect();
    let feature_names: Vec<String> =
        feature_idx.iter().map(|&j| names[j].clone()).collect();
    let x = data.select_columns(&feature_idx);

    let mut prob = HolisticProblem::new(x, y)?;
    if let Some(s) = &args.k_grid {
        prob.k_grid = parse_grid(s, "k grid")?;
    }
    if let Some(s) = &args.gamma_grid {
        prob.gamma_grid = parse_grid(s, "gamma grid")?;
    }
    prob.alpha = args.alpha;
    prob.rho = args.rho;
    prob.epsilon = args.epsilon;
    prob.delta = args.delta;
    prob.seed = args.seed;
    prob.intercept = args.intercept;
    prob.standardize = args.standardize;
    prob.limits = Limits { time_limit_secs: args.time_limit, node_limit: None };

    match fit::tune(&prob) {
        Ok(res) => {
            let coef_table: Vec<Value> = res
                .support()
                .iter()
                .map(|&j| {
                    json!({
                        "index": j,
                        "name": feature_names[j],
                        "beta": res.beta[j],
                    })
                })
                .collect();
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "fit",
                "config": fit_config_json(args, &prob),
                "result": res,
                "coefficients": coef_table,
                "timings": {
                    "total_secs": t0.elapsed().as_secs_f64(),
                    "detect_secs": res.detect_time_secs,
                },
            });
            Ok((report, 0))
        }
        Err(Error::Infeasible(msg)) => {
            // Constraints excluded every pattern: report the cut inventory.
            let v = mc::small_eigenvectors(&prob.x, prob.epsilon, false)?;
            let relations =
                if v.dim() > 0 { mc::iterative_mc(&v, prob.delta)? } else { Vec::new() };
            let cuts: Vec<_> =
                relations.iter().map(mc::emit_cut).collect::<Result<Vec<_>>>()?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "fit",
                "config": fit_config_json(args, &prob),
                "infeasible": msg,
                "support": Vec::<usize>::new(),
                "cuts": cuts,
                "relations": relations.iter().map(|r| relation_json(&feature_names, r)).collect::<Vec<_>>(),
                "timings": { "total_secs": t0.elapsed().as_secs_f64() },
            });
            Ok((report, 5))
        }
        Err(e) => Err(e),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Fit(args) => {
            let (report, code) = cmd_fit(args)?;
            emit(&report, args.out.as_deref())?;
            Ok(code)
        }
        Command::DetectMc(args) => {
            let report = cmd_detect_mc(args)?;
            emit(&report, args.out.as_deref())?;
            Ok(0)
        }
        Command::Synth(args) => {
            let report = cmd_synth(args)?;
            emit(&report, None)?;
            Ok(0)
        }
        Command::Bench(args) => {
            let report = cmd_bench(args)?;
            emit(&report, args.out.as_deref())?;
            Ok(0)
        }
    }
}
