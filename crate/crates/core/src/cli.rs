//! Command-line front end: `solve`, `check`, `bench`, `compare`, `gen` and
//! `convert`.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::model::{normalize, Category, ObjSense, Problem};
use crate::operators::PairTheta;
use crate::oracle::{gen_random, GenSpec};
use crate::parser::{parse_canonical, parse_qplib, parse_solution, write_canonical, write_solution};
use crate::parser::{SolutionFormat, WriteOptions};
use crate::search::{solve, SolverConfig, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 20;

#[derive(Debug, Parser)]
#[command(name = "iqpls", version, about = "Local search for integer quadratic programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Verify a machine-format solution against an instance.
    Check(CheckArgs),
    /// Run every (instance, seed, time limit) combination and write a CSV.
    Bench(BenchArgs),
    /// Count instances where one bench CSV beats another.
    Compare(CompareArgs),
    /// Write a random instance in the canonical format.
    Gen(GenArgs),
    /// Convert an instance to the canonical format.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Qplib,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Machine,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Wall-clock limit in seconds, measured after parsing.
    #[arg(long, default_value_t = 10.0)]
    pub time_limit: f64,
    #[arg(long, env = "IQPLS_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Candidates sampled per selection.
    #[arg(long, default_value_t = 100)]
    pub bms_samples: usize,
    /// Cap on the objective weight.
    #[arg(long, default_value_t = 100)]
    pub obj_weight_cap: u64,
    #[arg(long)]
    pub disable_exp: bool,
    #[arg(long)]
    pub disable_inc: bool,
    #[arg(long)]
    pub disable_free: bool,
    /// Require the incremental move to improve the objective slice of both
    /// variables instead of the combined change.
    #[arg(long)]
    pub literal_both_theta: bool,
    /// Stop after this many iterations (reproducible runs).
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Iterations without a new best before a random variable is
    /// reassigned; 0 keeps weighting as the only escape.
    #[arg(long, default_value_t = 1000)]
    pub stagnation_limit: u64,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            time_limit: self.time_limit,
            seed: self.seed,
            bms_samples: self.bms_samples,
            zeta: self.obj_weight_cap,
            disable_exp: self.disable_exp,
            disable_inc: self.disable_inc,
            disable_free: self.disable_free,
            pair_theta: if self.literal_both_theta { PairTheta::Both } else { PairTheta::Union },
            max_iterations: self.max_iterations,
            stagnation_limit: self.stagnation_limit,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<InputFormat>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Omit wall-clock fields so identical runs print identical bytes.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long)]
    pub format: Option<InputFormat>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instance files, directories, or `.list` files with one path per line.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Seeds as a comma list and/or ranges, e.g. `1-10` or `1,3,5`.
    #[arg(long, default_value = "1")]
    pub seeds: String,
    /// Comma-separated time limits in seconds.
    #[arg(long, default_value = "10")]
    pub time_limits: String,
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub format: Option<InputFormat>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Leave time_to_best empty so the CSV is reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Bench CSV of the reference configuration.
    pub a: PathBuf,
    /// Bench CSV of the configuration compared against.
    pub b: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenCategory {
    Qubo,
    Lcqp,
    Qclp,
    Qcqp,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub category: GenCategory,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub bound_width: i64,
    #[arg(long, default_value_t = 10)]
    pub coeff_range: i64,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eq_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub free_vars: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub format: Option<InputFormat>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Bench(a) => cmd_bench(&a, out, err),
        Command::Compare(a) => cmd_compare(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Convert(a) => cmd_convert(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn detect_format(path: &Path, text: &str) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => InputFormat::Canonical,
        Some("qplib") => InputFormat::Qplib,
        _ if text.trim_start().starts_with('{') => InputFormat::Canonical,
        _ => InputFormat::Qplib,
    }
}

/// Reads and normalizes an instance file.
pub fn load_problem(path: &Path, format: Option<InputFormat>) -> Result<Problem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw = match format.unwrap_or_else(|| detect_format(path, &text)) {
        InputFormat::Qplib => parse_qplib(&text),
        InputFormat::Canonical => parse_canonical(&text),
    }
    .map_err(|e| format!("{}: {e}", path.display()))?;
    normalize(raw).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32, String> {
    let problem = load_problem(&a.input, a.format)?;
    let result = solve(&problem, &a.solver.config()).map_err(|e| e.to_string())?;
    let opts = WriteOptions {
        format: match a.output {
            OutputFormat::Text => SolutionFormat::Text,
            OutputFormat::Machine => SolutionFormat::Machine,
        },
        timing: !a.no_timing,
    };
    emit(out, None, &write_solution(&problem, &result, opts))?;
    Ok(match result.status {
        Status::Feasible => EXIT_OK,
        Status::NotFound => EXIT_NO_SOLUTION,
    })
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, String> {
    let problem = load_problem(&a.instance, a.format)?;
    let text = fs::read_to_string(&a.solution).map_err(|e| format!("{}: {e}", a.solution.display()))?;
    let sol = parse_solution(&text).map_err(|e| format!("{}: {e}", a.solution.display()))?;
    let mut line = |s: String| writeln!(out, "{s}").map_err(|e| e.to_string());

    if sol.status != Status::Feasible {
        line("result=FAIL: solution reports no feasible assignment".into())?;
        return Ok(EXIT_CHECK_FAILED);
    }
    let mut values: Vec<Option<i64>> = vec![None; problem.num_vars()];
    for (name, v) in &sol.values {
        let j = problem.var_index(name).ok_or_else(|| format!("solution names unknown variable `{name}`"))?;
        if values[j].replace(*v).is_some() {
            return Err(format!("variable `{name}` appears twice in the solution"));
        }
    }
    let values: Vec<i64> = values
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| format!("variable `{}` missing from solution", problem.variable(j).name)))
        .collect::<Result<_, _>>()?;

    let (max_violation, worst) = problem.max_violation(&values);
    let objective = problem.to_original_objective(problem.objective().eval(&values));
    line(format!("max_violation={max_violation:?}"))?;
    line(format!("objective={objective:?}"))?;

    let mut failures = Vec::new();
    if let Some(v) = problem.variables().iter().zip(&values).find(|(v, &x)| !v.contains(x)) {
        failures.push(format!("variable `{}` = {} outside its bounds", v.0.name, v.1));
    }
    if let Some(i) = worst {
        failures.push(format!(
            "constraint `{}` violated by {max_violation:?}",
            problem.constraint(i).name
        ));
    }
    match sol.objective {
        None => failures.push("objective missing".into()),
        Some(claimed) if (claimed - objective).abs() > 1e-6 * objective.abs().max(1.0) => {
            failures.push(format!("objective mismatch: claimed {claimed:?}, recomputed {objective:?}"))
        }
        Some(_) => {}
    }
    if failures.is_empty() {
        line("result=OK".into())?;
        Ok(EXIT_OK)
    } else {
        for f in failures {
            line(format!("result=FAIL: {f}"))?;
        }
        Ok(EXIT_CHECK_FAILED)
    }
}

// ---------------------------------------------------------------------------
// Bench

/// One CSV row. Per-run rows leave the aggregate columns empty; aggregate
/// rows have seed `ALL` and leave the per-run columns empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub category: String,
    pub seed: String,
    pub time_limit: f64,
    pub status: String,
    pub objective: Option<f64>,
    pub time_to_best: Option<f64>,
    pub iterations: Option<u64>,
    pub sense: String,
    pub feasible_count: Option<usize>,
    pub best_objective: Option<f64>,
    pub mean_objective: Option<f64>,
    pub stddev_objective: Option<f64>,
    pub cv: Option<f64>,
}

/// Aggregate statistics of a set of runs on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub feasible: usize,
    pub best: Option<f64>,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub stddev: Option<f64>,
    /// `stddev / |mean|`; zero when all runs agree, absent when the mean is
    /// zero and the runs differ.
    pub cv: Option<f64>,
}

pub fn summarize(sense: ObjSense, objectives: &[Option<f64>]) -> RunSummary {
    let xs: Vec<f64> = objectives.iter().flatten().copied().collect();
    if xs.is_empty() {
        return RunSummary { feasible: 0, best: None, mean: None, stddev: None, cv: None };
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let stddev = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k).sqrt();
    let best = match sense {
        ObjSense::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
        ObjSense::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let cv = if stddev == 0.0 {
        Some(0.0)
    } else if mean != 0.0 {
        Some(stddev / mean.abs())
    } else {
        None
    };
    RunSummary { feasible: xs.len(), best: Some(best), mean: Some(mean), stddev: Some(stddev), cv }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Better,
    Loss,
    Tie,
}

/// Compares two best-found objectives (`None` = no feasible solution) from
/// the point of view of `a`.
pub fn compare_objectives(sense: ObjSense, a: Option<f64>, b: Option<f64>) -> Outcome {
    match (a, b) {
        (None, None) => Outcome::Tie,
        (Some(_), None) => Outcome::Better,
        (None, Some(_)) => Outcome::Loss,
        (Some(x), Some(y)) => {
            let tol = 1e-9 * x.abs().max(y.abs()).max(1.0);
            let (x, y) = match sense {
                ObjSense::Min => (x, y),
                ObjSense::Max => (-x, -y),
            };
            if x < y - tol {
                Outcome::Better
            } else if y < x - tol {
                Outcome::Loss
            } else {
                Outcome::Tie
            }
        }
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("invalid seed list `{s}`");
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    if seeds.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(seeds)
}

fn parse_limits(s: &str) -> Result<Vec<f64>, String> {
    let limits: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().ok().filter(|&t| t > 0.0).ok_or_else(|| format!("invalid time limit `{p}`")))
        .collect::<Result<_, _>>()?;
    if limits.is_empty() {
        return Err("no time limits given".into());
    }
    Ok(limits)
}

fn is_instance_file(p: &Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("qplib" | "json"))
}

/// Expands directories (sorted, instance extensions only) and `.list` files.
fn collect_instances(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| format!("{}: {e}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_instance_file(p))
                .collect();
            entries.sort();
            files.extend(entries);
        } else if input.extension().and_then(|e| e.to_str()) == Some("list") {
            let text = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
            let base = input.parent().unwrap_or(Path::new("."));
            for l in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                files.push(base.join(l));
            }
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn instance_label(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn sense_str(s: ObjSense) -> &'static str {
    match s {
        ObjSense::Min => "min",
        ObjSense::Max => "max",
    }
}

fn error_record(instance: &str, seed: u64, limit: f64) -> BenchRecord {
    BenchRecord {
        instance: instance.to_string(),
        category: String::new(),
        seed: seed.to_string(),
        time_limit: limit,
        status: "ERROR".into(),
        objective: None,
        time_to_best: None,
        iterations: None,
        sense: String::new(),
        feasible_count: None,
        best_objective: None,
        mean_objective: None,
        stddev_objective: None,
        cv: None,
    }
}

/// Runs the bench grid and returns its records, per-run rows of an
/// (instance, time limit) group followed by its aggregate row, in input order.
#[allow(clippy::too_many_arguments)]
pub fn bench_records(
    instances: &[PathBuf],
    format: Option<InputFormat>,
    seeds: &[u64],
    limits: &[f64],
    base: &SolverConfig,
    jobs: usize,
    timing: bool,
    err: &mut dyn Write,
) -> Vec<BenchRecord> {
    let loaded: Vec<(String, Result<Problem, String>)> =
        instances.iter().map(|p| (instance_label(p), load_problem(p, format))).collect();
    for (_, r) in &loaded {
        if let Err(e) = r {
            let _ = writeln!(err, "error: {e}");
        }
    }

    let tasks: Vec<(usize, f64, u64)> = (0..loaded.len())
        .flat_map(|i| limits.iter().flat_map(move |&t| seeds.iter().map(move |&s| (i, t, s))))
        .collect();
    let results: Vec<Mutex<Option<BenchRecord>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);

    let worker = || loop {
        let k = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(i, limit, seed)) = tasks.get(k) else { break };
        let (label, problem) = &loaded[i];
        let record = match problem {
            Err(_) => error_record(label, seed, limit),
            Ok(p) => {
                let config = SolverConfig { time_limit: limit, seed, ..base.clone() };
                match solve(p, &config) {
                    Err(_) => error_record(label, seed, limit),
                    Ok(r) => BenchRecord {
                        instance: label.clone(),
                        category: p.category().as_str().to_string(),
                        seed: seed.to_string(),
                        time_limit: limit,
                        status: r.status.as_str().to_string(),
                        objective: r.objective,
                        time_to_best: if timing { r.stats.time_to_best } else { None },
                        iterations: Some(r.stats.iterations),
                        sense: sense_str(p.sense_original()).to_string(),
                        feasible_count: None,
                        best_objective: None,
                        mean_objective: None,
                        stddev_objective: None,
                        cv: None,
                    },
                }
            }
        };
        *results[k].lock().expect("result slot") = Some(record);
    };
    std::thread::scope(|s| {
        for _ in 1..jobs.max(1) {
            s.spawn(worker);
        }
        worker();
    });

    let mut records = Vec::with_capacity(tasks.len() + loaded.len() * limits.len());
    let mut runs = results.into_iter().map(|m| m.into_inner().expect("result slot").expect("every task ran"));
    for (label, problem) in &loaded {
        for &limit in limits {
            let group: Vec<BenchRecord> = runs.by_ref().take(seeds.len()).collect();
            let Ok(p) = problem else {
                records.extend(group);
                continue;
            };
            let objectives: Vec<Option<f64>> = group.iter().map(|r| r.objective).collect();
            let s = summarize(p.sense_original(), &objectives);
            records.extend(group);
            records.push(BenchRecord {
                instance: label.clone(),
                category: p.category().as_str().to_string(),
                seed: "ALL".into(),
                time_limit: limit,
                status: if s.feasible > 0 { "FEASIBLE" } else { "NA" }.into(),
                objective: None,
                time_to_best: None,
                iterations: None,
                sense: sense_str(p.sense_original()).to_string(),
                feasible_count: Some(s.feasible),
                best_objective: s.best,
                mean_objective: s.mean,
                stddev_objective: s.stddev,
                cv: s.cv,
            });
        }
    }
    records
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let seeds = parse_seeds(&a.seeds)?;
    let limits = parse_limits(&a.time_limits)?;
    let instances = collect_instances(&a.inputs)?;
    if instances.is_empty() {
        return Err("no instances found".into());
    }
    let base = a.solver.config();
    base.validate().map_err(|e| e.to_string())?;
    let records = bench_records(&instances, a.format, &seeds, &limits, &base, a.jobs, !a.no_timing, err);

    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &records {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    emit(out, a.out.as_deref(), &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    Ok(EXIT_OK)
}

pub fn read_bench_csv(path: &Path) -> Result<Vec<BenchRecord>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32, String> {
    let aggregates = |path: &Path| -> Result<Vec<BenchRecord>, String> {
        Ok(read_bench_csv(path)?.into_iter().filter(|r| r.seed == "ALL").collect())
    };
    let ra = aggregates(&a.a)?;
    let rb: HashMap<(String, u64), BenchRecord> = aggregates(&a.b)?
        .into_iter()
        .map(|r| ((r.instance.clone(), r.time_limit.to_bits()), r))
        .collect();
    let (mut better, mut loss, mut tie, mut unmatched) = (0, 0, 0, 0);
    for r in &ra {
        let Some(other) = rb.get(&(r.instance.clone(), r.time_limit.to_bits())) else {
            unmatched += 1;
            continue;
        };
        let sense = if r.sense == "max" { ObjSense::Max } else { ObjSense::Min };
        match compare_objectives(sense, r.best_objective, other.best_objective) {
            Outcome::Better => better += 1,
            Outcome::Loss => loss += 1,
            Outcome::Tie => tie += 1,
        }
    }
    writeln!(out, "better={better}\nloss={loss}\ntie={tie}\nunmatched={unmatched}").map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, String> {
    let spec = GenSpec {
        category: match a.category {
            GenCategory::Qubo => Category::Qubo,
            GenCategory::Lcqp => Category::Lcqp,
            GenCategory::Qclp => Category::Qclp,
            GenCategory::Qcqp => Category::Qcqp,
        },
        n: a.n,
        m: a.m,
        bound_width: a.bound_width,
        coeff_range: a.coeff_range,
        density: a.density,
        eq_fraction: a.eq_fraction,
        free_vars: a.free_vars,
        seed: a.seed,
    };
    let p = gen_random(&spec).map_err(|e| e.to_string())?;
    emit(out, a.out.as_deref(), &write_canonical(&p))?;
    Ok(EXIT_OK)
}

fn cmd_convert(a: &ConvertArgs, out: &mut dyn Write) -> Result<i32, String> {
    let p = load_problem(&a.input, a.format)?;
    emit(out, a.out.as_deref(), &write_canonical(&p))?;
    Ok(EXIT_OK)
}
