//! Command-line front end: argument definitions, subcommand runners and the
//! JSON report.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mdfactor::arith::FactoringInstance;
use mdfactor::gauss::GaussParams;
use mdfactor::pipeline::{self, cost, Mode, Outcome, PipelineConfig};
use mdfactor::qsim;
use mdfactor::relattice::build_relation_lattice;
use mdfactor::rng::task_rng;
use mdfactor::suites::{self, Suite};
use mdfactor::Error;

pub use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "mdfactor", version, about = "Desk-scale laboratory for multidimensional quantum factoring")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor N with the lattice pipeline
    Factor(FactorArgs),
    /// Compare the simulated output distribution with the classical oracle
    Simulate(SimulateArgs),
    /// Draw one attempt's worth of dual samples
    Sample(SampleArgs),
    /// Gate-count estimates
    Estimate(EstimateArgs),
    /// Run the randomized property suites
    Check(CheckArgs),
}

/// Flags every subcommand understands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed; every random stream is derived from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report to this path
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// key = value file merged below the command-line flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Print the JSON report instead of the text summary
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FactorArgs {
    /// Modulus, decimal
    #[arg(long)]
    pub n: u64,
    /// Lattice dimension; defaults to ⌈√(bit length)⌉
    #[arg(long)]
    pub d: Option<usize>,
    /// Samples per attempt; defaults to d + 4
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Oracle)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 50)]
    pub max_attempts: u32,
    /// Extra bits on log₂ R
    #[arg(long, default_value_t = 4)]
    pub safety: u32,
    /// Fixes log₂ R instead of deriving it from the witness
    #[arg(long)]
    pub log2_radius: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Oracle,
    Statevector,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Oracle => Mode::Oracle,
            ModeArg::Statevector => Mode::Statevector,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Modulus whose relation lattices are simulated
    #[arg(long, default_value_t = 77)]
    pub n: u64,
    /// Comma-separated d:D:R triples; an empty list is allowed
    #[arg(long, default_value = "1:16:4")]
    pub sweep: String,
    /// Samples for the concentration rate per configuration
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Number of samples; defaults to d + 4
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Oracle)]
    pub mode: ModeArg,
    /// Gaussian radius R
    #[arg(long, default_value_t = 8.0)]
    pub radius: f64,
    /// Grid size D; defaults to the power of two in [2√d·R, 4√d·R)
    #[arg(long)]
    pub grid: Option<u64>,
    /// Attempt index selecting the random streams
    #[arg(long, default_value_t = 0)]
    pub attempt: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    /// Comma-separated bit lengths n
    #[arg(long, value_delimiter = ',', default_value = "256")]
    pub bits: Vec<u64>,
    /// Dimension; defaults to ⌈n^{1/2+ε}⌉
    #[arg(long)]
    pub d: Option<u64>,
    /// log₂ D; defaults to ⌈n^{1/2−ε} + 1 + ½ log₂ d⌉
    #[arg(long)]
    pub log2_grid: Option<u64>,
    /// Comma-separated tradeoff exponents ε ∈ [0, 1/2]
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub epsilon: Vec<f64>,
    /// Explicit QFT approximation error
    #[arg(long)]
    pub epsilon_qft: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// Comma-separated suite names, `all` or `none`
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Overrides every selected suite's trial count
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

/// Result of running one subcommand.
#[derive(Debug)]
pub struct Execution {
    pub report: RunReport,
    pub text: String,
    pub exit_code: i32,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Factor(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Sample(a) => &a.common,
            Command::Estimate(a) => &a.common,
            Command::Check(a) => &a.common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Factor(_) => "factor",
            Command::Simulate(_) => "simulate",
            Command::Sample(_) => "sample",
            Command::Estimate(_) => "estimate",
            Command::Check(_) => "check",
        }
    }

    fn config_echo(&self) -> Value {
        let v = match self {
            Command::Factor(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Sample(a) => serde_json::to_value(a),
            Command::Estimate(a) => serde_json::to_value(a),
            Command::Check(a) => serde_json::to_value(a),
        };
        v.expect("flags serialize")
    }
}

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Resource(_) | Error::BaseSharesFactor { .. } => EXIT_VIOLATION,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

type CommandResult = (Value, String, i32);

fn error_result(e: &Error) -> CommandResult {
    (
        json!({ "error": { "kind": error_kind(e), "message": e.to_string() } }),
        format!("error: {e}"),
        exit_code_for_error(e),
    )
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parameter(_) => "parameter",
        Error::Domain(_) => "domain",
        Error::Resource(_) => "resource",
        Error::BaseSharesFactor { .. } => "base_shares_factor",
        Error::Internal(_) => "internal",
    }
}

pub fn execute(command: &Command) -> Execution {
    let start = Instant::now();
    let (results, text, exit_code) = match command {
        Command::Factor(a) => run_factor(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Sample(a) => run_sample(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Check(a) => run_check(a),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let report = RunReport::new(
        command.name(),
        command.config_echo(),
        results,
        command.common().seed,
        elapsed,
    );
    Execution {
        report,
        text,
        exit_code,
    }
}

fn run_factor(a: &FactorArgs) -> CommandResult {
    let mut cfg = PipelineConfig::new(a.n);
    cfg.d = a.d;
    cfg.m = a.m;
    cfg.mode = a.mode.into();
    cfg.seed = a.common.seed;
    cfg.max_attempts = a.max_attempts;
    cfg.safety = a.safety;
    cfg.log2_radius = a.log2_radius;
    let report = match pipeline::run_factoring(&cfg) {
        Ok(r) => r,
        Err(e) => return error_result(&e),
    };
    let (text, code) = match &report.outcome {
        Outcome::Factor { factor, .. } => (factor.to_string(), EXIT_OK),
        Outcome::AssumptionViolated { reason } => (format!("assumption violated: {reason}"), EXIT_VIOLATION),
        Outcome::Rejected { reason } => (format!("rejected: {reason}"), EXIT_VIOLATION),
        Outcome::AttemptsExhausted { attempts } => {
            (format!("no factor after {attempts} attempts"), EXIT_EXHAUSTED)
        }
    };
    (serde_json::to_value(&report).expect("report serializes"), text, code)
}

/// One `d:D:R` entry of a simulation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub d: usize,
    pub grid: u64,
    pub radius: f64,
}

pub fn parse_sweep(s: &str) -> Result<Vec<SweepPoint>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let parts: Vec<&str> = t.split(':').collect();
            let bad = || Error::Parameter(format!("sweep entry {t:?} is not d:D:R"));
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok(SweepPoint {
                d: parts[0].parse().map_err(|_| bad())?,
                grid: parts[1].parse().map_err(|_| bad())?,
                radius: parts[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

fn run_simulate(a: &SimulateArgs) -> CommandResult {
    let points = match parse_sweep(&a.sweep) {
        Ok(p) => p,
        Err(e) => return error_result(&e),
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    for (i, p) in points.iter().enumerate() {
        let row = (|| {
            let params = GaussParams::with_grid(p.d, p.radius, p.grid)?;
            let rel = build_relation_lattice(&FactoringInstance::new(a.n, p.d)?)?;
            let mut rng = task_rng(a.common.seed, &[i as u64]);
            qsim::simulate(&rel, &params, a.trials, &mut rng)
        })();
        match row {
            Ok(r) => {
                text.push_str(&format!(
                    "d={} D={} R={}: Z1² {} ({:.6}), φ-gap {} ({:.3e}), Z1/Z2 {} ({:.6}), ℓ1(P,Q) = {:.3e}, hypotheses {}\n",
                    r.dim,
                    r.grid,
                    r.radius,
                    mark(r.z1_bound_ok),
                    r.z1_sq_normalized,
                    mark(r.phi_gap_ok),
                    r.phi_gap,
                    mark(r.z_ratio_ok),
                    r.z_ratio,
                    r.l1_pq,
                    if r.hypotheses_hold { "hold" } else { "do not hold" },
                ));
                let passed = r.passed();
                let mut v = serde_json::to_value(&r).expect("report serializes");
                v["passed"] = json!(passed);
                rows.push(v);
            }
            Err(e) => {
                let (mut v, msg, code) = error_result(&e);
                v["rows"] = Value::Array(rows);
                return (v, format!("{text}{msg}"), code);
            }
        }
    }
    (json!({ "rows": rows }), text, EXIT_OK)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_sample(a: &SampleArgs) -> CommandResult {
    let result = (|| {
        let params = match a.grid {
            Some(g) => GaussParams::with_grid(a.d, a.radius, g)?,
            None => GaussParams::new(a.d, a.radius)?,
        };
        let rel = build_relation_lattice(&FactoringInstance::new(a.n, a.d)?)?;
        let count = a.m.unwrap_or(a.d + 4);
        let samples = pipeline::acquire_samples(&rel, params, a.mode.into(), a.common.seed, a.attempt, count)?;
        Ok::<_, Error>((params, rel.det(), samples))
    })();
    match result {
        Ok((params, det, samples)) => {
            let mut text = String::new();
            let rows: Vec<Value> = samples
                .iter()
                .map(|(coset, w)| {
                    text.push_str(&format!("{:?}/{}\n", w.numerators, w.grid));
                    json!({ "coset": coset, "w": w })
                })
                .collect();
            (json!({ "params": params, "det": det, "samples": rows }), text, EXIT_OK)
        }
        Err(e) => error_result(&e),
    }
}

fn run_estimate(a: &EstimateArgs) -> CommandResult {
    let mut rows: Vec<Value> = Vec::new();
    let mut text = format!(
        "{:>8} {:>6} {:>8} {:>6} {:>14} {:>14} {:>10}\n",
        "n", "d", "log2 D", "ε", "total", "n²", "growth"
    );
    for &eps in &a.epsilon {
        let mut previous: Option<(u64, f64)> = None;
        for &n in &a.bits {
            let row = (|| {
                let (d, lg) = match (a.d, a.log2_grid) {
                    (Some(d), Some(lg)) => (d, lg),
                    (d, lg) => {
                        let (sd, slg) = cost::specialize(n, eps)?;
                        (d.unwrap_or(sd), lg.unwrap_or(slg))
                    }
                };
                cost::estimate_gate_cost(n, d, lg, cost::CostConstants::default(), a.epsilon_qft)
            })();
            let r = match row {
                Ok(r) => r,
                Err(e) => return error_result(&e),
            };
            // Growth relative to the previous bit length at the same ε.
            let growth = previous.map(|(_, t)| r.total / t);
            text.push_str(&format!(
                "{:>8} {:>6} {:>8} {:>6} {:>14.1} {:>14.1} {:>10}\n",
                r.n,
                r.d,
                r.log2_grid,
                eps,
                r.total,
                r.shor_reference,
                growth.map_or("-".to_string(), |g| format!("{g:.3}")),
            ));
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["epsilon"] = json!(eps);
            v["growth"] = json!(growth);
            rows.push(v);
            previous = Some((n, r.total));
        }
    }
    (json!({ "rows": rows }), text, EXIT_OK)
}

pub fn parse_suites(s: &str) -> Result<Vec<Suite>, Error> {
    match s.trim() {
        "all" => Ok(Suite::ALL.to_vec()),
        "none" | "" => Ok(Vec::new()),
        list => list.split(',').map(|t| t.trim().parse()).collect(),
    }
}

fn run_check(a: &CheckArgs) -> CommandResult {
    let selected = match parse_suites(&a.suite) {
        Ok(s) => s,
        Err(e) => return error_result(&e),
    };
    let mut results = Vec::new();
    let mut text = String::new();
    let mut all_passed = true;
    for suite in selected {
        match suites::run_suite(suite, a.trials, a.common.seed) {
            Ok(r) => {
                all_passed &= r.passed;
                text.push_str(&format!(
                    "{} {:<15} {}/{} (frequency {:.4}{}) {}\n",
                    mark(r.passed),
                    suite.name(),
                    r.successes,
                    r.trials,
                    r.frequency,
                    r.p_value.map_or(String::new(), |p| format!(", p = {p:.3e}")),
                    r.note,
                ));
                results.push(serde_json::to_value(&r).expect("result serializes"));
            }
            Err(e) => {
                let (mut v, msg, code) = error_result(&e);
                v["suites"] = Value::Array(results);
                return (v, format!("{text}{msg}"), code);
            }
        }
    }
    let code = if all_passed { EXIT_OK } else { EXIT_FAILED_CHECK };
    (json!({ "suites": results, "all_passed": all_passed }), text, code)
}
