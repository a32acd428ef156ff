//! Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mdfactor::arith::FactoringInstance;
use mdfactor::gauss::GaussParams;
use mdfactor::pipeline::{cost, run_factoring, Mode, Outcome, PipelineConfig};
use mdfactor::qsim;
use mdfactor::relattice::build_relation_lattice;
use mdfactor::rng::task_rng;
use mdfactor::suites::{appendix_checks, run_suite, Suite, SuiteResult};

const SEED: u64 = 20240901;

const MODULI: [u64; 8] = [15, 21, 33, 35, 77, 91, 143, 221];

/// ℓ1(P, Q) regression ceilings for N = 77, D = 16, D/(√d·R) = 2, indexed by
/// d − 1. Recorded from the first implementation and rounded up.
const L1_BASELINES: [f64; 3] = [1.9e-3, 9.6e-4, 6.0e-5];

struct Tally {
    failed: Vec<&'static str>,
}

impl Tally {
    fn record(&mut self, name: &'static str, ok: bool, summary: String) {
        println!("{} {name}: {summary}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name);
        }
    }
}

fn end_to_end(t: &mut Tally) {
    let start = Instant::now();
    let mut ok = true;
    let mut factored = 0;
    for n in MODULI {
        let mut found = false;
        for d in [1usize, 2] {
            let mut cfg = PipelineConfig::new(n);
            cfg.d = Some(d);
            cfg.m = Some(d + 4);
            cfg.mode = Mode::Oracle;
            cfg.seed = SEED;
            cfg.max_attempts = 50;
            let line = match run_factoring(&cfg) {
                Ok(report) => match &report.outcome {
                    Outcome::Factor { factor, cofactor, route } => {
                        let verified = *factor > 1 && *factor < n && n % factor == 0 && factor * cofactor == n;
                        ok &= verified;
                        found |= verified;
                        format!(
                            "{n} = {factor}·{cofactor} via {route:?} after {} attempts{}",
                            report.attempts.len(),
                            if verified { "" } else { " (division check failed)" }
                        )
                    }
                    Outcome::AssumptionViolated { reason } => format!("assumption violated, certified: {reason}"),
                    other => {
                        ok = false;
                        format!("{other:?}")
                    }
                },
                Err(e) => {
                    ok = false;
                    format!("error: {e}")
                }
            };
            println!("    N = {n}, d = {d}: {line}");
        }
        if found {
            factored += 1;
        } else {
            ok = false;
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(300);
    t.record(
        "end-to-end factoring",
        ok && in_time,
        format!(
            "{factored}/{} moduli factored, every (N, d) factored or certified, {:.1} s",
            MODULI.len(),
            elapsed.as_secs_f64()
        ),
    );
}

fn appendix_claims(t: &mut Tally) {
    let checks = match appendix_checks() {
        Ok(c) => c,
        Err(e) => {
            t.record("Z1 normalization", false, format!("error: {e}"));
            t.record("phi gap and Z1/Z2", false, format!("error: {e}"));
            return;
        }
    };
    let z1_bad: Vec<_> = checks.iter().filter(|c| !c.z1_ok).collect();
    let worst_z1 = checks
        .iter()
        .map(|c| (c.z1_sq_normalized - 1.0).abs() / (2.0 * 0.5f64.powi(c.dim as i32)))
        .fold(0.0, f64::max);
    for c in &z1_bad {
        println!("    Z1 out of range at d = {} D = {} R = {}: {}", c.dim, c.grid, c.radius, c.z1_sq_normalized);
    }
    t.record(
        "Z1 normalization",
        z1_bad.is_empty(),
        format!(
            "{}/{} configurations within [1 ± 2·2^-d], worst slack used {:.3}",
            checks.len() - z1_bad.len(),
            checks.len(),
            worst_z1
        ),
    );

    let gap_bad: Vec<_> = checks.iter().filter(|c| !(c.phi_gap_ok && c.z_ratio_ok)).collect();
    let worst_gap = checks
        .iter()
        .map(|c| c.phi_gap / (2.0 * 0.5f64.powi(c.dim as i32)))
        .fold(0.0, f64::max);
    let worst_ratio = checks
        .iter()
        .map(|c| (c.z_ratio - 1.0).abs() / 0.5f64.powi(c.dim as i32))
        .fold(0.0, f64::max);
    for c in &gap_bad {
        println!(
            "    violation at d = {} D = {} R = {}: gap {}, ratio {}",
            c.dim, c.grid, c.radius, c.phi_gap, c.z_ratio
        );
    }
    t.record(
        "phi gap and Z1/Z2",
        gap_bad.is_empty(),
        format!(
            "{}/{} configurations, worst gap/bound {:.3e}, worst ratio deviation/bound {:.3e}",
            checks.len() - gap_bad.len(),
            checks.len(),
            worst_gap,
            worst_ratio
        ),
    );
}

fn qft_versus_oracle(t: &mut Tally) {
    let grid = 16u64;
    let mut ok = true;
    let mut values = Vec::new();
    for d in 1..=3usize {
        let radius = grid as f64 / (2.0 * (d as f64).sqrt());
        let result = (|| {
            let params = GaussParams::with_grid(d, radius, grid)?;
            let rel = build_relation_lattice(&FactoringInstance::new(77, d)?)?;
            qsim::simulate(&rel, &params, 0, &mut task_rng(SEED, &[d as u64]))
        })();
        match result {
            Ok(r) => {
                let below = r.l1_pq <= L1_BASELINES[d - 1];
                ok &= below;
                println!(
                    "    d = {d}, D = {grid}, R = {radius:.4}: ℓ1(P, Q) = {:.6e} (ceiling {:.1e}), unitarity error {:.1e}",
                    r.l1_pq,
                    L1_BASELINES[d - 1],
                    r.unitarity_error
                );
                values.push(r.l1_pq);
            }
            Err(e) => {
                ok = false;
                println!("    d = {d}: error {e}");
            }
        }
    }
    let monotone = values.len() == 3 && values.windows(2).all(|w| w[1] < w[0]);
    t.record(
        "QFT output vs Q",
        ok && monotone,
        format!(
            "below recorded ceilings: {ok}, strictly decreasing in d: {monotone}"
        ),
    );
}

fn suite_line(t: &mut Tally, name: &'static str, suite: Suite, trials: u64, extra: impl Fn(&SuiteResult) -> bool) {
    match run_suite(suite, Some(trials), SEED) {
        Ok(r) => {
            let ok = r.passed && extra(&r);
            t.record(
                name,
                ok,
                format!(
                    "{}/{} (frequency {:.4}{}{}); {}",
                    r.successes,
                    r.trials,
                    r.frequency,
                    r.threshold.map_or(String::new(), |x| format!(", threshold {x}")),
                    r.p_value.map_or(String::new(), |p| format!(", lower-tail p {p:.3e}")),
                    r.note
                ),
            );
        }
        Err(e) => t.record(name, false, format!("error: {e}")),
    }
}

fn cost_model(t: &mut Tally) {
    let c = cost::CostConstants::default();
    let mut ratios = Vec::new();
    let mut linear = Vec::new();
    for k in 8u32..=16 {
        let n = 1u64 << k;
        let (d, _) = cost::specialize(n, 0.0).unwrap();
        let head = cost::estimate_specialized(n, 0.0, c).unwrap();
        assert_eq!(d, (n as f64).sqrt().ceil() as u64);
        ratios.push(head.headline_ratio);
        let half = cost::estimate_specialized(n, 0.5, c).unwrap();
        linear.push(half.total / (n as f64 * (k as f64).powi(4)));
    }
    let spread = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::MIN, f64::max);
        let lo = v.iter().cloned().fold(f64::MAX, f64::min);
        (lo, hi)
    };
    let (lo, hi) = spread(&ratios);
    let (llo, lhi) = spread(&linear);
    let ok = hi / lo <= 4.0 && llo >= 0.25 && lhi <= 4.0;
    t.record(
        "cost estimator specialization",
        ok,
        format!(
            "total/(n^1.5·log n) ∈ [{lo:.3}, {hi:.3}] over n = 2^8..2^16; ε = 1/2 total/(n·log⁴n) ∈ [{llo:.3}, {lhi:.3}]"
        ),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut t = Tally { failed: Vec::new() };
    end_to_end(&mut t);
    appendix_claims(&mut t);
    qft_versus_oracle(&mut t);
    suite_line(&mut t, "dual-sample generation frequency", Suite::Lemma43, 2000, |r| r.frequency >= 0.25);
    suite_line(&mut t, "uniform generation of Z_t^r", Suite::Cor42, 2000, |r| r.frequency >= 0.5);
    suite_line(&mut t, "short-generator extraction", Suite::Claim51, 150, |_| true);
    suite_line(&mut t, "exponentiation schedule", Suite::Exponentiation, 1000, |_| true);
    suite_line(&mut t, "Gaussian tail bound", Suite::Banaszczyk, 60, |_| true);
    suite_line(&mut t, "Poisson summation identity", Suite::Poisson, 200, |_| true);
    cost_model(&mut t);
    println!(
        "{} criteria failed, {:.1} s total",
        t.failed.len(),
        start.elapsed().as_secs_f64()
    );
    if t.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
