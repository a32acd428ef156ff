//! The end-to-end driver: parameter selection, sample acquisition, lattice
//! recovery and factor extraction.

pub mod cost;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{bit_length, precheck, FactoringInstance, Precheck};
use crate::error::{Error, Result};
use crate::gauss::{self, DualSample, GaussParams};
use crate::intlat::DualCoset;
use crate::latred::{self, extended_lattice_from_samples};
use crate::qsim;
use crate::relattice::{
    build_relation_lattice, dual_cosets, extract_factor, in_l0, scan_ball, RelationLattice,
    DEFAULT_ENUMERATION_CAP,
};
use crate::rng::task_rng;

pub use cost::{estimate_gate_cost, specialize, CostConstants, GateCostReport};

/// Where the samples come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Classical sampling from the output distribution `Q`.
    #[default]
    Oracle,
    /// Measurement of the exact simulated state.
    Statevector,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Mode::Oracle),
            "statevector" => Ok(Mode::Statevector),
            other => Err(Error::Parameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub modulus: u64,
    /// Defaults to `⌈√n⌉`.
    pub d: Option<usize>,
    /// Samples per attempt; defaults to `d + 4`.
    pub m: Option<usize>,
    pub mode: Mode,
    pub seed: u64,
    pub max_attempts: u32,
    /// Extra bits added to `log₂ R`.
    pub safety: u32,
    /// Multiplier `C′` in `log₂ R = ⌈C′·(d + n/d + log₂ T)⌉ + safety`.
    pub radius_constant: f64,
    /// Overrides the computed `log₂ R`.
    pub log2_radius: Option<u32>,
    /// Radius of the witness search; defaults to `4√d·2^{n/d}`, clipped to
    /// the enumeration cap.
    pub witness_bound: Option<f64>,
    pub enumeration_cap: u64,
}

impl PipelineConfig {
    pub fn new(modulus: u64) -> Self {
        Self {
            modulus,
            d: None,
            m: None,
            mode: Mode::Oracle,
            seed: 0,
            max_attempts: 50,
            safety: 4,
            radius_constant: 1.0,
            log2_radius: None,
            witness_bound: None,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn dim(&self) -> usize {
        self.d.unwrap_or_else(|| default_dim(bit_length(self.modulus)))
    }

    pub fn samples(&self) -> usize {
        self.m.unwrap_or(self.dim() + 4)
    }
}

/// `⌈√n⌉`.
pub fn default_dim(bits: u32) -> usize {
    let mut d = (bits as f64).sqrt().ceil() as usize;
    while d > 1 && (d - 1) * (d - 1) >= bits as usize {
        d -= 1;
    }
    d.max(1)
}

/// Largest per-axis radius whose enumeration box fits in `cap`.
fn max_enumeration_radius(dim: usize, cap: u64) -> f64 {
    let side = (cap as f64).powf(1.0 / dim as f64);
    let mut r = ((side - 1.0) / 2.0).floor().max(0.0) as i64;
    while ((2 * r + 1) as f64).powi(dim as i32) > cap as f64 && r > 0 {
        r -= 1;
    }
    r as f64
}

/// Evidence for or against the short-witness assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub bound: f64,
    /// Whether the requested bound was reduced to respect the enumeration cap.
    pub bound_clipped: bool,
    pub witness: Option<Vec<i64>>,
    pub witness_norm: Option<f64>,
    /// Nonzero vectors of `L` within the bound.
    pub lattice_vectors: u64,
    pub outside_l0: u64,
    /// `outside_l0 / lattice_vectors`, or 0 when the ball holds no vector.
    pub fraction_outside_l0: f64,
}

/// Default witness search radius `4√d·2^{n/d}`.
pub fn default_witness_bound(bits: u32, dim: usize) -> f64 {
    4.0 * (dim as f64).sqrt() * 2f64.powf(bits as f64 / dim as f64)
}

/// Exhaustively searches the ball of radius `bound` for a vector of
/// `L \ L0`, clipping the radius to what `cap` allows.
pub fn certify_assumption(rel: &RelationLattice, bound: f64, cap: u64) -> Result<WitnessReport> {
    let limit = max_enumeration_radius(rel.dim(), cap);
    let clipped = bound.floor() > limit;
    let effective = if clipped { limit } else { bound };
    let scan = scan_ball(rel, effective, cap)?;
    let fraction = if scan.lattice_vectors == 0 {
        0.0
    } else {
        scan.outside_l0 as f64 / scan.lattice_vectors as f64
    };
    Ok(WitnessReport {
        bound: effective,
        bound_clipped: clipped,
        witness: scan.witness,
        witness_norm: scan.witness_norm,
        lattice_vectors: scan.lattice_vectors,
        outside_l0: scan.outside_l0,
        fraction_outside_l0: fraction,
    })
}

/// Parameters derived for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParameters {
    pub d: usize,
    pub m: usize,
    pub bits: u32,
    pub det: u64,
    /// Norm of the certified witness.
    pub t_est: f64,
    pub log2_radius: u32,
    pub grid: u64,
    /// Scale `S` of the extended lattice; equal to the grid size.
    pub scale: u64,
    /// `δ = √d/(√2 R)`.
    pub delta: f64,
    /// `(1 + m·(Sδ)²)^{1/2}`.
    pub lift_factor: f64,
    /// Bound handed to the extraction: `T·lift_factor`.
    pub t_ext: f64,
    /// `√k·2^{k/2}·T_ext` with `k = d + m`.
    pub extracted_norm_bound: f64,
    /// `δ^{-1}(4 det L)^{-1/m}/6`.
    pub projection_bound: f64,
    /// Whether `extracted_norm_bound < projection_bound`, the sufficient
    /// condition for every extracted vector to project into `L`.
    pub rigorous_bound_holds: bool,
}

/// `⌈C′·(d + n/d + log₂ T)⌉ + safety`.
pub fn select_log2_radius(config: &PipelineConfig, bits: u32, d: usize, t_est: f64) -> u32 {
    let raw = config.radius_constant * (d as f64 + bits as f64 / d as f64 + t_est.log2().max(0.0));
    raw.ceil().max(1.0) as u32 + config.safety
}

/// Largest grid for which `S·w` entries of the extended lattice fit in `i64`.
const MAX_GRID: u64 = 1 << 31;

fn derive_parameters(
    config: &PipelineConfig,
    rel: &RelationLattice,
    t_est: f64,
) -> Result<(RunParameters, GaussParams)> {
    let d = rel.dim();
    let m = config.samples();
    let bits = rel.instance().bits();
    let log2_radius = config
        .log2_radius
        .unwrap_or_else(|| select_log2_radius(config, bits, d, t_est));
    if log2_radius > 60 {
        return Err(Error::Resource(format!("log2 R = {log2_radius} is too large")));
    }
    let radius = 2f64.powi(log2_radius as i32);
    let params = GaussParams::new(d, radius)?;
    if params.grid > MAX_GRID {
        return Err(Error::Resource(format!(
            "grid size {} exceeds the supported maximum {MAX_GRID}",
            params.grid
        )));
    }
    let scale = params.grid;
    let delta = params.concentration_radius();
    let lift_factor = latred::lift_norm_factor(m, scale as f64, delta);
    let t_ext = t_est * lift_factor;
    let k = (d + m) as f64;
    let extracted_norm_bound = k.sqrt() * 2f64.powf(k / 2.0) * t_ext;
    let projection_bound = latred::projection_bound(delta, rel.det(), m);
    Ok((
        RunParameters {
            d,
            m,
            bits,
            det: rel.det(),
            t_est,
            log2_radius,
            grid: params.grid,
            scale,
            delta,
            lift_factor,
            t_ext,
            extracted_norm_bound,
            projection_bound,
            rigorous_bound_holds: extracted_norm_bound < projection_bound,
        },
        params,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Even modulus or perfect power.
    Precheck,
    /// A small prime base divides the modulus.
    BaseGcd,
    /// A recovered vector of `L \ L0`.
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Factor { factor: u64, cofactor: u64, route: Route },
    /// No vector of `L \ L0` within the certification bound.
    AssumptionViolated { reason: String },
    AttemptsExhausted { attempts: u32 },
    /// The modulus is prime.
    Rejected { reason: String },
}

/// Checks of one recovered candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateCheck {
    pub vector: Vec<i64>,
    pub in_l: bool,
    pub in_l0: Option<bool>,
    pub factor: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptTranscript {
    pub index: u32,
    /// Cosets drawn in oracle mode.
    pub cosets: Option<Vec<DualCoset>>,
    /// Sample numerators over the grid size.
    pub samples: Vec<Vec<u64>>,
    pub ell: usize,
    pub gs_norms: Vec<f64>,
    pub candidates: Vec<CandidateCheck>,
    pub factor: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoringReport {
    pub modulus: u64,
    pub precheck: Precheck,
    pub outcome: Outcome,
    pub witness: Option<WitnessReport>,
    pub parameters: Option<RunParameters>,
    pub attempts: Vec<AttemptTranscript>,
}

impl FactoringReport {
    pub fn factor(&self) -> Option<u64> {
        match self.outcome {
            Outcome::Factor { factor, .. } => Some(factor),
            _ => None,
        }
    }
}

fn factor_outcome(n: u64, g: u64, route: Route) -> Result<Outcome> {
    if g <= 1 || g >= n || n % g != 0 {
        return Err(Error::Internal(format!("{g} is not a nontrivial factor of {n}")));
    }
    Ok(Outcome::Factor {
        factor: g,
        cofactor: n / g,
        route,
    })
}

/// Source of `m` samples for one attempt.
enum Sampler {
    Oracle {
        dual: crate::intlat::DualStructure,
        params: GaussParams,
    },
    Statevector {
        probs: Vec<f64>,
        params: GaussParams,
    },
}

impl Sampler {
    fn new(mode: Mode, rel: &RelationLattice, params: GaussParams) -> Result<Self> {
        match mode {
            Mode::Oracle => Ok(Sampler::Oracle {
                dual: dual_cosets(rel),
                params,
            }),
            Mode::Statevector => {
                let (state, _) = qsim::build_gaussian_state(&params)?;
                let joint = qsim::apply_exponentiation(state, rel)?;
                Ok(Sampler::Statevector {
                    probs: qsim::qft_measure_distribution(&joint),
                    params,
                })
            }
        }
    }

    fn draw(&self, seed: u64, attempt: u32, index: usize) -> Result<(Option<DualCoset>, DualSample)> {
        let mut rng = task_rng(seed, &[attempt as u64, index as u64]);
        match self {
            Sampler::Oracle { dual, params } => {
                let (v, w) = gauss::sample_q(dual, params, &mut rng)?;
                Ok((Some(v), w))
            }
            Sampler::Statevector { probs, params } => {
                let idx = qsim::measure(probs, &mut rng);
                let w = DualSample::new(qsim::coords(idx, params.dim, params.grid), params.grid)?;
                Ok((None, w))
            }
        }
    }
}

/// Draws `count` samples for attempt index `attempt`, using the same per-task
/// streams as [`run_factoring`].
pub fn acquire_samples(
    rel: &RelationLattice,
    params: GaussParams,
    mode: Mode,
    seed: u64,
    attempt: u32,
    count: usize,
) -> Result<Vec<(Option<DualCoset>, DualSample)>> {
    let sampler = Sampler::new(mode, rel, params)?;
    (0..count)
        .into_par_iter()
        .map(|i| sampler.draw(seed, attempt, i))
        .collect()
}

fn run_attempt(
    sampler: &Sampler,
    rel: &RelationLattice,
    run: &RunParameters,
    seed: u64,
    index: u32,
) -> Result<AttemptTranscript> {
    let draws = (0..run.m)
        .into_par_iter()
        .map(|i| sampler.draw(seed, index, i))
        .collect::<Result<Vec<_>>>()?;
    let cosets: Option<Vec<DualCoset>> = draws.iter().map(|(v, _)| v.clone()).collect();
    let samples: Vec<DualSample> = draws.into_iter().map(|(_, w)| w).collect();
    let ext = extended_lattice_from_samples(run.d, &samples, run.scale)?;
    let recovery = latred::recover_relation_vectors(&ext, run.t_ext)?;
    let mut candidates = Vec::with_capacity(recovery.candidates.len());
    let mut factor = None;
    for z in recovery.candidates {
        let in_l = rel.in_l(&z);
        let mut check = CandidateCheck {
            vector: z.clone(),
            in_l,
            in_l0: None,
            factor: None,
        };
        if in_l {
            let trivial = in_l0(rel, &z)?;
            check.in_l0 = Some(trivial);
            if !trivial {
                let g = extract_factor(rel, &z)?;
                check.factor = Some(g);
                factor.get_or_insert(g);
            }
        }
        candidates.push(check);
    }
    Ok(AttemptTranscript {
        index,
        cosets,
        samples: samples.into_iter().map(|s| s.numerators).collect(),
        ell: recovery.generators.ell,
        gs_norms: recovery.generators.gs_norms,
        candidates,
        factor,
    })
}

/// Runs the full procedure on `config.modulus`.
pub fn run_factoring(config: &PipelineConfig) -> Result<FactoringReport> {
    let n = config.modulus;
    let check = precheck(n);
    let mut report = FactoringReport {
        modulus: n,
        precheck: check,
        outcome: Outcome::Rejected {
            reason: String::new(),
        },
        witness: None,
        parameters: None,
        attempts: Vec::new(),
    };
    match check {
        Precheck::Proceed => {}
        Precheck::Prime => {
            report.outcome = Outcome::Rejected {
                reason: format!("{n} is prime"),
            };
            return Ok(report);
        }
        Precheck::Even | Precheck::PerfectPower { .. } => {
            let g = check.factor().expect("screening found a factor");
            report.outcome = factor_outcome(n, g, Route::Precheck)?;
            return Ok(report);
        }
    }
    let d = config.dim();
    let m = config.samples();
    if d == 0 {
        return Err(Error::Parameter("d must be at least 1".into()));
    }
    if m < d + 4 {
        return Err(Error::Parameter(format!("m = {m} is below d + 4 = {}", d + 4)));
    }
    let inst = match FactoringInstance::new(n, d) {
        Ok(inst) => inst,
        Err(Error::BaseSharesFactor { factor, .. }) => {
            report.outcome = factor_outcome(n, factor, Route::BaseGcd)?;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let rel = build_relation_lattice(&inst)?;
    let bound = config
        .witness_bound
        .unwrap_or_else(|| default_witness_bound(inst.bits(), d));
    let witness = certify_assumption(&rel, bound, config.enumeration_cap)?;
    let t_est = match witness.witness_norm {
        Some(t) => t,
        None => {
            report.outcome = Outcome::AssumptionViolated {
                reason: format!(
                    "no vector of L \\ L0 of norm at most {} ({} lattice vectors scanned, all in L0)",
                    witness.bound, witness.lattice_vectors
                ),
            };
            report.witness = Some(witness);
            return Ok(report);
        }
    };
    report.witness = Some(witness);
    let (run, params) = derive_parameters(config, &rel, t_est)?;
    report.parameters = Some(run.clone());
    if config.max_attempts == 0 {
        report.outcome = Outcome::AttemptsExhausted { attempts: 0 };
        return Ok(report);
    }
    let sampler = Sampler::new(config.mode, &rel, params)?;
    for index in 0..config.max_attempts {
        let attempt = run_attempt(&sampler, &rel, &run, config.seed, index)?;
        let found = attempt.factor;
        report.attempts.push(attempt);
        if let Some(g) = found {
            report.outcome = factor_outcome(n, g, Route::Lattice)?;
            return Ok(report);
        }
    }
    report.outcome = Outcome::AttemptsExhausted {
        attempts: config.max_attempts,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: u64, d: usize, seed: u64) -> PipelineConfig {
        PipelineConfig {
            d: Some(d),
            seed,
            ..PipelineConfig::new(n)
        }
    }

    #[test]
    fn default_dimension_is_ceiling_sqrt() {
        assert_eq!(default_dim(1), 1);
        assert_eq!(default_dim(4), 2);
        assert_eq!(default_dim(5), 3);
        assert_eq!(default_dim(9), 3);
        assert_eq!(default_dim(10), 4);
    }

    #[test]
    fn enumeration_radius_respects_cap() {
        assert_eq!(max_enumeration_radius(1, 21), 10.0);
        assert_eq!(max_enumeration_radius(2, 25), 2.0);
        assert_eq!(max_enumeration_radius(2, 24), 1.0);
    }

    #[test]
    fn certify_examples() {
        let rel = build_relation_lattice(&FactoringInstance::new(15, 1).unwrap()).unwrap();
        let w = certify_assumption(&rel, 8.0, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(w.witness_norm, Some(2.0));
        assert_eq!(w.fraction_outside_l0, 0.5);
        assert!(!w.bound_clipped);

        // 2 has order 10 mod 33 and 2^5 ≡ −1, so L = L0 for d = 1.
        let rel = build_relation_lattice(&FactoringInstance::new(33, 1).unwrap()).unwrap();
        let w = certify_assumption(&rel, 1000.0, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(w.witness, None);
        assert!(w.lattice_vectors > 0);
    }

    #[test]
    fn precheck_routes() {
        let r = run_factoring(&PipelineConfig::new(16)).unwrap();
        assert_eq!(r.factor(), Some(2));
        let r = run_factoring(&PipelineConfig::new(49)).unwrap();
        assert_eq!(r.factor(), Some(7));
        let r = run_factoring(&PipelineConfig::new(13)).unwrap();
        assert!(matches!(r.outcome, Outcome::Rejected { .. }));
    }

    #[test]
    fn base_gcd_route() {
        let r = run_factoring(&config(15, 2, 0)).unwrap();
        assert_eq!(
            r.outcome,
            Outcome::Factor {
                factor: 3,
                cofactor: 5,
                route: Route::BaseGcd
            }
        );
    }

    #[test]
    fn assumption_violation_is_reported() {
        let r = run_factoring(&config(33, 1, 0)).unwrap();
        assert!(matches!(r.outcome, Outcome::AssumptionViolated { .. }));
        assert!(r.attempts.is_empty());
    }

    #[test]
    fn zero_attempts_exhaust_immediately() {
        let mut c = config(15, 1, 0);
        c.max_attempts = 0;
        let r = run_factoring(&c).unwrap();
        assert_eq!(r.outcome, Outcome::AttemptsExhausted { attempts: 0 });
    }

    #[test]
    fn factors_15_in_oracle_mode() {
        let r = run_factoring(&config(15, 1, 7)).unwrap();
        let g = r.factor().unwrap();
        assert!(g == 3 || g == 5);
        assert!(!r.attempts.is_empty());
        assert_eq!(r.attempts[0].samples.len(), 5);
    }

    #[test]
    fn factors_77_deterministically() {
        let a = run_factoring(&config(77, 2, 11)).unwrap();
        let b = run_factoring(&config(77, 2, 11)).unwrap();
        assert_eq!(a, b);
        let g = a.factor().unwrap();
        assert!(g == 7 || g == 11);
    }

    #[test]
    fn radius_formula() {
        let c = PipelineConfig::new(77);
        // n = 7, d = 2, T = 2: ⌈2 + 3.5 + 1⌉ + 4.
        assert_eq!(select_log2_radius(&c, 7, 2, 2.0), 11);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("oracle".parse::<Mode>().unwrap(), Mode::Oracle);
        assert_eq!("statevector".parse::<Mode>().unwrap(), Mode::Statevector);
        assert!("quantum".parse::<Mode>().is_err());
    }
}
