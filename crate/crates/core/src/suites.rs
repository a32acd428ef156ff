//! Randomized property suites shared by the `check` command and the
//! acceptance tests. Every suite is seeded and reproducible.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::arith::{is_prime, pow_mod, product_tree_exponentiation, FactoringInstance, OpCounter};
use crate::error::{Error, Result};
use crate::gauss::{self, theta_1d, theta_cutoff, zd_tail_mass, GaussParams};
use crate::intlat::{determinant, DualStructure, IntLattice};
use crate::latred::{self, LatticeBasis};
use crate::qsim;
use crate::relattice::{build_relation_lattice, for_each_in_ball};
use crate::rng::task_rng;

/// Significance level of the one-sided frequency tests.
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma43,
    Cor42,
    Claim51,
    Cor45,
    Banaszczyk,
    Poisson,
    Exponentiation,
    Appendix,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lemma43,
        Suite::Cor42,
        Suite::Claim51,
        Suite::Cor45,
        Suite::Banaszczyk,
        Suite::Poisson,
        Suite::Exponentiation,
        Suite::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma43 => "lemma43",
            Suite::Cor42 => "cor42",
            Suite::Claim51 => "claim51",
            Suite::Cor45 => "cor45",
            Suite::Banaszczyk => "banaszczyk",
            Suite::Poisson => "poisson",
            Suite::Exponentiation => "exponentiation",
            Suite::Appendix => "appendix",
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Lemma43 | Suite::Cor42 => 2000,
            Suite::Claim51 => 120,
            Suite::Cor45 => 200,
            Suite::Banaszczyk => 60,
            Suite::Poisson => 200,
            Suite::Exponentiation => 1000,
            Suite::Appendix => 0,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub trials: u64,
    /// Trials in which the checked event held.
    pub successes: u64,
    pub frequency: f64,
    /// Frequency or bound the suite compares against.
    pub threshold: Option<f64>,
    /// Lower-tail binomial p-value at the threshold, for frequency suites.
    pub p_value: Option<f64>,
    /// Largest observed ratio to the bound (tail, error), where applicable.
    pub worst: Option<f64>,
    pub passed: bool,
    pub note: String,
}

impl SuiteResult {
    fn exact(suite: Suite, trials: u64, successes: u64, worst: Option<f64>, note: String) -> Self {
        Self {
            suite,
            trials,
            successes,
            frequency: if trials == 0 { 1.0 } else { successes as f64 / trials as f64 },
            threshold: None,
            p_value: None,
            worst,
            passed: successes == trials,
            note,
        }
    }

    /// Fails only when the data reject `p ≥ threshold` at level [`ALPHA`].
    fn frequency(suite: Suite, trials: u64, successes: u64, threshold: f64, note: String) -> Result<Self> {
        let p_value = binomial_lower_tail(trials, successes, threshold)?;
        Ok(Self {
            suite,
            trials,
            successes,
            frequency: successes as f64 / trials as f64,
            threshold: Some(threshold),
            p_value: Some(p_value),
            worst: None,
            passed: p_value >= ALPHA,
            note,
        })
    }
}

/// `P[X ≤ successes]` for `X ~ Binomial(trials, p)`.
pub fn binomial_lower_tail(trials: u64, successes: u64, p: f64) -> Result<f64> {
    let b = Binomial::new(p, trials).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(b.cdf(successes))
}

pub fn run_suite(suite: Suite, trials: Option<u64>, seed: u64) -> Result<SuiteResult> {
    let trials = trials.unwrap_or_else(|| suite.default_trials());
    let mut rng = task_rng(seed, &[0x5u64, suite as u64]);
    match suite {
        Suite::Lemma43 => lemma43(trials, &mut rng),
        Suite::Cor42 => cor42(trials, &mut rng),
        Suite::Claim51 => claim51(trials, &mut rng),
        Suite::Cor45 => cor45(trials, &mut rng),
        Suite::Banaszczyk => banaszczyk(trials, &mut rng),
        Suite::Poisson => poisson(trials, &mut rng),
        Suite::Exponentiation => exponentiation(trials, &mut rng),
        Suite::Appendix => appendix(),
    }
}

/// A random full-rank lattice `L ⊂ Z^d` with `2 ≤ det L ≤ max_det`, given by a
/// lower-triangular basis.
pub fn random_small_lattice<R: Rng + ?Sized>(dim: usize, max_det: u64, rng: &mut R) -> IntLattice {
    loop {
        let diag: Vec<i64> = (0..dim).map(|_| rng.gen_range(1..=8)).collect();
        let det: i64 = diag.iter().product();
        if det < 2 || det as u64 > max_det {
            continue;
        }
        let columns: Vec<Vec<i64>> = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|i| match i.cmp(&j) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => diag[j],
                        std::cmp::Ordering::Greater => rng.gen_range(0..diag[i]),
                    })
                    .collect()
            })
            .collect();
        return IntLattice::from_basis(&columns).expect("triangular basis with nonzero diagonal");
    }
}

/// `ε = (4 det L)^{-1/m}/3`.
pub fn spread_epsilon(det: u64, m: usize) -> f64 {
    (4.0 * det as f64).powf(-1.0 / m as f64) / 3.0
}

/// Whether every nonzero `u ∈ Z^d/L` pairs with some sample to a value at
/// least `ε` from an integer.
pub fn samples_well_spread(dual: &DualStructure, cosets: &[crate::intlat::DualCoset], eps: f64) -> bool {
    let denom = dual.denom() as f64;
    dual.quotient_representatives()
        .iter()
        .skip(1)
        .all(|u| {
            cosets.iter().any(|v| {
                let x = v.pair(u) as f64 / denom;
                x.min(1.0 - x) > eps
            })
        })
}

fn lemma43(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut hits = 0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=3);
        let lat = random_small_lattice(d, 64, rng);
        let dual = DualStructure::new(&lat);
        let m = d + 4;
        let cosets: Vec<_> = (0..m).map(|_| dual.sample(rng)).collect();
        if samples_well_spread(&dual, &cosets, spread_epsilon(lat.det(), m)) {
            hits += 1;
        }
    }
    SuiteResult::frequency(
        Suite::Lemma43,
        trials,
        hits,
        0.25,
        "random lattices with det ≤ 64, d ≤ 3, m = d + 4".into(),
    )
}

fn cor42(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut hits = 0;
    for _ in 0..trials {
        let r = rng.gen_range(1..=4usize);
        let t = *[2i64, 3, 4].choose(rng).expect("nonempty");
        let gens: Vec<Vec<i64>> = (0..r + 4)
            .map(|_| (0..r).map(|_| rng.gen_range(0..t)).collect())
            .collect();
        if IntLattice::from_generators(r, &gens, t as u64)?.det() == 1 {
            hits += 1;
        }
    }
    SuiteResult::frequency(Suite::Cor42, trials, hits, 0.5, "Z_t^r, r ≤ 4, t ∈ {2, 3, 4}".into())
}

/// Adjugate and determinant of a square integer matrix given by columns:
/// `x ∈ L` iff `adj·x ≡ 0 (mod det)`, and then `adj·x/det` are its
/// coordinates.
pub fn adjugate(columns: &[Vec<i64>]) -> (Vec<Vec<i128>>, i128) {
    let k = columns.len();
    let det = determinant(columns);
    if k == 1 {
        return (vec![vec![1]], det);
    }
    // adj[i][j] = (−1)^{i+j}·M_{ji}, with M_{ji} the minor deleting row j, column i.
    let mut adj = vec![vec![0i128; k]; k];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let minor: Vec<Vec<i64>> = (0..k)
                .filter(|&c| c != i)
                .map(|c| {
                    (0..k)
                        .filter(|&r| r != j)
                        .map(|r| columns[c][r])
                        .collect()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *slot = sign * determinant(&minor);
        }
    }
    (adj, det)
}

fn norm_f64(v: &[BigInt]) -> f64 {
    latred::norm_sq(v).to_f64().unwrap_or(f64::INFINITY).sqrt()
}

fn apply(adj: &[Vec<i128>], x: &[i64]) -> Vec<i128> {
    adj.iter()
        .map(|row| row.iter().zip(x).map(|(a, &b)| a * b as i128).sum())
        .collect()
}

/// Largest radius whose enumeration box in dimension `k` fits in `2^21` points.
fn enumeration_radius(k: usize) -> f64 {
    let side = 2f64.powf(21.0 / k as f64);
    ((side - 1.0) / 2.0).floor().min(60.0)
}

#[derive(Debug, Default)]
struct Claim51Tally {
    nonvacuous: u64,
    vectors: u64,
    span_failures: u64,
    norm_failures: u64,
    worst_norm_ratio: f64,
}

fn claim51_one<R: Rng + ?Sized>(rng: &mut R, tally: &mut Claim51Tally) -> Result<bool> {
    let k = rng.gen_range(1..=5usize);
    let triangular = rng.gen_bool(0.5);
    let columns: Vec<Vec<i64>> = loop {
        let cols: Vec<Vec<i64>> = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| {
                        if !triangular {
                            rng.gen_range(-20..=20)
                        } else if i < j {
                            0
                        } else if i == j {
                            rng.gen_range(1..=4)
                        } else {
                            rng.gen_range(-20..=20)
                        }
                    })
                    .collect()
            })
            .collect();
        if determinant(&cols) != 0 {
            break cols;
        }
    };
    let basis = LatticeBasis::from_i64(&columns)?;
    let first = norm_f64(&latred::lll_reduce(&basis, latred::default_delta())?.basis.columns()[0]);
    let t = (first * rng.gen_range(0.8..2.0)).min(enumeration_radius(k)).max(0.5);
    let out = latred::extract_short_generators(&basis, t)?;
    let reduced = out
        .reduced
        .to_i64()
        .ok_or_else(|| Error::Internal("reduced basis overflowed i64".into()))?;
    let (adj, det) = adjugate(&columns);
    let (adj_red, det_red) = adjugate(&reduced);
    let mut ok = true;
    let mut found = 0u64;
    for_each_in_ball(k, t, 1 << 22, |x, _| {
        if x.iter().all(|&v| v == 0) {
            return;
        }
        if apply(&adj, x).iter().any(|v| v % det != 0) {
            return;
        }
        found += 1;
        let coeffs = apply(&adj_red, x);
        let outside = coeffs[out.ell..].iter().any(|&c| c != 0);
        if outside {
            ok = false;
            tally.span_failures += 1;
        }
        debug_assert!(coeffs.iter().all(|c| c % det_red == 0));
    })?;
    tally.vectors += found;
    if found > 0 {
        tally.nonvacuous += 1;
    }
    for v in &out.vectors {
        let norm = norm_f64(v);
        let ratio = norm / out.norm_bound;
        tally.worst_norm_ratio = tally.worst_norm_ratio.max(ratio);
        if ratio > 1.0 {
            ok = false;
            tally.norm_failures += 1;
        }
    }
    Ok(ok)
}

fn claim51(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut tally = Claim51Tally::default();
    let mut passed = 0;
    for _ in 0..trials {
        if claim51_one(rng, &mut tally)? {
            passed += 1;
        }
    }
    Ok(SuiteResult::exact(
        Suite::Claim51,
        trials,
        passed,
        Some(tally.worst_norm_ratio),
        format!(
            "{} lattices with short vectors, {} vectors enumerated, {} outside the span, {} outputs over the norm bound",
            tally.nonvacuous, tally.vectors, tally.span_failures, tally.norm_failures
        ),
    ))
}

/// Extended-lattice projection check on tiny instances: whenever the samples
/// are well spread, every reduced basis vector shorter than
/// `min(S, δ⁻¹)·ε/2` projects to a nonzero vector of `L`.
fn cor45(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut passed = 0;
    let mut applicable = 0;
    let mut short_vectors = 0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=3);
        let lat = random_small_lattice(d, 64, rng);
        let dual = DualStructure::new(&lat);
        let m = d + 4;
        let params = GaussParams::new(d, 2f64.powi(rng.gen_range(6..=10)))?;
        let mut cosets = Vec::with_capacity(m);
        let mut samples = Vec::with_capacity(m);
        let mut delta: f64 = 0.0;
        for _ in 0..m {
            let (v, w) = gauss::sample_q(&dual, &params, rng)?;
            delta = delta.max(gauss::torus_distance(&w.to_f64(), &v.to_f64()));
            cosets.push(v);
            samples.push(w);
        }
        let delta = delta + 1e-12;
        let eps = spread_epsilon(lat.det(), m);
        if !samples_well_spread(&dual, &cosets, eps) {
            passed += 1;
            continue;
        }
        applicable += 1;
        let ext = latred::extended_lattice_from_samples(d, &samples, params.grid)?;
        let reduced = latred::lll_reduce(&ext.basis(), latred::default_delta())?;
        let bound = (params.grid as f64).min(1.0 / delta) * eps / 2.0;
        let mut ok = true;
        for v in reduced.basis.columns() {
            let norm = norm_f64(v);
            if norm >= bound {
                continue;
            }
            short_vectors += 1;
            let u: Option<Vec<i64>> = v[..d].iter().map(|x| x.to_i64()).collect();
            match u {
                Some(u) if u.iter().any(|&x| x != 0) && lat.contains(&u) => {}
                _ => ok = false,
            }
        }
        if ok {
            passed += 1;
        }
    }
    Ok(SuiteResult::exact(
        Suite::Cor45,
        trials,
        passed,
        None,
        format!("{applicable} trials with well-spread samples, {short_vectors} short basis vectors checked"),
    ))
}

fn banaszczyk(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut passed = 0;
    let mut worst: f64 = 0.0;
    for i in 0..trials {
        let d = (i % 6) as usize + 1;
        let s = rng.gen_range(0.3..2.5);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let (tail, _) = zd_tail_mass(s, &shift, (d as f64).sqrt() * s);
        let rho_zd = theta_1d(s, 1.0, 0.0, theta_cutoff(s)).powi(d as i32);
        let ratio = tail / (0.5f64.powi(d as i32) * rho_zd);
        worst = worst.max(ratio);
        if ratio < 1.0 {
            passed += 1;
        }
    }
    Ok(SuiteResult::exact(
        Suite::Banaszczyk,
        trials,
        passed,
        Some(worst),
        "tail beyond √d·s over 2^-d·ρ_s(Z^d), d ≤ 6".into(),
    ))
}

/// `ρ_s(cZ)` and `(s/c)·ρ_{1/s}(Z/c)`.
pub fn poisson_sides(s: f64, c: f64) -> (f64, f64) {
    let lhs = theta_1d(s, c, 0.0, theta_cutoff(s / c));
    let rhs = s / c * theta_1d(1.0 / s, 1.0 / c, 0.0, theta_cutoff(c / s));
    (lhs, rhs)
}

fn poisson(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let tol = 2f64.powi(-40);
    let mut passed = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let s = 2f64.powf(rng.gen_range(-2.0..3.0));
        let c = 2f64.powf(rng.gen_range(-2.0..3.0));
        let (lhs, rhs) = poisson_sides(s, c);
        let err = (lhs - rhs).abs() / lhs.max(rhs);
        worst = worst.max(err / tol);
        if err <= tol {
            passed += 1;
        }
    }
    Ok(SuiteResult::exact(
        Suite::Poisson,
        trials,
        passed,
        Some(worst),
        "relative error over 2^-40 for ρ_s(cZ) = (s/c)·ρ_{1/s}(Z/c)".into(),
    ))
}

fn random_prime<R: Rng + ?Sized>(lo: u64, hi: u64, rng: &mut R) -> u64 {
    loop {
        let p = rng.gen_range(lo..hi) | 1;
        if is_prime(p) {
            return p;
        }
    }
}

fn exponentiation(trials: u64, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut passed = 0;
    for _ in 0..trials {
        let p = random_prime(101, 1 << 20, rng);
        let q = loop {
            let q = random_prime(101, 1 << 20, rng);
            if q != p {
                break q;
            }
        };
        let d = rng.gen_range(1..=8);
        let inst = FactoringInstance::new(p * q, d)?;
        let grid = 1u64 << rng.gen_range(1..=16);
        let z: Vec<u64> = (0..d).map(|_| rng.gen_range(0..grid)).collect();
        let mut ops = OpCounter::default();
        let tree = product_tree_exponentiation(&inst, &z, grid, &mut ops)?;
        let naive = inst
            .squares()
            .iter()
            .zip(&z)
            .fold(1u64, |acc, (&a, &e)| {
                (acc as u128 * pow_mod(a, e, p * q) as u128 % (p * q) as u128) as u64
            });
        let bits = 64 - (grid - 1).leading_zeros() as u64;
        if tree == naive && ops.squarings_nbit == bits {
            passed += 1;
        }
    }
    Ok(SuiteResult::exact(
        Suite::Exponentiation,
        trials,
        passed,
        None,
        "product tree vs naive modpow; squarings = bit length of D − 1".into(),
    ))
}

/// Configurations with `D ≥ 2√d·R`, `R ≥ √(2d)`, `d ≤ 3` and `D^d ≤ 2^18`:
/// for each `(d, D)` the smallest admissible `R`, the largest, and their
/// geometric mean.
pub fn appendix_grid() -> Vec<GaussParams> {
    let mut out = Vec::new();
    for d in 1..=3usize {
        let df = d as f64;
        let r_min = (2.0 * df).sqrt();
        let mut grid = 2u64;
        while grid.pow(d as u32) <= 1 << 18 {
            let r_max = grid as f64 / (2.0 * df.sqrt());
            if r_max >= r_min {
                let mut radii = vec![r_min, (r_min * r_max).sqrt(), r_max];
                radii.dedup();
                for r in radii {
                    out.push(GaussParams::with_grid(d, r, grid).expect("valid grid"));
                }
            }
            grid *= 2;
        }
    }
    out
}

/// One row of the appendix-claim checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixCheck {
    pub dim: usize,
    pub grid: u64,
    pub radius: f64,
    pub z1_sq_normalized: f64,
    pub z1_ok: bool,
    pub phi_gap: f64,
    pub phi_gap_ok: bool,
    pub z_ratio: f64,
    pub z_ratio_ok: bool,
}

/// Modulus whose relation lattices serve as the fixed `L` of the grid checks.
pub const APPENDIX_MODULUS: u64 = 77;

pub fn appendix_checks() -> Result<Vec<AppendixCheck>> {
    let lattices: Vec<_> = (1..=3)
        .map(|d| build_relation_lattice(&FactoringInstance::new(APPENDIX_MODULUS, d)?))
        .collect::<Result<_>>()?;
    appendix_grid()
        .into_iter()
        .map(|p| {
            let (_, z1_sq) = qsim::build_gaussian_state(&p)?;
            let (z1_sq_normalized, z1_ok) = qsim::z1_within_bound(z1_sq, &p);
            let gap = qsim::phi1_phi2_gap(&lattices[p.dim - 1], &p)?;
            let bound = 0.5f64.powi(p.dim as i32);
            Ok(AppendixCheck {
                dim: p.dim,
                grid: p.grid,
                radius: p.radius,
                z1_sq_normalized,
                z1_ok,
                phi_gap: gap.gap,
                phi_gap_ok: gap.gap <= 2.0 * bound,
                z_ratio: gap.ratio,
                z_ratio_ok: (gap.ratio - 1.0).abs() <= bound,
            })
        })
        .collect()
}

fn appendix() -> Result<SuiteResult> {
    let checks = appendix_checks()?;
    let passed = checks
        .iter()
        .filter(|c| c.z1_ok && c.phi_gap_ok && c.z_ratio_ok)
        .count() as u64;
    let worst = checks
        .iter()
        .map(|c| c.phi_gap / (2.0 * 0.5f64.powi(c.dim as i32)))
        .fold(0.0, f64::max);
    Ok(SuiteResult::exact(
        Suite::Appendix,
        checks.len() as u64,
        passed,
        Some(worst),
        format!("Z1², φ-gap and Z1/Z2 bounds on {} configurations", checks.len()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("none".parse::<Suite>().is_err());
    }

    #[test]
    fn binomial_tail_examples() {
        // P[X ≤ 0] for Binomial(2, 1/2) is 1/4.
        assert!((binomial_lower_tail(2, 0, 0.5).unwrap() - 0.25).abs() < 1e-12);
        assert!((binomial_lower_tail(10, 10, 0.3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjugate_inverts() {
        let cols = vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 4]];
        let (adj, det) = adjugate(&cols);
        for j in 0..3 {
            let x = apply(&adj, &cols[j]);
            for (i, v) in x.iter().enumerate() {
                assert_eq!(*v, if i == j { det } else { 0 });
            }
        }
    }

    #[test]
    fn small_lattices_are_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let l = random_small_lattice(rng.gen_range(1..=3), 64, &mut rng);
            assert!((2..=64).contains(&l.det()));
        }
    }

    #[test]
    fn well_spread_on_2z() {
        // L = 2Z: the only nonzero u is 1, pairing to 0 or 1/2.
        let lat = IntLattice::from_basis(&[vec![2]]).unwrap();
        let dual = DualStructure::new(&lat);
        let cosets = dual.cosets();
        let zero = cosets.iter().find(|c| c.numerators[0] == 0).unwrap().clone();
        let half = cosets.iter().find(|c| c.numerators[0] != 0).unwrap().clone();
        assert!(!samples_well_spread(&dual, &vec![zero.clone(); 5], 0.1));
        assert!(samples_well_spread(&dual, &[zero, half], 0.1));
    }

    #[test]
    fn poisson_identity_example() {
        let (a, b) = poisson_sides(1.0, 1.0);
        assert!((a - b).abs() < 1e-14);
        let (a, b) = poisson_sides(3.0, 0.5);
        assert!((a - b).abs() / a < 2f64.powi(-40));
    }

    #[test]
    fn appendix_grid_respects_hypotheses() {
        let grid = appendix_grid();
        assert!(!grid.is_empty());
        for p in &grid {
            assert!(p.dim <= 3);
            assert!(p.grid.pow(p.dim as u32) <= 1 << 18);
            assert!(qsim::appendix_hypotheses(p) || (p.radius - (2.0 * p.dim as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Lemma43, Suite::Cor42, Suite::Exponentiation, Suite::Poisson] {
            let r = run_suite(s, Some(200), 1).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = run_suite(Suite::Claim51, Some(30), 1).unwrap();
        assert!(r.passed, "{r:?}");
        let r = run_suite(Suite::Banaszczyk, Some(12), 1).unwrap();
        assert!(r.passed, "{r:?}");
        let r = run_suite(Suite::Cor45, Some(20), 1).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
