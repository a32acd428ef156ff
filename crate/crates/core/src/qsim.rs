//! Exact dense statevector simulation of the quantum procedure for tiny
//! `(d, D)`.
//!
//! Basis states of the `z` register are indexed row-major over
//! `{0, …, D−1}^d` with the first coordinate most significant; index `x`
//! encodes `z = x − D/2`. The `e` register is represented by its value, an
//! element of `Z_N^*`, rather than a coset label.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, mul_mod, pow_mod, product_tree_exponentiation, OpCounter};
use crate::error::{Error, Result};
use crate::gauss::{self, pairwise_sum, GaussParams};
use crate::relattice::{dual_cosets, RelationLattice};

/// Largest `D^d` the simulator accepts.
pub const STATE_GUARD: u64 = 1 << 22;

/// Largest `|image of h| · D^d` accepted for per-branch transforms.
pub const JOINT_GUARD: u64 = 1 << 28;

fn state_size(dim: usize, grid: u64) -> Result<usize> {
    let size = (grid as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if size > STATE_GUARD as u128 {
        return Err(Error::Resource(format!(
            "statevector of {grid}^{dim} amplitudes exceeds the guard of {STATE_GUARD}"
        )));
    }
    Ok(size as usize)
}

/// Coordinates of basis index `idx`.
pub fn coords(idx: usize, dim: usize, grid: u64) -> Vec<u64> {
    let mut out = vec![0; dim];
    let mut rest = idx as u64;
    for c in out.iter_mut().rev() {
        *c = rest % grid;
        rest /= grid;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub dim: usize,
    pub grid: u64,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        let sq: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        pairwise_sum(&sq).sqrt()
    }
}

/// One-dimensional truncated Gaussian `ρ_R(x − D/2)` for `x ∈ [0, D)`.
fn gaussian_profile(grid: u64, radius: f64) -> Vec<f64> {
    let half = (grid / 2) as f64;
    (0..grid)
        .map(|x| gauss::rho(radius, &[x as f64 - half]))
        .collect()
}

/// The normalized state `Σ_z ρ_R(z)|z⟩` over `{−D/2, …, D/2−1}^d`, and
/// `Z1² = Σ_z ρ_R(z)²`.
pub fn build_gaussian_state(params: &GaussParams) -> Result<(StateVector, f64)> {
    let size = state_size(params.dim, params.grid)?;
    let profile = gaussian_profile(params.grid, params.radius);
    let raw: Vec<f64> = (0..size)
        .map(|idx| {
            coords(idx, params.dim, params.grid)
                .iter()
                .map(|&c| profile[c as usize])
                .product()
        })
        .collect();
    let squares: Vec<f64> = raw.iter().map(|a| a * a).collect();
    let z1_sq = pairwise_sum(&squares);
    let z1 = z1_sq.sqrt();
    let amplitudes = raw.iter().map(|&a| Complex64::new(a / z1, 0.0)).collect();
    Ok((
        StateVector {
            dim: params.dim,
            grid: params.grid,
            amplitudes,
        },
        z1_sq,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrepReport {
    pub exact_qubits: u32,
    /// `|⟨exact|approx⟩|²`.
    pub fidelity: f64,
    pub amplitudes: Vec<f64>,
}

/// One-dimensional Gaussian state prepared with exact conditional rotations on
/// the `exact_qubits` most significant qubits and Hadamards on the rest.
pub fn state_prep_approximation(grid: u64, radius: f64, exact_qubits: u32) -> Result<StatePrepReport> {
    if grid < 2 || !grid.is_power_of_two() {
        return Err(Error::Parameter(format!("grid {grid} is not a power of two ≥ 2")));
    }
    let qubits = grid.trailing_zeros();
    if exact_qubits > qubits {
        return Err(Error::Parameter(format!(
            "{exact_qubits} exact qubits requested but the register has {qubits}"
        )));
    }
    state_size(1, grid)?;
    let profile = gaussian_profile(grid, radius);
    let norm = pairwise_sum(&profile.iter().map(|a| a * a).collect::<Vec<_>>()).sqrt();
    let exact: Vec<f64> = profile.iter().map(|a| a / norm).collect();
    let block = (grid >> exact_qubits) as usize;
    let amplitudes: Vec<f64> = exact
        .chunks(block)
        .flat_map(|chunk| {
            let prefix_mass: f64 = chunk.iter().map(|a| a * a).sum();
            let amp = (prefix_mass / block as f64).sqrt();
            std::iter::repeat(amp).take(block)
        })
        .collect();
    let overlap: f64 = exact.iter().zip(&amplitudes).map(|(a, b)| a * b).sum();
    Ok(StatePrepReport {
        exact_qubits,
        fidelity: overlap * overlap,
        amplitudes,
    })
}

/// The state after the exponentiation step: each basis index `x` carries the
/// value `e = ∏ a_i^{x_i} mod N` of the second register.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub state: StateVector,
    pub labels: Vec<u64>,
    /// Distinct values of the `e` register, sorted.
    pub branches: Vec<u64>,
    pub ops: OpCounter,
}

/// Attaches `e = h(z + D/2)` to every basis state; amplitudes are unchanged.
pub fn apply_exponentiation(state: StateVector, rel: &RelationLattice) -> Result<JointState> {
    let inst = rel.instance();
    if inst.dim() != state.dim {
        return Err(Error::Parameter(format!(
            "state has dimension {}, lattice has {}",
            state.dim,
            inst.dim()
        )));
    }
    let branch_bound = rel.det() as u128 * state.amplitudes.len() as u128;
    if branch_bound > JOINT_GUARD as u128 {
        return Err(Error::Resource(format!(
            "|image| · D^d = {branch_bound} exceeds the guard of {JOINT_GUARD}"
        )));
    }
    let mut ops = OpCounter::default();
    let labels = (0..state.amplitudes.len())
        .map(|idx| {
            product_tree_exponentiation(inst, &coords(idx, state.dim, state.grid), state.grid, &mut ops)
        })
        .collect::<Result<Vec<u64>>>()?;
    let mut branches = labels.clone();
    branches.sort_unstable();
    branches.dedup();
    Ok(JointState {
        state,
        labels,
        branches,
        ops,
    })
}

/// In-place QFT over `Z_D^d`: `|x⟩ ↦ D^{-d/2} Σ_w e^{2πi⟨w,x⟩/D} |w⟩`, one
/// length-`D` transform per axis.
pub fn qft(state: &mut StateVector) {
    let grid = state.grid as usize;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(grid);
    let scale = 1.0 / (grid as f64).sqrt();
    let mut line = vec![Complex64::new(0.0, 0.0); grid];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..state.dim {
        let stride = grid.pow((state.dim - 1 - axis) as u32);
        let outer = state.amplitudes.len() / (stride * grid);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * grid * stride + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = state.amplitudes[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    state.amplitudes[base + k * stride] = v * scale;
                }
            }
        }
    }
}

/// Exact outcome distribution of measuring the `z` register after the QFT,
/// with the `e` register discarded. Entry `idx` is the probability of
/// `w = coords(idx)/D`.
pub fn qft_measure_distribution(joint: &JointState) -> Vec<f64> {
    let size = joint.state.amplitudes.len();
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (idx, &e) in joint.labels.iter().enumerate() {
        groups.entry(e).or_default().push(idx);
    }
    let mut probs = vec![0.0; size];
    let zero = Complex64::new(0.0, 0.0);
    let mut branch = StateVector {
        dim: joint.state.dim,
        grid: joint.state.grid,
        amplitudes: vec![zero; size],
    };
    for members in groups.values() {
        branch.amplitudes.iter_mut().for_each(|a| *a = zero);
        for &idx in members {
            branch.amplitudes[idx] = joint.state.amplitudes[idx];
        }
        qft(&mut branch);
        for (p, a) in probs.iter_mut().zip(&branch.amplitudes) {
            *p += a.norm_sqr();
        }
    }
    probs
}

/// Draws an outcome index from an exact distribution.
pub fn measure<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    gauss::sample_index(probs, rng)
}

pub fn l1_distance(p: &[f64], q: &[f64]) -> f64 {
    let diffs: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a - b).abs()).collect();
    pairwise_sum(&diffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiGap {
    /// `‖φ1 − φ2‖₂` for the normalized truncated and wrapped states.
    pub gap: f64,
    pub z1: f64,
    pub z2: f64,
    /// `Z1/Z2`.
    pub ratio: f64,
}

/// `a^e mod n` for every `e ∈ [lo, lo + len)`, `lo` possibly negative.
fn power_table(a: u64, lo: i64, len: usize, n: u64) -> Vec<u64> {
    let start = if lo < 0 {
        pow_mod(inv_mod(a, n).expect("unit"), lo.unsigned_abs(), n)
    } else {
        pow_mod(a, lo as u64, n)
    };
    let mut out = Vec::with_capacity(len);
    let mut cur = start;
    for _ in 0..len {
        out.push(cur);
        cur = mul_mod(cur, a, n);
    }
    out
}

/// Number of wrap shifts per side so that neglected mass is below `2^-64`.
fn wrap_cutoff(grid: u64, radius: f64) -> i64 {
    let reach = radius * (64.0 * std::f64::consts::LN_2 / std::f64::consts::PI).sqrt();
    ((reach / grid as f64 - 0.5).ceil() as i64).max(1)
}

/// Compares the truncated state `|φ1⟩` with the state `|φ2⟩` whose Gaussian
/// wraps around modulo `D` within each coset of `L`.
pub fn phi1_phi2_gap(rel: &RelationLattice, params: &GaussParams) -> Result<PhiGap> {
    let dim = params.dim;
    let grid = params.grid;
    if rel.dim() != dim {
        return Err(Error::Parameter("lattice and parameters disagree on dimension".into()));
    }
    let size = state_size(dim, grid)?;
    let cutoff = wrap_cutoff(grid, params.radius);
    let shifts_per_axis = 2 * cutoff as usize + 1;
    let work = size as u128 * (shifts_per_axis as u128).pow(dim as u32);
    if work > JOINT_GUARD as u128 {
        return Err(Error::Resource(format!(
            "wrapped state needs {work} terms, above the guard of {JOINT_GUARD}"
        )));
    }
    let n = rel.instance().modulus();
    let g = grid as i64;
    // Per-axis exponent x + D·t ranges over [−cD, (c+1)D).
    let span = shifts_per_axis * grid as usize;
    let tables: Vec<Vec<u64>> = rel
        .instance()
        .squares()
        .iter()
        .map(|&a| power_table(a, -cutoff * g, span, n))
        .collect();
    let half = (grid / 2) as f64;
    let profile: Vec<f64> = (0..span)
        .map(|p| {
            let z = p as f64 - (cutoff * g) as f64 - half;
            gauss::rho(params.radius, &[z])
        })
        .collect();

    let shift_vectors: Vec<Vec<usize>> = {
        let mut all = vec![vec![]];
        for _ in 0..dim {
            all = all
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..shifts_per_axis).map(move |t| {
                        let mut q = p.clone();
                        q.push(t);
                        q
                    })
                })
                .collect();
        }
        let center = vec![cutoff as usize; dim];
        all.retain(|t| *t != center);
        all
    };

    // Per basis index: the unwrapped amplitude, the wrapped mass landing on
    // the same label, and the wrapped masses on other labels.
    let per_index = |idx: usize, other: &mut BTreeMap<u64, f64>| -> (f64, f64) {
        let x = coords(idx, dim, grid);
        let pos0: Vec<usize> = x.iter().map(|&c| c as usize + cutoff as usize * grid as usize).collect();
        let label = |pos: &[usize]| -> u64 {
            pos.iter()
                .zip(&tables)
                .fold(1 % n, |acc, (&p, t)| mul_mod(acc, t[p], n))
        };
        let amp = |pos: &[usize]| -> f64 { pos.iter().map(|&p| profile[p]).product() };
        let label0 = label(&pos0);
        let rho0 = amp(&pos0);
        let mut same = 0.0;
        other.clear();
        let mut pos = pos0.clone();
        for t in &shift_vectors {
            for a in 0..dim {
                pos[a] = pos0[a] + (t[a] * grid as usize) - cutoff as usize * grid as usize;
            }
            let w = amp(&pos);
            if w == 0.0 {
                continue;
            }
            let l = label(&pos);
            if l == label0 {
                same += w;
            } else {
                *other.entry(l).or_insert(0.0) += w;
            }
        }
        (rho0, same)
    };

    let mut other = BTreeMap::new();
    let mut z1_terms = Vec::with_capacity(size);
    let mut delta_terms = Vec::with_capacity(size);
    for idx in 0..size {
        let (rho0, same) = per_index(idx, &mut other);
        z1_terms.push(rho0 * rho0);
        let others: f64 = other.values().map(|w| w * w).sum();
        delta_terms.push(2.0 * rho0 * same + same * same + others);
    }
    let z1_sq = pairwise_sum(&z1_terms);
    let delta = pairwise_sum(&delta_terms);
    let z1 = z1_sq.sqrt();
    let z2 = (z1_sq + delta).sqrt();
    let z2_minus_z1 = delta / (z1 + z2);

    let mut gap_terms = Vec::with_capacity(size);
    for idx in 0..size {
        let (rho0, same) = per_index(idx, &mut other);
        let d0 = rho0 * z2_minus_z1 / (z1 * z2) - same / z2;
        let rest: f64 = other.values().map(|w| (w / z2).powi(2)).sum();
        gap_terms.push(d0 * d0 + rest);
    }
    Ok(PhiGap {
        gap: pairwise_sum(&gap_terms).sqrt(),
        z1,
        z2,
        ratio: z1 / z2,
    })
}

/// Everything the simulator checks for one `(lattice, d, D, R)` configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub dim: usize,
    pub grid: u64,
    pub radius: f64,
    pub modulus: u64,
    pub det: u64,
    /// `D ≥ 2√d·R` and `R ≥ √(2d)`.
    pub hypotheses_hold: bool,
    pub z1_sq: f64,
    /// `Z1² / (R/√2)^d`; the claim places it in `[1 − 2·2^-d, 1 + 2·2^-d]`.
    pub z1_sq_normalized: f64,
    pub z1_bound_ok: bool,
    pub phi_gap: f64,
    pub phi_gap_ok: bool,
    pub z_ratio: f64,
    pub z_ratio_ok: bool,
    /// `‖P − Q‖₁` between the simulated and oracle distributions.
    pub l1_pq: f64,
    pub unitarity_error: f64,
    pub concentration_rate: f64,
}

impl SimulationReport {
    /// Whether every hard bound holds (vacuously true off-hypothesis).
    pub fn passed(&self) -> bool {
        !self.hypotheses_hold || (self.z1_bound_ok && self.phi_gap_ok && self.z_ratio_ok)
    }
}

/// Whether `D ≥ 2√d·R` and `R ≥ √(2d)`.
pub fn appendix_hypotheses(params: &GaussParams) -> bool {
    let d = params.dim as f64;
    params.grid as f64 >= 2.0 * d.sqrt() * params.radius && params.radius >= (2.0 * d).sqrt()
}

/// Z1² bound check: `Z1² ∈ [1 ± 2·2^-d]·(R/√2)^d`.
pub fn z1_within_bound(z1_sq: f64, params: &GaussParams) -> (f64, bool) {
    let scale = (params.radius / 2f64.sqrt()).powi(params.dim as i32);
    let normalized = z1_sq / scale;
    let slack = 2.0 * 0.5f64.powi(params.dim as i32);
    (normalized, (normalized - 1.0).abs() <= slack)
}

pub fn simulate<R: Rng + ?Sized>(
    rel: &RelationLattice,
    params: &GaussParams,
    concentration_trials: u64,
    rng: &mut R,
) -> Result<SimulationReport> {
    let (state, z1_sq) = build_gaussian_state(params)?;
    let (z1_sq_normalized, z1_bound_ok) = z1_within_bound(z1_sq, params);
    let joint = apply_exponentiation(state, rel)?;
    let mut transformed = joint.state.clone();
    qft(&mut transformed);
    let unitarity_error = (transformed.norm() - joint.state.norm()).abs();
    let p = qft_measure_distribution(&joint);
    let q = gauss::q_distribution(&dual_cosets(rel), params);
    let gap = phi1_phi2_gap(rel, params)?;
    let bound = 0.5f64.powi(params.dim as i32);
    let concentration_rate = if concentration_trials > 0 {
        gauss::concentration_check(params, concentration_trials, rng)?.rate
    } else {
        0.0
    };
    Ok(SimulationReport {
        dim: params.dim,
        grid: params.grid,
        radius: params.radius,
        modulus: rel.instance().modulus(),
        det: rel.det(),
        hypotheses_hold: appendix_hypotheses(params),
        z1_sq,
        z1_sq_normalized,
        z1_bound_ok,
        phi_gap: gap.gap,
        phi_gap_ok: gap.gap <= 2.0 * bound,
        z_ratio: gap.ratio,
        z_ratio_ok: (gap.ratio - 1.0).abs() <= bound,
        l1_pq: l1_distance(&p, &q),
        unitarity_error,
        concentration_rate,
    })
}
