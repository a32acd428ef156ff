//! Discrete Gaussian functions and the classical oracle for the output
//! distribution of the quantum procedure.
//!
//! The output distribution `Q` is a uniform coset `v ∈ L*/Z^d` perturbed by
//! grid-discretized Gaussian noise: the mass of `Q_v` at `w ∈ {0, 1/D, …}^d`
//! is proportional to `ρ_{1/(√2 R)}(v − w + Z^d)`. It factorizes over
//! coordinates, so sampling is done one coordinate at a time by inverse CDF
//! over an explicit table of `D` masses.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlat::{DualCoset, DualStructure};

/// Exponents beyond this underflow `exp` to zero.
const EXP_UNDERFLOW: f64 = 745.0;

/// `ρ_s(x) = exp(−π‖x‖²/s²)`.
pub fn rho(s: f64, x: &[f64]) -> f64 {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    (-PI * norm2 / (s * s)).exp()
}

#[inline]
fn rho1(s: f64, x: f64) -> f64 {
    let arg = PI * x * x / (s * s);
    if arg > EXP_UNDERFLOW {
        0.0
    } else {
        (-arg).exp()
    }
}

/// Number of integer shifts on each side needed so that the neglected part of
/// a wrapped sum `Σ_k ρ_s(x + k)`, `x ∈ [0, 1)`, is below `2^-64`.
pub fn theta_cutoff(s: f64) -> i64 {
    // ρ_s(t) < 2^-64 once t > s·√(64 ln 2 / π).
    (s * (64.0 * std::f64::consts::LN_2 / PI).sqrt()).ceil() as i64 + 1
}

/// `Σ_{|k| ≤ cutoff} ρ_s(spacing·k + shift)`: a theta sum over the shifted
/// one-dimensional lattice `spacing·Z + shift`.
pub fn theta_1d(s: f64, spacing: f64, shift: f64, cutoff: i64) -> f64 {
    let mut terms: Vec<f64> = (-cutoff..=cutoff)
        .map(|k| rho1(s, spacing * k as f64 + shift))
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// `ρ_s(x + Z)` with `x` reduced to `[0, 1)` first.
pub fn wrapped_rho(s: f64, x: f64, cutoff: i64) -> f64 {
    let y = x.rem_euclid(1.0);
    (-cutoff..=cutoff).map(|k| rho1(s, y + k as f64)).sum()
}

/// Parameters of one run of the quantum procedure: dimension `d`, Gaussian
/// radius `R` and grid size `D` (a power of two).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussParams {
    pub dim: usize,
    pub radius: f64,
    pub grid: u64,
    /// Shift radius for the wrapped sums of width `1/(√2 R)`.
    pub theta_cutoff: i64,
}

impl GaussParams {
    /// Canonical parameters: `D` is the power of two in `[2√d·R, 4√d·R)` and
    /// `R > √(2d)` is required.
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !(radius > (2.0 * dim as f64).sqrt()) {
            return Err(Error::Parameter(format!(
                "radius {radius} must exceed sqrt(2d) = {}",
                (2.0 * dim as f64).sqrt()
            )));
        }
        let lower = 2.0 * (dim as f64).sqrt() * radius;
        let exp = lower.log2().ceil();
        if exp >= 63.0 {
            return Err(Error::Parameter("grid size exceeds 2^62".into()));
        }
        let mut grid = 1u64 << exp.max(1.0) as u32;
        // Guard against log2 rounding at exact powers of two.
        while (grid as f64) < lower {
            grid <<= 1;
        }
        while grid > 2 && (grid / 2) as f64 >= lower {
            grid >>= 1;
        }
        Self::with_grid(dim, radius, grid)
    }

    /// Parameters with an explicit grid. Only requires `D` to be a power of
    /// two at least 2 and `R > 0`, so simulations can step outside the
    /// canonical window; see [`GaussParams::is_canonical`].
    pub fn with_grid(dim: usize, radius: f64, grid: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
        }
        if grid < 2 || !grid.is_power_of_two() {
            return Err(Error::Parameter(format!("grid {grid} is not a power of two ≥ 2")));
        }
        Ok(Self {
            dim,
            radius,
            grid,
            theta_cutoff: theta_cutoff(1.0 / (2f64.sqrt() * radius)),
        })
    }

    /// Whether `D ∈ [2√d·R, 4√d·R)` and `R > √(2d)`.
    pub fn is_canonical(&self) -> bool {
        let lower = 2.0 * (self.dim as f64).sqrt() * self.radius;
        let g = self.grid as f64;
        lower <= g && g < 2.0 * lower && self.radius > (2.0 * self.dim as f64).sqrt()
    }

    /// Width `1/(√2 R)` of the output noise.
    pub fn noise_width(&self) -> f64 {
        1.0 / (2f64.sqrt() * self.radius)
    }

    /// `√d/(√2 R)`: the radius within which samples concentrate.
    pub fn concentration_radius(&self) -> f64 {
        (self.dim as f64).sqrt() * self.noise_width()
    }
}

/// A point `w = numerators / D` of the output grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualSample {
    pub numerators: Vec<u64>,
    pub grid: u64,
}

impl DualSample {
    pub fn new(numerators: Vec<u64>, grid: u64) -> Result<Self> {
        if let Some(&k) = numerators.iter().find(|&&k| k >= grid) {
            return Err(Error::Parameter(format!("numerator {k} is off the grid of size {grid}")));
        }
        Ok(Self { numerators, grid })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&k| k as f64 / self.grid as f64)
            .collect()
    }
}

/// One-dimensional mass table of `Q_v` for coordinate value `v`: entry `k` is
/// proportional to `ρ_{1/(√2R)}(v − k/D + Z)`, normalized to sum to 1.
pub fn coordinate_masses(v: f64, params: &GaussParams) -> Vec<f64> {
    let s = params.noise_width();
    let grid = params.grid as f64;
    let mut masses: Vec<f64> = (0..params.grid)
        .map(|k| wrapped_rho(s, v - k as f64 / grid, params.theta_cutoff))
        .collect();
    let total = pairwise_sum(&masses);
    for m in &mut masses {
        *m /= total;
    }
    masses
}

/// Summation with O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Inverse-CDF draw from a normalized mass table.
pub fn sample_index<R: Rng + ?Sized>(masses: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        acc += m;
        if u < acc {
            return i;
        }
    }
    // Rounding left a sliver of mass past the last entry: return the last
    // index with positive mass.
    masses.iter().rposition(|&m| m > 0.0).unwrap_or(masses.len() - 1)
}

/// Grid points within this many noise widths of `v` carry all but `2^-64` of
/// the mass of `Q_v`.
fn window_half_width(params: &GaussParams) -> u64 {
    let reach = params.noise_width() * (64.0 * std::f64::consts::LN_2 / PI).sqrt();
    (reach * params.grid as f64).ceil() as u64 + 2
}

/// Draws one coordinate of `w ~ Q_v`. Large grids use only the window of grid
/// points near `v`.
pub fn sample_coordinate<R: Rng + ?Sized>(v: f64, params: &GaussParams, rng: &mut R) -> u64 {
    let half = window_half_width(params);
    if 2 * half + 1 >= params.grid {
        return sample_index(&coordinate_masses(v, params), rng) as u64;
    }
    let s = params.noise_width();
    let grid = params.grid as f64;
    let center = (v.rem_euclid(1.0) * grid).round() as i64;
    let offsets: Vec<i64> = (-(half as i64)..=half as i64).collect();
    let mut masses: Vec<f64> = offsets
        .iter()
        .map(|&o| wrapped_rho(s, v - (center + o) as f64 / grid, params.theta_cutoff))
        .collect();
    let total = pairwise_sum(&masses);
    for m in &mut masses {
        *m /= total;
    }
    let pick = offsets[sample_index(&masses, rng)];
    (center + pick).rem_euclid(params.grid as i64) as u64
}

/// Draws `w ~ Q_v`.
pub fn sample_qv<R: Rng + ?Sized>(v: &[f64], params: &GaussParams, rng: &mut R) -> Result<DualSample> {
    if v.len() != params.dim {
        return Err(Error::Parameter(format!(
            "coset has dimension {}, expected {}",
            v.len(),
            params.dim
        )));
    }
    let numerators = v
        .iter()
        .map(|&vj| sample_coordinate(vj, params, rng))
        .collect();
    Ok(DualSample {
        numerators,
        grid: params.grid,
    })
}

/// Draws from `Q`: a uniform coset `v` of `L*/Z^d`, then `w ~ Q_v`.
pub fn sample_q<R: Rng + ?Sized>(
    dual: &DualStructure,
    params: &GaussParams,
    rng: &mut R,
) -> Result<(DualCoset, DualSample)> {
    let v = dual.sample(rng);
    let w = sample_qv(&v.to_f64(), params, rng)?;
    Ok((v, w))
}

/// The full distribution `Q` over the grid, indexed row-major with the first
/// coordinate most significant. Size `D^d`.
pub fn q_distribution(dual: &DualStructure, params: &GaussParams) -> Vec<f64> {
    let size = (params.grid as usize).pow(params.dim as u32);
    let mut out = vec![0.0; size];
    let cosets = dual.cosets();
    let weight = 1.0 / cosets.len() as f64;
    for v in &cosets {
        let tables: Vec<Vec<f64>> = v
            .to_f64()
            .iter()
            .map(|&vj| coordinate_masses(vj, params))
            .collect();
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut p = weight;
            let mut rest = idx;
            for t in tables.iter().rev() {
                p *= t[rest % params.grid as usize];
                rest /= params.grid as usize;
            }
            *slot += p;
        }
    }
    out
}

/// Distance between `w` and `v` on the torus `R^d/Z^d`.
pub fn torus_distance(w: &[f64], v: &[f64]) -> f64 {
    w.iter()
        .zip(v)
        .map(|(a, b)| {
            let t = (a - b).rem_euclid(1.0);
            let t = t.min(1.0 - t);
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub trials: u64,
    pub far: u64,
    /// Fraction of samples farther than `√d/(√2 R)` from their coset.
    pub rate: f64,
    /// The `2^-d` reference scale.
    pub reference: f64,
}

/// Measures how often `w ~ Q_v` lands farther than `√d/(√2 R)` from `v`, with
/// `v` uniform on the torus for each trial.
pub fn concentration_check<R: Rng + ?Sized>(
    params: &GaussParams,
    trials: u64,
    rng: &mut R,
) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let radius = params.concentration_radius();
    let mut far = 0;
    for _ in 0..trials {
        let v: Vec<f64> = (0..params.dim).map(|_| rng.gen::<f64>()).collect();
        let w = sample_qv(&v, params, rng)?;
        if torus_distance(&w.to_f64(), &v) > radius {
            far += 1;
        }
    }
    Ok(ConcentrationReport {
        trials,
        far,
        rate: far as f64 / trials as f64,
        reference: 0.5f64.powi(params.dim as i32),
    })
}

/// `ρ_s(Z^d + shift)` restricted to points of norm greater than `radius`,
/// together with the full sum `ρ_s(Z^d + shift)`.
pub fn zd_tail_mass(s: f64, shift: &[f64], radius: f64) -> (f64, f64) {
    let cutoff = theta_cutoff(s) + radius.ceil() as i64;
    let total: f64 = shift
        .iter()
        .map(|&x| theta_1d(s, 1.0, x, cutoff))
        .product();
    fn inside(s: f64, shift: &[f64], pos: usize, budget: f64, acc: f64) -> f64 {
        if pos == shift.len() {
            return acc;
        }
        let x = shift[pos];
        let reach = budget.max(0.0).sqrt();
        let lo = (-reach - x).ceil() as i64;
        let hi = (reach - x).floor() as i64;
        let mut sum = 0.0;
        for k in lo..=hi {
            let y = k as f64 + x;
            let rest = budget - y * y;
            if rest < 0.0 {
                continue;
            }
            sum += inside(s, shift, pos + 1, rest, acc * rho1(s, y));
        }
        sum
    }
    let inner = inside(s, shift, 0, radius * radius, 1.0);
    (total - inner, total)
}
