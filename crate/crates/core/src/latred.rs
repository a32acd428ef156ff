//! Exact LLL reduction, short-generator extraction and the extended lattice
//! built from noisy dual samples.
//!
//! Bases are stored by columns. Gram-Schmidt data is kept in the integral
//! form of the LLL algorithm: `d_i = ∏_{j<i} ‖z̃_j‖²` and
//! `λ_{ij} = d_{j+1}·μ_{ij}` are integers for integer bases, so every step is
//! exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::DualSample;

/// A square integer basis, one vector per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    columns: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn new(columns: Vec<Vec<BigInt>>) -> Result<Self> {
        let k = columns.len();
        if k == 0 || columns.iter().any(|c| c.len() != k) {
            return Err(Error::Parameter("basis must be square and nonempty".into()));
        }
        Ok(Self { columns })
    }

    pub fn from_i64(columns: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            columns
                .iter()
                .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<BigInt>] {
        &self.columns
    }

    /// Columns as `i64`, if every entry fits.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.columns
            .iter()
            .map(|c| c.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn determinant(&self) -> BigInt {
        let k = self.dim();
        let mut a: Vec<Vec<BigInt>> = (0..k)
            .map(|i| (0..k).map(|j| self.columns[j][i].clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for p in 0..k {
            if a[p][p].is_zero() {
                match (p + 1..k).find(|&i| !a[i][p].is_zero()) {
                    Some(i) => {
                        a.swap(i, p);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in p + 1..k {
                for j in p + 1..k {
                    a[i][j] = (&a[i][j] * &a[p][p] - &a[i][p] * &a[p][j]) / &prev;
                }
            }
            prev = a[p][p].clone();
        }
        sign * &a[k - 1][k - 1]
    }

    /// Integer coordinates of `x` in this basis, or `None` if `x` is not a
    /// lattice vector.
    pub fn coordinates(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let k = self.dim();
        if x.len() != k {
            return Err(Error::Parameter("vector has the wrong length".into()));
        }
        let mut a: Vec<Vec<BigRational>> = (0..k)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..k)
                    .map(|j| BigRational::from_integer(self.columns[j][i].clone()))
                    .collect();
                row.push(BigRational::from_integer(x[i].clone()));
                row
            })
            .collect();
        for p in 0..k {
            let pivot = (p..k)
                .find(|&i| !a[i][p].is_zero())
                .ok_or_else(|| Error::Domain("basis is rank deficient".into()))?;
            a.swap(p, pivot);
            let inv = a[p][p].recip();
            for j in p..=k {
                a[p][j] = &a[p][j] * &inv;
            }
            for i in 0..k {
                if i != p && !a[i][p].is_zero() {
                    let f = a[i][p].clone();
                    for j in p..=k {
                        let t = &f * &a[p][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        let coeffs: Vec<BigRational> = a.into_iter().map(|row| row[k].clone()).collect();
        if coeffs.iter().all(|c| c.is_integer()) {
            Ok(Some(coeffs.into_iter().map(|c| c.to_integer()).collect()))
        } else {
            Ok(None)
        }
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}

/// Exact Gram-Schmidt data of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt {
    /// `‖z̃_i‖²`.
    pub norms_sq: Vec<BigRational>,
    /// `mu[i][j]` for `j < i`.
    pub mu: Vec<Vec<BigRational>>,
}

impl GramSchmidt {
    pub fn norms_f64(&self) -> Vec<f64> {
        self.norms_sq
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .collect()
    }
}

/// Integral Gram-Schmidt state: `dd[i+1] = d_i`, `dd[0] = 1`.
struct Integral {
    dd: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

impl Integral {
    fn gram_schmidt(&self) -> GramSchmidt {
        let k = self.lambda.len();
        let norms_sq = (0..k)
            .map(|i| BigRational::new(self.dd[i + 1].clone(), self.dd[i].clone()))
            .collect();
        let mu = (0..k)
            .map(|i| {
                (0..i)
                    .map(|j| BigRational::new(self.lambda[i][j].clone(), self.dd[j + 1].clone()))
                    .collect()
            })
            .collect();
        GramSchmidt { norms_sq, mu }
    }
}

/// Fills row `k` of the integral Gram-Schmidt data.
fn integral_row(b: &[Vec<BigInt>], st: &mut Integral, k: usize) -> Result<()> {
    for j in 0..=k {
        let mut u = dot(&b[k], &b[j]);
        for i in 0..j {
            u = (&st.dd[i + 1] * &u - &st.lambda[k][i] * &st.lambda[j][i]) / &st.dd[i];
        }
        if j < k {
            st.lambda[k][j] = u;
        } else {
            if u.is_zero() {
                return Err(Error::Domain("basis is rank deficient".into()));
            }
            st.dd[k + 1] = u;
        }
    }
    Ok(())
}

fn integral(b: &[Vec<BigInt>]) -> Result<Integral> {
    let k = b.len();
    let mut st = Integral {
        dd: vec![BigInt::one(); k + 1],
        lambda: vec![vec![BigInt::zero(); k]; k],
    };
    for i in 0..k {
        integral_row(b, &mut st, i)?;
    }
    Ok(st)
}

pub fn gram_schmidt(basis: &LatticeBasis) -> Result<GramSchmidt> {
    Ok(integral(&basis.columns)?.gram_schmidt())
}

/// Result of LLL reduction. `reduced = original · transform`, with
/// `transform` unimodular and given by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LllOutput {
    pub basis: LatticeBasis,
    pub transform: Vec<Vec<BigInt>>,
    pub gso: GramSchmidt,
    pub swaps: u64,
}

pub fn default_delta() -> Ratio<i64> {
    Ratio::new(3, 4)
}

/// LLL reduction with Lovász parameter `delta ∈ (1/4, 1]`.
pub fn lll_reduce(basis: &LatticeBasis, delta: Ratio<i64>) -> Result<LllOutput> {
    let quarter = Ratio::new(1, 4);
    if delta <= quarter || delta > Ratio::one() {
        return Err(Error::Parameter(format!("delta {delta} outside (1/4, 1]")));
    }
    let (p, q) = (BigInt::from(*delta.numer()), BigInt::from(*delta.denom()));
    let n = basis.dim();
    let mut b = basis.columns.clone();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut st = Integral {
        dd: vec![BigInt::one(); n + 1],
        lambda: vec![vec![BigInt::zero(); n]; n],
    };
    integral_row(&b, &mut st, 0)?;
    let mut kmax = 0;
    let mut k = 1;
    let mut swaps = 0u64;

    let reduce = |b: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, st: &mut Integral, k: usize, l: usize| {
        let two_lambda: BigInt = &st.lambda[k][l] * 2;
        if two_lambda.abs() > st.dd[l + 1] {
            // Nearest integer to λ_{kl}/d_l.
            let r = (&two_lambda + &st.dd[l + 1]).div_floor(&(&st.dd[l + 1] * 2));
            let (bl, ul) = (b[l].clone(), u[l].clone());
            for (x, y) in b[k].iter_mut().zip(&bl) {
                *x -= &r * y;
            }
            for (x, y) in u[k].iter_mut().zip(&ul) {
                *x -= &r * y;
            }
            st.lambda[k][l] -= &r * &st.dd[l + 1];
            for i in 0..l {
                let t = &r * &st.lambda[l][i];
                st.lambda[k][i] -= t;
            }
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            integral_row(&b, &mut st, k)?;
        }
        reduce(&mut b, &mut u, &mut st, k, k - 1);
        let lam = st.lambda[k][k - 1].clone();
        let lhs = &q * (&st.dd[k + 1] * &st.dd[k - 1] + &lam * &lam);
        let rhs = &p * &st.dd[k] * &st.dd[k];
        if lhs < rhs {
            swaps += 1;
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = std::mem::take(&mut st.lambda[k][j]);
                st.lambda[k][j] = std::mem::replace(&mut st.lambda[k - 1][j], t);
            }
            let bb = (&st.dd[k - 1] * &st.dd[k + 1] + &lam * &lam) / &st.dd[k];
            for i in k + 1..=kmax {
                let t = st.lambda[i][k].clone();
                st.lambda[i][k] = (&st.dd[k + 1] * &st.lambda[i][k - 1] - &lam * &t) / &st.dd[k];
                st.lambda[i][k - 1] = (&bb * &t + &lam * &st.lambda[i][k]) / &st.dd[k + 1];
            }
            st.dd[k] = bb;
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(&mut b, &mut u, &mut st, k, l);
            }
            k += 1;
        }
    }
    let gso = st.gram_schmidt();
    Ok(LllOutput {
        basis: LatticeBasis { columns: b },
        transform: u,
        gso,
        swaps,
    })
}

/// Whether a basis is size-reduced and satisfies the Lovász condition.
pub fn is_lll_reduced(basis: &LatticeBasis, delta: Ratio<i64>) -> Result<bool> {
    let gso = gram_schmidt(basis)?;
    let half = BigRational::new(1.into(), 2.into());
    let delta = BigRational::new((*delta.numer()).into(), (*delta.denom()).into());
    for i in 1..basis.dim() {
        if gso.mu[i].iter().any(|m| m.abs() > half) {
            return Ok(false);
        }
        let m = &gso.mu[i][i - 1];
        let lhs = &gso.norms_sq[i] + m * m * &gso.norms_sq[i - 1];
        if lhs < &delta * &gso.norms_sq[i - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of the short-generator extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortGenerators {
    pub ell: usize,
    pub vectors: Vec<Vec<BigInt>>,
    /// The full reduced basis; `vectors` is its first `ell` columns.
    pub reduced: LatticeBasis,
    pub gs_norms: Vec<f64>,
    /// `2^{k/2}·T`.
    pub threshold: f64,
    /// `√k·2^{k/2}·T`.
    pub norm_bound: f64,
}

fn bigrational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parameter(format!("{x} is not finite")))
}

/// LLL-reduces `basis` and keeps the prefix `z_1, …, z_ℓ` before the first
/// Gram-Schmidt norm reaching `2^{k/2}·T`. The returned vectors generate a
/// sublattice containing every lattice vector of norm at most `T`.
pub fn extract_short_generators(basis: &LatticeBasis, t: f64) -> Result<ShortGenerators> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("norm bound must be positive, got {t}")));
    }
    let k = basis.dim();
    let out = lll_reduce(basis, default_delta())?;
    let t_rat = bigrational(t)?;
    let threshold_sq = &t_rat * &t_rat * BigRational::from_integer(BigInt::one() << k);
    let ell = out
        .gso
        .norms_sq
        .iter()
        .position(|n| *n >= threshold_sq)
        .unwrap_or(k);
    let scale = 2f64.powf(k as f64 / 2.0) * t;
    Ok(ShortGenerators {
        ell,
        vectors: out.basis.columns[..ell].to_vec(),
        gs_norms: out.gso.norms_f64(),
        reduced: out.basis,
        threshold: scale,
        norm_bound: (k as f64).sqrt() * scale,
    })
}

/// The `(d+m)`-dimensional lattice generated by the columns of
/// `[[I, 0], [S·W, S·I]]`, where row `j` of `W` is the sample `w_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedLattice {
    pub d: usize,
    pub m: usize,
    pub scale: u64,
    pub grid: u64,
    /// `w_j = numerators[j] / grid`.
    pub numerators: Vec<Vec<i64>>,
    pub columns: Vec<Vec<i64>>,
}

impl ExtendedLattice {
    pub fn basis(&self) -> LatticeBasis {
        LatticeBasis::from_i64(&self.columns).expect("square by construction")
    }

    /// The shortest preimage of `u ∈ Z^d`: last coordinates are
    /// `S·(⟨w_j, u⟩ − round⟨w_j, u⟩)`.
    pub fn lift(&self, u: &[i64]) -> Vec<i64> {
        let g = self.grid as i128;
        let factor = (self.scale / self.grid) as i128;
        let mut out: Vec<i64> = u.to_vec();
        for row in &self.numerators {
            let t: i128 = row.iter().zip(u).map(|(&a, &b)| a as i128 * b as i128).sum();
            let nearest = (2 * t + g).div_euclid(2 * g);
            out.push((factor * (t - nearest * g)) as i64);
        }
        out
    }
}

/// Builds the extended lattice from samples `w_j ∈ (1/D)Z^d`.
pub fn build_extended_lattice(
    d: usize,
    w_list: &[Vec<Ratio<i64>>],
    scale: u64,
    grid: u64,
) -> Result<ExtendedLattice> {
    let m = w_list.len();
    if d == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    if m < d + 4 {
        return Err(Error::Parameter(format!("need m ≥ d + 4 = {} samples, got {m}", d + 4)));
    }
    if grid == 0 || scale == 0 || scale % grid != 0 {
        return Err(Error::Parameter(format!("scale {scale} is not a positive multiple of {grid}")));
    }
    let mut numerators = Vec::with_capacity(m);
    for w in w_list {
        if w.len() != d {
            return Err(Error::Parameter("sample has the wrong dimension".into()));
        }
        let row = w
            .iter()
            .map(|x| {
                let y = *x * Ratio::from_integer(grid as i64);
                if y.is_integer() {
                    Ok(y.to_integer())
                } else {
                    Err(Error::Domain(format!("sample coordinate {x} is off the 1/{grid} grid")))
                }
            })
            .collect::<Result<Vec<i64>>>()?;
        numerators.push(row);
    }
    let factor = (scale / grid) as i64;
    let k = d + m;
    let mut columns = vec![vec![0i64; k]; k];
    for (i, col) in columns.iter_mut().enumerate().take(d) {
        col[i] = 1;
        for (j, row) in numerators.iter().enumerate() {
            col[d + j] = factor * row[i];
        }
    }
    for j in 0..m {
        columns[d + j][d + j] = scale as i64;
    }
    Ok(ExtendedLattice {
        d,
        m,
        scale,
        grid,
        numerators,
        columns,
    })
}

/// Convenience wrapper taking measured grid samples.
pub fn extended_lattice_from_samples(d: usize, samples: &[DualSample], scale: u64) -> Result<ExtendedLattice> {
    let grid = samples
        .first()
        .map(|s| s.grid)
        .ok_or_else(|| Error::Parameter("no samples".into()))?;
    if samples.iter().any(|s| s.grid != grid) {
        return Err(Error::Domain("samples use different grids".into()));
    }
    let w: Vec<Vec<Ratio<i64>>> = samples
        .iter()
        .map(|s| s.numerators.iter().map(|&k| Ratio::new(k as i64, grid as i64)).collect())
        .collect();
    build_extended_lattice(d, &w, scale, grid)
}

/// `(1 + m·S²·δ²)^{1/2}`: the factor by which lifting can stretch a vector of
/// `L` when every sample is within `δ` of its dual coset.
pub fn lift_norm_factor(m: usize, scale: f64, delta: f64) -> f64 {
    (1.0 + m as f64 * (scale * delta).powi(2)).sqrt()
}

/// `δ^{-1}·(4 det L)^{-1/m}/6`: lifted vectors shorter than this project into
/// `L` whenever the samples are well spread.
pub fn projection_bound(delta: f64, det: u64, m: usize) -> f64 {
    (4.0 * det as f64).powf(-1.0 / m as f64) / (6.0 * delta)
}

/// Result of running the extraction on an extended lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub generators: ShortGenerators,
    /// Distinct nonzero projections onto the first `d` coordinates, up to
    /// sign, with the first nonzero entry positive.
    pub candidates: Vec<Vec<i64>>,
}

/// Extracts short generators of the extended lattice with bound `t_ext` and
/// projects them onto the first `d` coordinates. Membership in `L` is left to
/// the caller.
pub fn recover_relation_vectors(ext: &ExtendedLattice, t_ext: f64) -> Result<Recovery> {
    let generators = extract_short_generators(&ext.basis(), t_ext)?;
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    for v in &generators.vectors {
        let mut p: Vec<i64> = match v[..ext.d].iter().map(|x| x.to_i64()).collect() {
            Some(p) => p,
            None => continue,
        };
        match p.iter().find(|&&x| x != 0) {
            None => continue,
            Some(&x) if x < 0 => p.iter_mut().for_each(|y| *y = -*y),
            _ => {}
        }
        if !candidates.contains(&p) {
            candidates.push(p);
        }
    }
    Ok(Recovery {
        generators,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn basis(cols: &[Vec<i64>]) -> LatticeBasis {
        LatticeBasis::from_i64(cols).unwrap()
    }

    /// Shortest nonzero vector by enumerating small coefficient vectors.
    fn shortest_by_enumeration(cols: &[Vec<i64>], range: i64) -> i64 {
        let mut best = i64::MAX;
        for a in -range..=range {
            for b in -range..=range {
                if a == 0 && b == 0 {
                    continue;
                }
                let x = a * cols[0][0] + b * cols[1][0];
                let y = a * cols[0][1] + b * cols[1][1];
                best = best.min(x * x + y * y);
            }
        }
        best
    }

    #[test]
    fn identity_is_reduced() {
        let id = basis(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let out = lll_reduce(&id, default_delta()).unwrap();
        assert_eq!(out.basis, id);
        assert_eq!(out.swaps, 0);
    }

    #[test]
    fn near_parallel_pair() {
        let cols = vec![vec![201, 200], vec![200, 199]];
        let out = lll_reduce(&basis(&cols), default_delta()).unwrap();
        let first = norm_sq(&out.basis.columns()[0]);
        let original_min = cols.iter().map(|c| c[0] * c[0] + c[1] * c[1]).min().unwrap();
        assert!(first <= BigInt::from(original_min));
        assert!(first <= BigInt::from(2 * shortest_by_enumeration(&cols, 300)));
        assert_eq!(first, BigInt::from(1));
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let b = basis(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(lll_reduce(&b, default_delta()), Err(Error::Domain(_))));
    }

    #[test]
    fn delta_out_of_range() {
        let b = basis(&[vec![1]]);
        assert!(lll_reduce(&b, Ratio::new(1, 4)).is_err());
        assert!(lll_reduce(&b, Ratio::new(5, 4)).is_err());
        assert!(lll_reduce(&b, Ratio::new(1, 1)).is_ok());
    }

    #[test]
    fn gram_schmidt_of_a_triangle() {
        let g = gram_schmidt(&basis(&[vec![3, 0], vec![1, 2]])).unwrap();
        assert_eq!(g.norms_sq[0], BigRational::from_integer(9.into()));
        assert_eq!(g.norms_sq[1], BigRational::from_integer(4.into()));
        assert_eq!(g.mu[1][0], BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn extraction_threshold_examples() {
        let z2 = basis(&[vec![1, 0], vec![0, 1]]);
        let s = extract_short_generators(&z2, 1.0).unwrap();
        assert_eq!(s.ell, 2);
        let d = basis(&[vec![1, 0], vec![0, 100]]);
        let s = extract_short_generators(&d, 0.4).unwrap();
        assert_eq!(s.ell, 0);
        assert!(s.vectors.is_empty());
        assert!(extract_short_generators(&d, 0.0).is_err());
    }

    #[test]
    fn coordinates_detect_membership() {
        let b = basis(&[vec![2, 0], vec![1, 3]]);
        assert_eq!(b.coordinates(&big(&[3, 3])).unwrap(), Some(big(&[1, 1])));
        assert_eq!(b.coordinates(&big(&[1, 0])).unwrap(), None);
        assert_eq!(b.determinant(), BigInt::from(6));
    }

    #[test]
    fn extended_lattice_with_zero_samples() {
        let w = vec![vec![Ratio::from_integer(0)]; 5];
        let e = build_extended_lattice(1, &w, 8, 8).unwrap();
        for (j, col) in e.columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                let expect = if i != j { 0 } else if i == 0 { 1 } else { 8 };
                assert_eq!(x, expect);
            }
        }
    }

    #[test]
    fn extended_lattice_errors() {
        let w = vec![vec![Ratio::new(1, 3)]; 5];
        assert!(matches!(build_extended_lattice(1, &w, 8, 8), Err(Error::Domain(_))));
        let w = vec![vec![Ratio::new(1, 8)]; 4];
        assert!(build_extended_lattice(1, &w, 8, 8).is_err());
        let w = vec![vec![Ratio::new(1, 8)]; 5];
        assert!(build_extended_lattice(1, &w, 12, 8).is_err());
        assert!(build_extended_lattice(1, &w, 16, 8).is_ok());
    }

    #[test]
    fn exact_samples_lift_without_stretch() {
        // L = 2Z, dual coset 1/2.
        let w = vec![vec![Ratio::new(1, 2)]; 5];
        let e = build_extended_lattice(1, &w, 8, 8).unwrap();
        let lift = e.lift(&[2]);
        assert_eq!(lift, vec![2, 0, 0, 0, 0, 0]);
        let b = e.basis();
        assert!(b.coordinates(&big(&lift)).unwrap().is_some());
        // An odd vector lifts far.
        assert!(e.lift(&[1])[1..].iter().all(|&x| x.abs() == 4));
    }

    #[test]
    fn noiseless_recovery_lands_in_l() {
        let w = vec![vec![Ratio::new(1, 2)]; 5];
        let e = build_extended_lattice(1, &w, 1024, 1024).unwrap();
        let r = recover_relation_vectors(&e, 2.0).unwrap();
        assert_eq!(r.candidates, vec![vec![2]]);

        // L = Z: samples are 0.
        let w = vec![vec![Ratio::from_integer(0); 2]; 6];
        let e = build_extended_lattice(2, &w, 64, 64).unwrap();
        let r = recover_relation_vectors(&e, 1.0).unwrap();
        assert_eq!(r.candidates, vec![vec![1, 0], vec![0, 1]]);
    }

    fn random_basis(k: usize, entries: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-entries..=entries, k), k)
            .prop_filter("full rank", |cols| {
                LatticeBasis::from_i64(cols).map(|b| !b.determinant().is_zero()).unwrap_or(false)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lll_postconditions(cols in (1usize..=6).prop_flat_map(|k| random_basis(k, 40))) {
            let b = basis(&cols);
            let out = lll_reduce(&b, default_delta()).unwrap();
            prop_assert!(is_lll_reduced(&out.basis, default_delta()).unwrap());
            prop_assert_eq!(out.basis.determinant().abs(), b.determinant().abs());
            // reduced = original · transform
            let k = cols.len();
            for j in 0..k {
                for i in 0..k {
                    let s: BigInt = (0..k).map(|t| &b.columns()[t][i] * &out.transform[j][t]).sum();
                    prop_assert_eq!(&s, &out.basis.columns()[j][i]);
                }
            }
            let n = &out.gso.norms_sq;
            let half = BigRational::new(1.into(), 2.into());
            for i in 1..k {
                prop_assert!(&n[i] >= &(&n[i - 1] * &half));
            }
            let mut prefix = BigRational::zero();
            for i in 0..k {
                prefix += &n[i];
                let z = BigRational::from_integer(norm_sq(&out.basis.columns()[i]));
                prop_assert!(z <= prefix);
            }
        }

        #[test]
        fn unimodular_perturbation_preserves_det(
            cols in random_basis(3, 9),
            ops in prop::collection::vec((0usize..3, 0usize..3, -5i64..=5), 1..12),
        ) {
            let mut c = cols.clone();
            for (a, b, f) in ops {
                if a != b {
                    let src = c[b].clone();
                    for (x, y) in c[a].iter_mut().zip(&src) {
                        *x += f * y;
                    }
                }
            }
            let before = basis(&cols).determinant().abs();
            let out = lll_reduce(&basis(&c), default_delta()).unwrap();
            prop_assert_eq!(out.basis.determinant().abs(), before);
        }

        #[test]
        fn lift_norm_bound(
            v in 0i64..6,
            noise in prop::collection::vec(-2i64..=2, 5),
            u in prop::sample::select(vec![-12i64, -6, 6, 12, 18]),
        ) {
            // L = 6Z, true dual coset v/6, samples on the 1/48 grid.
            let grid = 48i64;
            let w: Vec<Vec<Ratio<i64>>> = noise
                .iter()
                .map(|&e| vec![Ratio::new(v * 8 + e, grid)])
                .collect();
            let delta = 2.0 / grid as f64;
            let ext = build_extended_lattice(1, &w, grid as u64, grid as u64).unwrap();
            let lift = ext.lift(&[u]);
            let norm = (lift.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
            let bound = u.abs() as f64 * lift_norm_factor(5, grid as f64, delta);
            prop_assert!(norm <= bound + 1e-9);
            prop_assert!(ext.basis().coordinates(&big(&lift)).unwrap().is_some());
        }
    }
}
