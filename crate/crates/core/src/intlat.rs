//! Full-rank integer lattices `L ⊆ Z^d` with `Z^d/L` finite.
//!
//! Lattices are kept in lower-triangular Hermite normal form with basis
//! vectors as columns. Construction goes through a modular HNF: every lattice
//! handled here contains `M·Z^d` for a known `M` (its determinant, or the
//! exponent of the group it is a kernel of), so all intermediate entries are
//! reduced modulo `M` and stay small.
//!
//! [`DualStructure`] carries the Smith decomposition used to sample
//! `L*/Z^d` and enumerate `Z^d/L` exactly.

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by the modular HNF; keeps products in `i128`.
const MAX_HNF_MODULUS: i128 = 1 << 62;

/// Incremental modular Hermite normal form.
#[derive(Debug, Clone)]
pub struct HnfBuilder {
    modulus: i128,
    cols: Vec<Vec<i128>>,
}

impl HnfBuilder {
    /// Starts from the lattice `modulus · Z^dim`.
    pub fn new(dim: usize, modulus: u64) -> Result<Self> {
        let modulus = modulus as i128;
        if dim == 0 || modulus < 1 || modulus > MAX_HNF_MODULUS {
            return Err(Error::Parameter(format!(
                "HNF needs dim ≥ 1 and 1 ≤ modulus ≤ 2^62 (dim {dim}, modulus {modulus})"
            )));
        }
        let cols = (0..dim)
            .map(|j| {
                let mut c = vec![0i128; dim];
                c[j] = modulus;
                c
            })
            .collect();
        Ok(Self { modulus, cols })
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Index of the current lattice in `Z^d`.
    pub fn det(&self) -> u128 {
        self.cols.iter().enumerate().map(|(j, c)| c[j] as u128).product()
    }

    /// Adds `v` to the generating set.
    pub fn insert(&mut self, v: &[i64]) {
        let m = self.modulus;
        let dim = self.dim();
        let mut r: Vec<i128> = v.iter().map(|&x| (x as i128).rem_euclid(m)).collect();
        for j in 0..dim {
            if r[j] == 0 {
                continue;
            }
            let p = self.cols[j][j];
            let e = p.extended_gcd(&r[j]);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (pg, rg) = (p / g, r[j] / g);
            let col = &mut self.cols[j];
            for i in j + 1..dim {
                let c = col[i];
                let x = r[i];
                col[i] = (s * c + t * x).rem_euclid(m);
                r[i] = (rg * c - pg * x).rem_euclid(m);
            }
            col[j] = g;
            r[j] = 0;
        }
    }

    /// Canonical HNF: off-diagonal entries of row `i` lie in `[0, H[i][i])`.
    pub fn finish(mut self) -> IntLattice {
        let dim = self.dim();
        for i in 0..dim {
            let pivot = self.cols[i][i];
            for j in 0..i {
                let q = Integer::div_floor(&self.cols[j][i], &pivot);
                if q != 0 {
                    for row in i..dim {
                        let sub = q * self.cols[i][row];
                        self.cols[j][row] -= sub;
                    }
                }
            }
        }
        let det = self.det() as u64;
        IntLattice {
            columns: self
                .cols
                .into_iter()
                .map(|c| c.into_iter().map(|x| x as i64).collect())
                .collect(),
            det,
        }
    }
}

/// A full-rank sublattice of `Z^d` in Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntLattice {
    /// `columns[j]` is the `j`-th basis vector; `columns[j][i] = 0` for `i < j`.
    columns: Vec<Vec<i64>>,
    det: u64,
}

impl IntLattice {
    /// `Z^dim`.
    pub fn integer(dim: usize) -> Self {
        HnfBuilder::new(dim, 1).expect("valid").finish()
    }

    /// Lattice generated by `generators` together with `modulus · Z^d`.
    pub fn from_generators(dim: usize, generators: &[Vec<i64>], modulus: u64) -> Result<Self> {
        let mut b = HnfBuilder::new(dim, modulus)?;
        for g in generators {
            if g.len() != dim {
                return Err(Error::Parameter("generator has the wrong length".into()));
            }
            b.insert(g);
        }
        Ok(b.finish())
    }

    /// Lattice spanned by the columns of a square full-rank basis.
    pub fn from_basis(columns: &[Vec<i64>]) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Parameter("basis must be square and nonempty".into()));
        }
        let det = determinant(columns).unsigned_abs();
        if det == 0 {
            return Err(Error::Domain("basis is rank deficient".into()));
        }
        let det = u64::try_from(det)
            .map_err(|_| Error::Parameter("determinant exceeds 64 bits".into()))?;
        let lat = Self::from_generators(dim, columns, det)?;
        if lat.det != det {
            return Err(Error::Internal(format!(
                "HNF determinant {} differs from basis determinant {det}",
                lat.det
            )));
        }
        Ok(lat)
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Index `[Z^d : L]`.
    pub fn det(&self) -> u64 {
        self.det
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        if z.len() != self.dim() {
            return false;
        }
        let mut r: Vec<i128> = z.iter().map(|&x| x as i128).collect();
        for (j, col) in self.columns.iter().enumerate() {
            let p = col[j] as i128;
            if r[j] % p != 0 {
                return false;
            }
            let c = r[j] / p;
            for i in j..r.len() {
                r[i] -= c * col[i] as i128;
            }
        }
        true
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(columns: &[Vec<i64>]) -> i128 {
    let n = columns.len();
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| columns[j][i] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Smith decomposition `U·H·V = diag(s)` of a square nonsingular matrix given
/// by rows. Returns `(s, U, U⁻¹, V)` with `s_i | s_{i+1}` and `s_i > 0`.
#[allow(clippy::type_complexity)]
pub fn smith_decomposition(
    rows: &[Vec<i128>],
) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = rows.len();
    let identity = |n: usize| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
            .collect()
    };
    let mut a = rows.to_vec();
    let mut u = identity(n);
    let mut u_inv = identity(n);
    let mut v = identity(n);

    // Row op: row_i += q·row_k. Inverse: column_k of U⁻¹ -= q·column_i.
    let row_add = |a: &mut Vec<Vec<i128>>,
                   u: &mut Vec<Vec<i128>>,
                   u_inv: &mut Vec<Vec<i128>>,
                   i: usize,
                   k: usize,
                   q: i128| {
        for c in 0..n {
            a[i][c] += q * a[k][c];
            u[i][c] += q * u[k][c];
        }
        for r in 0..n {
            u_inv[r][k] -= q * u_inv[r][i];
        }
    };

    for t in 0..n {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let (pi, pj) = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
                .expect("matrix is nonsingular");
            if pi != t {
                a.swap(pi, t);
                u.swap(pi, t);
                for r in u_inv.iter_mut() {
                    r.swap(pi, t);
                }
            }
            if pj != t {
                for r in a.iter_mut() {
                    r.swap(pj, t);
                }
                for r in v.iter_mut() {
                    r.swap(pj, t);
                }
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let q = Integer::div_floor(&a[i][t], &p);
                if q != 0 {
                    row_add(&mut a, &mut u, &mut u_inv, i, t, -q);
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = Integer::div_floor(&a[t][j], &p);
                if q != 0 {
                    for r in 0..n {
                        a[r][j] -= q * a[r][t];
                        v[r][j] -= q * v[r][t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match offender {
                Some(i) => row_add(&mut a, &mut u, &mut u_inv, t, i, 1),
                None => break,
            }
        }
        if a[t][t] < 0 {
            for c in 0..n {
                a[t][c] = -a[t][c];
                u[t][c] = -u[t][c];
            }
            for r in u_inv.iter_mut() {
                r[t] = -r[t];
            }
        }
    }
    let s = (0..n).map(|i| a[i][i]).collect();
    (s, u, u_inv, v)
}

/// A coset of `L*/Z^d`, stored as integer numerators over a common
/// denominator, reduced into `[0, denom)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualCoset {
    pub numerators: Vec<i64>,
    pub denom: i64,
}

impl DualCoset {
    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&x| x as f64 / self.denom as f64)
            .collect()
    }

    /// `⟨u, v⟩ mod 1` as a numerator in `[0, denom)`.
    pub fn pair(&self, u: &[i64]) -> i64 {
        let s: i128 = u
            .iter()
            .zip(&self.numerators)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        s.rem_euclid(self.denom as i128) as i64
    }
}

/// Smith-form description of the finite groups `L*/Z^d` and `Z^d/L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualStructure {
    /// Invariant factors `s_1 | s_2 | … | s_d`, product `det L`.
    pub snf_diag: Vec<u64>,
    /// `Uᵀ` (rows): maps `(x_i / s_i)` to a coset representative of `L*/Z^d`.
    pub coset_map: Vec<Vec<i64>>,
    /// `U⁻¹` (rows): maps `y ∈ ⊕ Z_{s_i}` to a representative of `Z^d/L`.
    pub quotient_map: Vec<Vec<i64>>,
}

impl DualStructure {
    pub fn new(lattice: &IntLattice) -> Self {
        let d = lattice.dim();
        // HNF rows: H[i][j] = columns[j][i].
        let rows: Vec<Vec<i128>> = (0..d)
            .map(|i| (0..d).map(|j| lattice.columns()[j][i] as i128).collect())
            .collect();
        let (s, u, u_inv, _) = smith_decomposition(&rows);
        let denom = *s.last().expect("nonempty");
        // Reducing U modulo the exponent keeps the maps small without changing
        // the cosets they produce.
        let coset_map = (0..d)
            .map(|i| (0..d).map(|j| u[j][i].rem_euclid(denom) as i64).collect())
            .collect();
        let quotient_map = u_inv
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        Self {
            snf_diag: s.iter().map(|&x| x as u64).collect(),
            coset_map,
            quotient_map,
        }
    }

    pub fn dim(&self) -> usize {
        self.snf_diag.len()
    }

    /// `|L*/Z^d| = det L`.
    pub fn order(&self) -> u64 {
        self.snf_diag.iter().product()
    }

    pub fn denom(&self) -> i64 {
        *self.snf_diag.last().expect("nonempty") as i64
    }

    /// The coset with Smith coordinates `x_i ∈ Z_{s_i}`.
    pub fn coset(&self, x: &[u64]) -> DualCoset {
        let denom = self.denom();
        let scaled: Vec<i128> = x
            .iter()
            .zip(&self.snf_diag)
            .map(|(&xi, &si)| xi as i128 * (denom as i128 / si as i128))
            .collect();
        let numerators = self
            .coset_map
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&scaled)
                    .map(|(&a, &b)| a as i128 * b)
                    .sum::<i128>()
                    .rem_euclid(denom as i128) as i64
            })
            .collect();
        DualCoset { numerators, denom }
    }

    /// Uniform coset of `L*/Z^d`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DualCoset {
        let x: Vec<u64> = self.snf_diag.iter().map(|&s| rng.gen_range(0..s)).collect();
        self.coset(&x)
    }

    fn smith_points(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &s in &self.snf_diag {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..s).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// All `det L` cosets of `L*/Z^d`.
    pub fn cosets(&self) -> Vec<DualCoset> {
        self.smith_points().iter().map(|x| self.coset(x)).collect()
    }

    /// One representative per element of `Z^d/L`, the zero coset first.
    pub fn quotient_representatives(&self) -> Vec<Vec<i64>> {
        self.smith_points()
            .iter()
            .map(|y| {
                self.quotient_map
                    .iter()
                    .map(|row| row.iter().zip(y).map(|(&a, &b)| a * b as i64).sum())
                    .collect()
            })
            .collect()
    }
}
