//! The relation lattice `L = {z : ∏ a_i^{z_i} ≡ 1 (mod N)}` and its
//! sublattice `L0 = {z : ∏ b_i^{z_i} ≡ ±1 (mod N)}`.
//!
//! `L` is found by breadth-first search over the Cayley graph of the subgroup
//! `⟨a_1, …, a_d⟩ ⊆ Z_N^*`: each non-tree edge closes a cycle whose exponent
//! vector is a relation, and the modular HNF of these relations is `L`.

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{mul_mod, FactoringInstance};
use crate::error::{Error, Result};
use crate::intlat::{DualStructure, HnfBuilder, IntLattice};

/// Default cap on the order of `⟨a_1, …, a_d⟩`.
pub const DEFAULT_GROUP_CAP: usize = 1 << 22;

/// Default cap on the number of integer points scanned by ball enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationLattice {
    instance: FactoringInstance,
    lattice: IntLattice,
}

impl RelationLattice {
    pub fn instance(&self) -> &FactoringInstance {
        &self.instance
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn det(&self) -> u64 {
        self.lattice.det()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Membership decided by the homomorphism `h`, independent of the basis.
    pub fn in_l(&self, z: &[i64]) -> bool {
        z.len() == self.dim() && self.instance.h(z) == 1
    }
}

pub fn build_relation_lattice(inst: &FactoringInstance) -> Result<RelationLattice> {
    build_relation_lattice_capped(inst, DEFAULT_GROUP_CAP)
}

pub fn build_relation_lattice_capped(
    inst: &FactoringInstance,
    group_cap: usize,
) -> Result<RelationLattice> {
    let n = inst.modulus();
    let d = inst.dim();
    let gens = inst.squares();
    let identity = 1 % n;

    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut elements: Vec<u64> = vec![identity];
    let mut paths: Vec<i32> = vec![0; d];
    index.insert(identity, 0);
    let mut queue = VecDeque::from([0u32]);
    while let Some(k) = queue.pop_front() {
        let g = elements[k as usize];
        for (i, &a) in gens.iter().enumerate() {
            let next = mul_mod(g, a, n);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() >= group_cap {
                return Err(Error::Resource(format!(
                    "subgroup generated by the a_i exceeds {group_cap} elements; \
                     use a smaller modulus or dimension"
                )));
            }
            let id = elements.len() as u32;
            index.insert(next, id);
            elements.push(next);
            let start = k as usize * d;
            paths.extend_from_within(start..start + d);
            paths[id as usize * d + i] += 1;
            queue.push_back(id);
        }
    }
    let order = elements.len() as u64;

    let mut hnf = HnfBuilder::new(d, order)?;
    let mut relation = vec![0i64; d];
    'edges: for (k, &g) in elements.iter().enumerate() {
        for (i, &a) in gens.iter().enumerate() {
            if hnf.det() == order as u128 {
                break 'edges;
            }
            let target = index[&mul_mod(g, a, n)] as usize;
            for c in 0..d {
                relation[c] = paths[k * d + c] as i64 - paths[target * d + c] as i64;
            }
            relation[i] += 1;
            if relation.iter().any(|&x| x != 0) {
                hnf.insert(&relation);
            }
        }
    }
    let lattice = hnf.finish();
    if lattice.det() != order {
        return Err(Error::Internal(format!(
            "relation lattice determinant {} differs from group order {order}",
            lattice.det()
        )));
    }
    Ok(RelationLattice {
        instance: inst.clone(),
        lattice,
    })
}

fn require_in_l(rel: &RelationLattice, z: &[i64]) -> Result<()> {
    if !rel.in_l(z) {
        return Err(Error::Domain(format!("{z:?} is not in the relation lattice")));
    }
    Ok(())
}

/// Whether `z ∈ L` lies in `L0`, i.e. `∏ b_i^{z_i} ≡ ±1 (mod N)`.
pub fn in_l0(rel: &RelationLattice, z: &[i64]) -> Result<bool> {
    require_in_l(rel, z)?;
    let n = rel.instance.modulus();
    let b = rel.instance.base_product(z);
    Ok(b == 1 || b == n - 1)
}

/// `gcd(∏ b_i^{z_i} − 1, N)` for `z ∈ L \ L0`.
pub fn extract_factor(rel: &RelationLattice, z: &[i64]) -> Result<u64> {
    if in_l0(rel, z)? {
        return Err(Error::Domain(format!("{z:?} lies in L0")));
    }
    let n = rel.instance.modulus();
    let b = rel.instance.base_product(z);
    let g = (b + n - 1).gcd(&n);
    if g <= 1 || g >= n {
        return Err(Error::Internal(format!(
            "nontrivial square root {b} gave trivial divisor {g}"
        )));
    }
    Ok(g)
}

pub fn dual_cosets(rel: &RelationLattice) -> DualStructure {
    DualStructure::new(&rel.lattice)
}

/// Summary of an exhaustive scan of the ball of radius `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallScan {
    pub bound: f64,
    /// A shortest vector of `L \ L0` in the ball, lexicographically first
    /// among equal norms.
    pub witness: Option<Vec<i64>>,
    pub witness_norm: Option<f64>,
    /// Nonzero vectors of `L` in the ball.
    pub lattice_vectors: u64,
    /// How many of those lie outside `L0`.
    pub outside_l0: u64,
    /// A shortest nonzero vector of `L` in the ball.
    pub shortest: Option<Vec<i64>>,
}

/// Calls `visit(z, ‖z‖²)` on every integer vector of norm at most `bound`, in
/// lexicographic order. Errors if the bounding box exceeds `cap` points.
pub fn for_each_in_ball(
    dim: usize,
    bound: f64,
    cap: u64,
    mut visit: impl FnMut(&[i64], i64),
) -> Result<()> {
    if !(bound >= 0.0) {
        return Err(Error::Parameter(format!("bound must be non-negative, got {bound}")));
    }
    let radius = bound.floor() as i64;
    let side = 2.0 * radius as f64 + 1.0;
    let volume = side.powi(dim as i32);
    if volume > cap as f64 {
        return Err(Error::Resource(format!(
            "enumeration box of {volume:.3e} points exceeds the cap {cap}"
        )));
    }
    let limit = bound * bound;
    let mut z = vec![0i64; dim];
    fn rec(
        z: &mut Vec<i64>,
        pos: usize,
        partial: i64,
        radius: i64,
        limit: f64,
        visit: &mut dyn FnMut(&[i64], i64),
    ) {
        if pos == z.len() {
            visit(z, partial);
            return;
        }
        for x in -radius..=radius {
            let p = partial + x * x;
            if p as f64 > limit {
                continue;
            }
            z[pos] = x;
            rec(z, pos + 1, p, radius, limit, visit);
        }
        z[pos] = 0;
    }
    rec(&mut z, 0, 0, radius, limit, &mut visit);
    Ok(())
}

/// Exhaustive scan of `L` inside the ball of radius `bound`. Membership and the
/// `L0` test both go through the homomorphisms, not the basis.
pub fn scan_ball(rel: &RelationLattice, bound: f64, cap: u64) -> Result<BallScan> {
    let n = rel.instance.modulus();
    let mut scan = BallScan {
        bound,
        witness: None,
        witness_norm: None,
        lattice_vectors: 0,
        outside_l0: 0,
        shortest: None,
    };
    let mut best_witness = i64::MAX;
    let mut best_vector = i64::MAX;
    for_each_in_ball(rel.dim(), bound, cap, |z, norm2| {
        if norm2 == 0 || !rel.in_l(z) {
            return;
        }
        scan.lattice_vectors += 1;
        if norm2 < best_vector {
            best_vector = norm2;
            scan.shortest = Some(z.to_vec());
        }
        let b = rel.instance.base_product(z);
        if b != 1 && b != n - 1 {
            scan.outside_l0 += 1;
            if norm2 < best_witness {
                best_witness = norm2;
                scan.witness = Some(z.to_vec());
            }
        }
    })?;
    scan.witness_norm = scan.witness.as_ref().map(|_| (best_witness as f64).sqrt());
    Ok(scan)
}

/// A shortest vector of `L \ L0` of norm at most `bound`, if one exists.
pub fn shortest_nontrivial_witness(
    rel: &RelationLattice,
    bound: f64,
    cap: u64,
) -> Result<Option<Vec<i64>>> {
    Ok(scan_ball(rel, bound, cap)?.witness)
}
