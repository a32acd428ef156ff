//! Modular arithmetic on word-sized moduli, prime utilities, and the
//! instrumented exponentiation schedule of the quantum circuit.
//!
//! Moduli are limited to 62 bits. Products are formed in `u128`, so every
//! operation here is exact.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported bit-length of a modulus.
pub const MAX_MODULUS_BITS: u32 = 62;

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, n);
        }
        b = mul_mod(b, b, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i128) as u64)
}

/// `∏ values[i]^exps[i] mod n` for signed exponents. Returns `None` when a
/// negative exponent hits a value that is not invertible.
pub fn signed_power_product(values: &[u64], exps: &[i64], n: u64) -> Option<u64> {
    let mut acc = 1 % n;
    for (&v, &e) in values.iter().zip(exps) {
        let base = if e < 0 { inv_mod(v, n)? } else { v % n };
        acc = mul_mod(acc, pow_mod(base, e.unsigned_abs(), n), n);
    }
    Some(acc)
}

/// Number of bits of `n` (0 for 0).
pub fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// If `n = c^k` for some `k ≥ 2`, the smallest such base `c` and its exponent.
pub fn perfect_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    (2..=bit_length(n)).rev().find_map(|k| {
        let root = n.nth_root(k);
        (root >= 2 && root.checked_pow(k) == Some(n)).then_some((root, k))
    })
}

/// Outcome of the classical screening that runs before any lattice work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Precheck {
    /// Odd, composite and not a perfect power.
    Proceed,
    /// `N` is even; 2 is a factor.
    Even,
    /// `N = root^exponent`.
    PerfectPower { root: u64, exponent: u32 },
    Prime,
}

impl Precheck {
    /// The nontrivial factor this screening found, if any.
    pub fn factor(&self) -> Option<u64> {
        match *self {
            Precheck::Even => Some(2),
            Precheck::PerfectPower { root, .. } => Some(root),
            _ => None,
        }
    }
}

pub fn precheck(n: u64) -> Precheck {
    if n % 2 == 0 {
        if n == 2 {
            return Precheck::Prime;
        }
        return Precheck::Even;
    }
    if let Some((root, exponent)) = perfect_power(n) {
        return Precheck::PerfectPower { root, exponent };
    }
    if is_prime(n) {
        Precheck::Prime
    } else {
        Precheck::Proceed
    }
}

/// The first `count` primes, in order.
pub fn nth_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k ≥ 6.
    let k = count.max(6) as f64;
    let limit = (k * (k.ln() + k.ln().ln())).ceil() as usize + 1;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(count);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == count {
            break;
        }
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// A modulus together with the small bases `b_i` and their squares `a_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoringInstance {
    modulus: u64,
    bits: u32,
    bases: Vec<u64>,
    squares: Vec<u64>,
}

impl FactoringInstance {
    /// Instance with `b_i` the `i`-th prime.
    pub fn new(modulus: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        Self::with_bases(modulus, nth_primes(dim))
    }

    /// Instance with caller-chosen bases.
    pub fn with_bases(modulus: u64, bases: Vec<u64>) -> Result<Self> {
        if modulus < 15 || modulus % 2 == 0 {
            return Err(Error::Parameter(format!(
                "modulus must be odd and at least 15, got {modulus}"
            )));
        }
        let bits = bit_length(modulus);
        if bits > MAX_MODULUS_BITS {
            return Err(Error::Parameter(format!(
                "modulus exceeds {MAX_MODULUS_BITS} bits"
            )));
        }
        if let Some((root, _)) = perfect_power(modulus) {
            return Err(Error::Parameter(format!(
                "modulus {modulus} is a perfect power of {root}"
            )));
        }
        if bases.is_empty() {
            return Err(Error::Parameter("at least one base is required".into()));
        }
        for (i, &b) in bases.iter().enumerate() {
            if b == 0 {
                return Err(Error::Parameter("bases must be positive".into()));
            }
            if bases[..i].contains(&b) {
                return Err(Error::Parameter(format!("base {b} repeated")));
            }
            let g = b.gcd(&modulus);
            if g == modulus {
                return Err(Error::Parameter(format!(
                    "base {b} is divisible by the modulus"
                )));
            }
            if g > 1 {
                return Err(Error::BaseSharesFactor { base: b, factor: g });
            }
        }
        let squares = bases.iter().map(|&b| mul_mod(b, b, modulus)).collect();
        Ok(Self {
            modulus,
            bits,
            bases,
            squares,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Bit-length `n` of the modulus.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    /// `a_i = b_i^2 mod N`.
    pub fn squares(&self) -> &[u64] {
        &self.squares
    }

    /// `h(z) = ∏ a_i^{z_i} mod N` for signed `z`.
    pub fn h(&self, z: &[i64]) -> u64 {
        signed_power_product(&self.squares, z, self.modulus)
            .expect("bases are coprime to the modulus")
    }

    /// `∏ b_i^{z_i} mod N` for signed `z`.
    pub fn base_product(&self, z: &[i64]) -> u64 {
        signed_power_product(&self.bases, z, self.modulus)
            .expect("bases are coprime to the modulus")
    }
}

/// Operation counts for one exponentiation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    /// Squarings of the n-bit accumulator.
    pub squarings_nbit: u64,
    /// Multiplications inside the product tree.
    pub small_products: u64,
    /// General n-bit modular multiplications (accumulator times subset product).
    pub nbit_products: u64,
    /// Reductions of product-tree intermediates that outgrew n bits.
    pub tree_reductions: u64,
}

/// Product of `leaves` by a balanced binary tree. Intermediates are reduced
/// modulo `modulus` only once they exceed `bits` bits.
fn subset_product(mut level: Vec<u128>, modulus: u64, bits: u32, counter: &mut OpCounter) -> u64 {
    let bound = 1u128 << bits;
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match *pair {
                [x, y] => {
                    counter.small_products += 1;
                    let mut p = x * y;
                    if p >= bound {
                        counter.tree_reductions += 1;
                        p %= modulus as u128;
                    }
                    p
                }
                [x] => x,
                _ => unreachable!(),
            })
            .collect();
    }
    (level[0] % modulus as u128) as u64
}

/// `∏ a_i^{z_i} mod N` computed with the squaring schedule of the circuit:
/// for each exponent bit from the most significant down, square the
/// accumulator, then multiply in the product-tree product of the `a_i` whose
/// exponent has that bit set.
///
/// The accumulator is squared once per bit of `grid - 1`, including the first
/// (trivial) squaring of 1.
pub fn product_tree_exponentiation(
    inst: &FactoringInstance,
    z: &[u64],
    grid: u64,
    counter: &mut OpCounter,
) -> Result<u64> {
    if grid < 2 {
        return Err(Error::Parameter(format!("grid must be at least 2, got {grid}")));
    }
    if z.len() != inst.dim() {
        return Err(Error::Parameter(format!(
            "exponent vector has length {}, expected {}",
            z.len(),
            inst.dim()
        )));
    }
    if let Some(&bad) = z.iter().find(|&&e| e >= grid) {
        return Err(Error::Parameter(format!(
            "exponent {bad} is not below the grid size {grid}"
        )));
    }
    let n = inst.modulus();
    let bits = bit_length(grid - 1);
    let mut acc = 1 % n;
    for j in (0..bits).rev() {
        acc = mul_mod(acc, acc, n);
        counter.squarings_nbit += 1;
        let leaves: Vec<u128> = inst
            .squares()
            .iter()
            .zip(z)
            .filter(|&(_, &e)| (e >> j) & 1 == 1)
            .map(|(&a, _)| a as u128)
            .collect();
        if !leaves.is_empty() {
            let p = subset_product(leaves, n, inst.bits(), counter);
            acc = mul_mod(acc, p, n);
            counter.nbit_products += 1;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(n: u64) -> Option<u64> {
        (2..n).take_while(|p| p * p <= n).find(|p| n % p == 0)
    }

    fn naive(inst: &FactoringInstance, z: &[u64]) -> u64 {
        let n = inst.modulus();
        let mut acc = 1 % n;
        for (&a, &e) in inst.squares().iter().zip(z) {
            for _ in 0..e {
                acc = acc * a % n;
            }
        }
        acc
    }

    #[test]
    fn precheck_examples() {
        assert_eq!(precheck(16), Precheck::Even);
        assert_eq!(precheck(16).factor(), Some(2));
        assert_eq!(
            precheck(27),
            Precheck::PerfectPower {
                root: 3,
                exponent: 3
            }
        );
        assert_eq!(trial_division(77), Some(7));
        assert_eq!(precheck(77), Precheck::Proceed);
        assert_eq!(precheck(97), Precheck::Prime);
        assert_eq!(precheck(2), Precheck::Prime);
        assert_eq!(precheck(3 * 3 * 5), Precheck::Proceed);
        assert_eq!(perfect_power(729), Some((3, 6)));
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        for n in 2..5000u64 {
            assert_eq!(is_prime(n), trial_division(n).is_none(), "n = {n}");
        }
        assert!(is_prime(4_611_686_018_427_387_847));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn first_primes() {
        assert_eq!(nth_primes(1), vec![2]);
        assert_eq!(nth_primes(5), vec![2, 3, 5, 7, 11]);
        let sieve: Vec<u64> = (2..200).filter(|&n| trial_division(n).is_none()).collect();
        assert_eq!(nth_primes(25)[24], sieve[24]);
        assert_eq!(nth_primes(25)[24], 97);
        assert_eq!(nth_primes(40), sieve[..40].to_vec());
    }

    #[test]
    fn instance_validation() {
        let inst = FactoringInstance::new(77, 2).unwrap();
        assert_eq!(inst.squares(), &[4, 9]);
        assert_eq!(inst.bits(), 7);
        assert!(matches!(FactoringInstance::new(27, 1), Err(Error::Parameter(_))));
        assert!(matches!(FactoringInstance::new(16, 1), Err(Error::Parameter(_))));
        assert_eq!(
            FactoringInstance::new(15, 2),
            Err(Error::BaseSharesFactor { base: 3, factor: 3 })
        );
        assert!(FactoringInstance::with_bases(15, vec![2, 2]).is_err());
        assert!(FactoringInstance::with_bases(15, vec![1]).is_ok());
    }

    #[test]
    fn exponentiation_examples() {
        let inst = FactoringInstance::new(77, 2).unwrap();
        let mut c = OpCounter::default();
        assert_eq!(product_tree_exponentiation(&inst, &[1, 1], 8, &mut c).unwrap(), 36);
        assert_eq!(4 * 9 % 77, 36);
        let mut c = OpCounter::default();
        assert_eq!(product_tree_exponentiation(&inst, &[0, 0], 8, &mut c).unwrap(), 1);
        let inst = FactoringInstance::new(15, 1).unwrap();
        let mut c = OpCounter::default();
        assert_eq!(product_tree_exponentiation(&inst, &[3], 8, &mut c).unwrap(), 4);
        assert_eq!(pow_mod(4, 3, 15), 4);
        assert_eq!(c.squarings_nbit, 3);
        assert!(product_tree_exponentiation(&inst, &[8], 8, &mut c).is_err());
    }

    #[test]
    fn squaring_count_is_independent_of_dimension() {
        for d in [1usize, 3, 8] {
            let inst = FactoringInstance::new(1_000_003 * 1_000_033, d).unwrap();
            for grid in [2u64, 3, 8, 9, 1 << 12, 1000] {
                let mut c = OpCounter::default();
                let z = vec![grid - 1; d];
                product_tree_exponentiation(&inst, &z, grid, &mut c).unwrap();
                assert_eq!(c.squarings_nbit, bit_length(grid - 1) as u64);
            }
        }
    }

    #[test]
    fn signed_products_use_inverses() {
        // 2^{-2} ≡ 4 (mod 15).
        assert_eq!(signed_power_product(&[2], &[-2], 15), Some(4));
        assert_eq!(signed_power_product(&[3], &[-1], 15), None);
        assert_eq!(inv_mod(2, 15), Some(8));
    }

    proptest! {
        #[test]
        fn tree_schedule_matches_naive(
            n in (15u64..100_000).prop_filter("odd non-power", |n| n % 2 == 1 && perfect_power(*n).is_none()),
            d in 1usize..6,
            seed in any::<u64>(),
        ) {
            let Ok(inst) = FactoringInstance::new(n, d) else { return Ok(()); };
            let grid = 64u64;
            let z: Vec<u64> = (0..d as u64).map(|i| crate::rng::stream_id(&[seed, i]) % grid).collect();
            let mut c = OpCounter::default();
            let got = product_tree_exponentiation(&inst, &z, grid, &mut c).unwrap();
            prop_assert_eq!(got, naive(&inst, &z));
        }

        #[test]
        fn h_is_a_homomorphism(
            x in proptest::collection::vec(-50i64..50, 3),
            y in proptest::collection::vec(-50i64..50, 3),
        ) {
            let inst = FactoringInstance::new(1147, 3).unwrap();
            let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert_eq!(inst.h(&sum), mul_mod(inst.h(&x), inst.h(&y), 1147));
        }
    }
}
