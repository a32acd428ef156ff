//! Gate-count model of the quantum circuit:
//! `log D·(d log³d + d log log D + n log n) + d·polylog d`, all logs base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiplicative constants for the four terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConstants {
    pub product_tree: f64,
    pub qft: f64,
    pub squaring: f64,
    pub state_prep: f64,
}

impl Default for CostConstants {
    fn default() -> Self {
        Self {
            product_tree: 1.0,
            qft: 1.0,
            squaring: 1.0,
            state_prep: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostTerms {
    /// `log D·d·log³d`.
    pub product_tree: f64,
    /// `log D·d·log log D`, or `log D·d·log(log D/ε)` for an explicit QFT
    /// error `ε`.
    pub qft: f64,
    /// `log D·n·log n`.
    pub squaring: f64,
    /// `d·log²d`.
    pub state_prep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCostReport {
    pub n: u64,
    pub d: u64,
    pub log2_grid: u64,
    pub epsilon_qft: Option<f64>,
    pub constants: CostConstants,
    pub terms: CostTerms,
    pub total: f64,
    /// Reference size `n²` of Shor's circuit, without log factors.
    pub shor_reference: f64,
    /// `total / (n^{3/2} log n)`.
    pub headline_ratio: f64,
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Evaluates the model at bit length `n`, dimension `d` and grid `D = 2^log2_grid`.
pub fn estimate_gate_cost(
    n: u64,
    d: u64,
    log2_grid: u64,
    constants: CostConstants,
    epsilon_qft: Option<f64>,
) -> Result<GateCostReport> {
    if n < 2 || d < 1 || log2_grid < 1 {
        return Err(Error::Parameter(format!(
            "need n ≥ 2, d ≥ 1 and D ≥ 2; got n = {n}, d = {d}, log2 D = {log2_grid}"
        )));
    }
    if let Some(eps) = epsilon_qft {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("QFT error must lie in (0, 1), got {eps}")));
        }
    }
    let (nf, df, ld) = (n as f64, d as f64, log2_grid as f64);
    let logd = log2(df);
    let qft_log = match epsilon_qft {
        Some(eps) => log2(ld / eps),
        None => log2(ld).max(0.0),
    };
    let terms = CostTerms {
        product_tree: constants.product_tree * ld * df * logd.powi(3),
        qft: constants.qft * ld * df * qft_log,
        squaring: constants.squaring * ld * nf * log2(nf),
        state_prep: constants.state_prep * df * logd.powi(2),
    };
    let total = terms.product_tree + terms.qft + terms.squaring + terms.state_prep;
    Ok(GateCostReport {
        n,
        d,
        log2_grid,
        epsilon_qft,
        constants,
        terms,
        total,
        shor_reference: nf * nf,
        headline_ratio: total / (nf.powf(1.5) * log2(nf)),
    })
}

/// Parameters of the `ε` tradeoff: `d = ⌈n^{1/2+ε}⌉`, `log₂ R = n^{1/2−ε}`
/// and `log₂ D = ⌈log₂ R + 1 + ½ log₂ d⌉`. Returns `(d, log2_grid)`.
pub fn specialize(n: u64, epsilon: f64) -> Result<(u64, u64)> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::Parameter(format!("epsilon must lie in [0, 1/2], got {epsilon}")));
    }
    if n < 2 {
        return Err(Error::Parameter("n must be at least 2".into()));
    }
    let nf = n as f64;
    let d = nf.powf(0.5 + epsilon).ceil().max(1.0);
    let log2_radius = nf.powf(0.5 - epsilon);
    let log2_grid = (log2_radius + 1.0 + 0.5 * d.log2()).ceil().max(1.0);
    Ok((d as u64, log2_grid as u64))
}

/// The model evaluated at the specialized parameters.
pub fn estimate_specialized(n: u64, epsilon: f64, constants: CostConstants) -> Result<GateCostReport> {
    let (d, log2_grid) = specialize(n, epsilon)?;
    estimate_gate_cost(n, d, log2_grid, constants, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn term_table_for_n256() {
        let r = estimate_gate_cost(256, 16, 24, CostConstants::default(), None).unwrap();
        // Direct plug-in: log₂16 = 4, log₂256 = 8.
        assert!(close(r.terms.product_tree, 24.0 * 16.0 * 64.0));
        assert!(close(r.terms.qft, 24.0 * 16.0 * 24f64.log2()));
        assert!(close(r.terms.squaring, 24.0 * 256.0 * 8.0));
        assert!(close(r.terms.state_prep, 16.0 * 16.0));
        let sum = r.terms.product_tree + r.terms.qft + r.terms.squaring + r.terms.state_prep;
        assert!(close(r.total, sum));
        assert!((r.total - 75744.6).abs() < 0.1);
        assert_eq!(r.shor_reference, 65536.0);
    }

    #[test]
    fn dimension_one_collapses_d_terms() {
        let r = estimate_gate_cost(64, 1, 10, CostConstants::default(), None).unwrap();
        assert_eq!(r.terms.product_tree, 0.0);
        assert_eq!(r.terms.state_prep, 0.0);
        assert!(r.terms.squaring > r.terms.qft);
    }

    #[test]
    fn explicit_qft_error() {
        let r = estimate_gate_cost(256, 16, 24, CostConstants::default(), Some(1.0 / 16.0)).unwrap();
        assert!(close(r.terms.qft, 24.0 * 16.0 * (24.0f64 * 16.0).log2()));
        assert!(estimate_gate_cost(256, 16, 24, CostConstants::default(), Some(0.0)).is_err());
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(estimate_gate_cost(1, 1, 1, CostConstants::default(), None).is_err());
        assert!(estimate_gate_cost(8, 0, 1, CostConstants::default(), None).is_err());
        assert!(estimate_gate_cost(8, 1, 0, CostConstants::default(), None).is_err());
    }

    #[test]
    fn specialization_examples() {
        assert_eq!(specialize(256, 0.0).unwrap(), (16, 19));
        let (d, lg) = specialize(256, 0.5).unwrap();
        assert_eq!(d, 256);
        assert_eq!(lg, 6);
        assert!(specialize(256, 0.75).is_err());
    }

    #[test]
    fn headline_shape_at_sqrt_n() {
        // Doubling n scales the total by 2^{3/2} up to the log factor.
        for n in [1u64 << 10, 1 << 12] {
            let a = estimate_specialized(n, 0.0, CostConstants::default()).unwrap();
            let b = estimate_specialized(2 * n, 0.0, CostConstants::default()).unwrap();
            let ratio = b.total / a.total;
            let reference = 2f64.powf(1.5) * ((2 * n) as f64).log2() / (n as f64).log2();
            assert!((ratio / reference - 1.0).abs() < 0.25, "n = {n}: {ratio} vs {reference}");
        }
        for k in [8u32, 12, 16] {
            let r = estimate_specialized(1 << k, 0.0, CostConstants::default()).unwrap();
            assert!(r.headline_ratio > 0.25 && r.headline_ratio < 4.0, "{}", r.headline_ratio);
        }
    }

    #[test]
    fn epsilon_sweep_shrinks_the_polynomial_part() {
        let c = CostConstants::default();
        // Moving from ε = 0 to ε = 1/4 pays off once n^{1/4} outgrows the
        // product-tree polylog.
        let n = 1u64 << 20;
        let a = estimate_specialized(n, 0.0, c).unwrap().total;
        let b = estimate_specialized(n, 0.25, c).unwrap().total;
        assert!(b < a);
        // Every row is Õ(n^{3/2−ε}): bounded by n^{3/2−ε}·log⁴n.
        for k in [12u32, 16, 20, 30, 40] {
            let nf = 2f64.powi(k as i32);
            for eps in [0.0, 0.25, 0.5] {
                let r = estimate_specialized(1 << k, eps, c).unwrap();
                let reference = nf.powf(1.5 - eps) * (k as f64).powi(4);
                assert!(r.total <= 4.0 * reference, "n = 2^{k}, ε = {eps}");
            }
        }
        // ε = 1/2 is nearly linear.
        for k in [8u32, 16] {
            let nf = 2f64.powi(k as i32);
            let r = estimate_specialized(1 << k, 0.5, c).unwrap();
            let ratio = r.total / (nf * (k as f64).powi(4));
            assert!(ratio > 0.25 && ratio < 4.0, "{ratio}");
        }
    }

    #[test]
    fn monotone_in_each_argument() {
        let c = CostConstants::default();
        let base = estimate_gate_cost(256, 16, 24, c, None).unwrap().total;
        assert!(estimate_gate_cost(257, 16, 24, c, None).unwrap().total > base);
        assert!(estimate_gate_cost(256, 17, 24, c, None).unwrap().total > base);
        assert!(estimate_gate_cost(256, 16, 25, c, None).unwrap().total > base);
    }
}
