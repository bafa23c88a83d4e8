//! Prefix integrals Ψ(x̂) from dyadic window estimates.
//!
//! The cut index X is split into its set bits p_{m-1} > … > p_0. Walking
//! them from high to low with a running offset W (starting at 0), each bit
//! contributes the window [W, W + 2ᵖ), whose amplitude is estimated as a
//! good-set event after shifting the register by W. The windows tile
//! [0, X) exactly and the squared amplitudes sum to (1/𝒩)Σ_{j<X} ψ(x_j)².

use serde::{Deserialize, Serialize};

use crate::amplitude_estimation::{estimate_amplitude, EstimationMode, MlaeConfig, QueryLedger};
use crate::error::{Error, Result};
use crate::quantum_memory::{GoodSet, QuantumMemory};
use crate::rng::derive_seed;

/// Largest per-window precision passed to the estimator.
pub const MAX_SEGMENT_EPS: f64 = 0.25;

/// Set bit positions of `x_index`, most significant first. `X = 2ⁿ` is the
/// single full-register window `[n]`.
pub fn binary_decompose(x_index: usize, n: u32) -> Result<Vec<u32>> {
    let full = 1usize << n;
    if x_index > full {
        return Err(Error::out_of_range("cut index", format!("X = {x_index} > 2^{n}")));
    }
    if x_index == full {
        return Ok(vec![n]);
    }
    Ok((0..n).rev().filter(|&p| x_index >> p & 1 == 1).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub per_segment: f64,
    /// Set when ε_Ψ ≤ n·max ψ² does not hold.
    pub warning: Option<String>,
}

/// Per-window amplitude precision ε_Ψ/(n·max ψ) for a total Ψ error ε_Ψ.
pub fn prefix_error_budget(eps_psi: f64, n: u32, max_psi: f64) -> ErrorBudget {
    let per_segment = eps_psi / (n as f64 * max_psi);
    let limit = n as f64 * max_psi * max_psi;
    let warning = (eps_psi > limit).then(|| {
        format!(
            "eps_psi = {eps_psi} exceeds n·max ψ² = {limit}; the per-window error budget is outside its validity range"
        )
    });
    ErrorBudget { per_segment, warning }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub p: u32,
    pub w: usize,
    /// Estimated raw amplitude (includes the a_ψ factor).
    pub q_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixEstimate {
    pub x_index: usize,
    pub x_hat: f64,
    pub psi_hat_value: f64,
    pub segments: Vec<Segment>,
    pub eps_psi_target: f64,
    /// Precision requested from the estimator for each window amplitude.
    pub eps_segment: f64,
    pub ledger: QueryLedger,
    pub warnings: Vec<String>,
}

/// Settings shared by every prefix estimate of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixSettings {
    pub eps_psi: f64,
    /// max ψ over the sampled grid.
    pub max_psi: f64,
    pub mode: EstimationMode,
    pub mlae: MlaeConfig,
}

/// Estimates Ψ(x̂) for x̂ = 2X/2ⁿ - 1. Window `i` draws from the seed stream
/// `derive_seed(seed, [i])`.
pub fn estimate_prefix_integral(
    mem: &QuantumMemory,
    x_index: usize,
    settings: &PrefixSettings,
    seed: u64,
) -> Result<PrefixEstimate> {
    if settings.eps_psi.is_nan() || settings.eps_psi <= 0.0 {
        return Err(Error::out_of_range("eps_psi", format!("{}", settings.eps_psi)));
    }
    let n = mem.n();
    let bits = binary_decompose(x_index, n)?;
    let budget = prefix_error_budget(settings.eps_psi, n, settings.max_psi);
    let mut warnings: Vec<String> = budget.warning.into_iter().collect();
    // The estimator sees a_ψ·q, so recovering q to ε needs a_ψ·ε on the raw
    // amplitude.
    let a_psi = mem.a_psi();
    let mut eps_raw = budget.per_segment * a_psi;
    if eps_raw > MAX_SEGMENT_EPS {
        warnings.push(format!(
            "per-window precision {eps_raw:.3e} clamped to {MAX_SEGMENT_EPS}"
        ));
        eps_raw = MAX_SEGMENT_EPS;
    }

    let mut w = 0usize;
    let mut segments = Vec::with_capacity(bits.len());
    let mut ledger = QueryLedger::default();
    for (i, &p) in bits.iter().enumerate() {
        let good = GoodSet::new(w, p);
        assert!(good.end() <= mem.dim(), "window [{w}, {}) overflows", good.end());
        let est = estimate_amplitude(
            mem,
            &good,
            eps_raw,
            settings.mode,
            derive_seed(seed, &[i as u64]),
            &settings.mlae,
        )?;
        ledger += est.ledger;
        segments.push(Segment { p, w, q_hat: est.q_hat });
        w += 1usize << p;
    }
    debug_assert_eq!(w, x_index);
    let psi_hat_value = segments.iter().map(|s| s.q_hat * s.q_hat).sum::<f64>() / (a_psi * a_psi);
    Ok(PrefixEstimate {
        x_index,
        x_hat: 2.0 * x_index as f64 / mem.dim() as f64 - 1.0,
        psi_hat_value,
        segments,
        eps_psi_target: settings.eps_psi,
        eps_segment: eps_raw,
        ledger,
        warnings,
    })
}
