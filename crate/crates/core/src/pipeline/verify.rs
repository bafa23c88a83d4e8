//! Self-check suites, run by `qextract verify`.

use serde::{Deserialize, Serialize};

use super::config::ExtractionConfig;
use crate::amplitude_estimation::{apply_grover, good_probability, grover_success_probability, EstimationMode};
use crate::chebyshev::{
    build_vandermonde, chebyshev_nodes, condition_number, make_node_set, orthonormality_defect,
    perturbation_diagnostics, BasisScale, ChebyshevInterpolant,
};
use crate::error::Result;
use crate::function_model::{normalize, sample_grid, FunctionModel, FunctionSpec};
use crate::prefix_integration::{estimate_prefix_integral, PrefixSettings};
use crate::quantum_memory::{GoodSet, QuantumMemory};

/// Fault-injection hooks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    /// Multiplies the √(2/M) basis constant in the orthonormality suite.
    pub tamper_basis_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<28} {:<6} {:>12} {:>12}  detail\n",
            "suite", "result", "measured", "threshold"
        );
        for s in &self.suites {
            out.push_str(&format!(
                "{:<28} {:<6} {:>12.3e} {:>12.3e}  {}\n",
                s.name,
                if s.passed { "PASS" } else { "FAIL" },
                s.measured,
                s.threshold,
                s.detail
            ));
        }
        out
    }
}

fn suite(name: &str, measured: f64, threshold: f64, detail: String) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed: measured <= threshold,
        measured,
        threshold,
        detail,
    }
}

fn orthonormality(opts: &VerifyOptions) -> SuiteResult {
    let worst = (1..=64)
        .map(|m| {
            let mut s = BasisScale::orthonormal(m);
            if let Some(f) = opts.tamper_basis_scale {
                s.rest *= f;
            }
            orthonormality_defect(m, &s)
        })
        .fold(0.0, f64::max);
    suite("orthonormality", worst, 1e-12, "max |VᵀV - I| over M = 1..64".into())
}

/// Exact-mode prefix estimates vs direct sums for every X at n = 8.
fn segmentation(cfg: &ExtractionConfig) -> Result<SuiteResult> {
    let n = 8;
    let mut worst = 0.0f64;
    let mut functions = vec![FunctionSpec::Constant];
    if cfg.function != FunctionSpec::Constant {
        functions.push(cfg.function.clone());
    }
    for spec in &functions {
        let f = normalize(&spec.build(cfg.lambda_k_max)?)?;
        let grid = sample_grid(&f, n)?;
        let mem = QuantumMemory::prepare(&grid, cfg.a_psi)?;
        let settings = PrefixSettings {
            eps_psi: 1e-3,
            max_psi: grid.max(),
            mode: EstimationMode::Exact,
            mlae: cfg.mlae,
        };
        for x in 0..=(1usize << n) {
            let est = estimate_prefix_integral(&mem, x, &settings, 0)?;
            worst = worst.max((est.psi_hat_value - grid.prefix_mass(x)).abs());
        }
    }
    Ok(suite(
        "segmentation-n8",
        worst,
        1e-13,
        format!("257 cuts x {} functions", functions.len()),
    ))
}

fn grover_subspace() -> Result<SuiteResult> {
    let f = FunctionModel::cosine_bump(0.5)?;
    let grid = sample_grid(&f, 6)?;
    let mut worst = 0.0f64;
    for a_psi in [1.0, 0.6] {
        let mem = QuantumMemory::prepare(&grid, a_psi)?;
        for (w, p) in [(0usize, 5u32), (32, 3), (5, 0), (16, 4)] {
            let g = GoodSet::new(w, p);
            let q = mem.prefix_probability(&g)?.sqrt();
            for reps in [0u64, 1, 3, 8] {
                let v = apply_grover(&mem, &g, reps)?;
                let diff = (good_probability(&mem, &v, &g)? - grover_success_probability(q, reps)).abs();
                worst = worst.max(diff);
            }
        }
    }
    Ok(suite(
        "grover-subspace",
        worst,
        1e-10,
        "statevector vs sin²((2m+1)θ)".into(),
    ))
}

fn derivative_check() -> Result<SuiteResult> {
    let nodes = chebyshev_nodes(14);
    let f: Vec<f64> = nodes
        .iter()
        .map(|x| (x + 1.0) / 2.0 + 0.5 * (std::f64::consts::PI * x).sin() / (2.0 * std::f64::consts::PI))
        .collect();
    let p = ChebyshevInterpolant::fit(&nodes, &f)?;
    let d = p.differentiate();
    let h = 1e-4;
    let worst = (0..50)
        .map(|i| -0.98 + 1.96 * i as f64 / 49.0)
        .map(|x| (d.eval(x) - (p.eval(x + h) - p.eval(x - h)) / (2.0 * h)).abs())
        .fold(0.0, f64::max);
    Ok(suite(
        "derivative-fd",
        worst,
        1e-6,
        "P' vs central difference, h = 1e-4".into(),
    ))
}

fn conditioning() -> Result<Vec<SuiteResult>> {
    let exact = (2..=32)
        .map(|m| (condition_number(&build_vandermonde(&chebyshev_nodes(m), m)) - 1.0).abs())
        .fold(0.0, f64::max);
    let d = perturbation_diagnostics(&make_node_set(16, 12)?);
    Ok(vec![
        suite("condition-exact", exact, 1e-10, "|κ(V) - 1|, M = 2..32".into()),
        suite(
            "condition-perturbed",
            d.condition_perturbed,
            1.5,
            "κ(V_pert), M = 16, n = 12".into(),
        ),
        suite(
            "perturbation-norm",
            d.norm_diff,
            10.0 * d.scale_bound,
            "‖V - V_pert‖₂ vs 10·M^{5/2}/2ⁿ".into(),
        ),
    ])
}

pub fn verify(cfg: &ExtractionConfig, opts: &VerifyOptions) -> Result<VerifySummary> {
    let mut suites = vec![
        orthonormality(opts),
        segmentation(cfg)?,
        grover_subspace()?,
        derivative_check()?,
    ];
    suites.extend(conditioning()?);
    Ok(VerifySummary { suites })
}
