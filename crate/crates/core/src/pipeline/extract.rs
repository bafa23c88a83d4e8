//! End-to-end extraction: ψ → memory → prefix integrals at snapped
//! Chebyshev nodes → interpolant → derivative → square root, scored against
//! the classical oracles.

use serde::{Deserialize, Serialize};

use super::config::{default_eps_psi, ExtractionConfig};
use crate::amplitude_estimation::QueryLedger;
use crate::chebyshev::{
    choose_m, make_node_set, perturbation_diagnostics, sqrt_recover, ChebyshevInterpolant, NodeSet,
    PerturbationDiagnostics,
};
use crate::error::{Error, Result, StageExt};
use crate::function_model::{normalize, sample_grid, FunctionModel, LambdaSource, Provenance};
use crate::numeric::linspace;
use crate::prefix_integration::{estimate_prefix_integral, PrefixEstimate, PrefixSettings};
use crate::quantum_memory::QuantumMemory;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSummary {
    pub name: String,
    pub provenance: Provenance,
    pub scale: f64,
    pub lambda: f64,
    pub lambda_source: LambdaSource,
    pub min_psi: f64,
    pub max_psi: f64,
    /// 𝒩 = Σ_j ψ(x_j)² over the sampled grid.
    pub grid_norm_sq: f64,
    pub grid_max_psi: f64,
}

/// Sup and root-mean-square (discrete L2) error over the evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub sup: f64,
    pub l2: f64,
}

impl ErrorNorms {
    pub fn from_errors(errors: impl IntoIterator<Item = f64>) -> Self {
        let (mut sup, mut sq, mut count) = (0.0f64, 0.0f64, 0usize);
        for e in errors {
            sup = sup.max(e.abs());
            sq += e * e;
            count += 1;
        }
        ErrorNorms {
            sup,
            l2: if count == 0 { 0.0 } else { (sq / count as f64).sqrt() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// ψ̃ vs ψ.
    pub psi: ErrorNorms,
    /// ψ̃² (derivative of the interpolant) vs ψ².
    pub psi_sq: ErrorNorms,
    /// Interpolant vs Ψ.
    pub integral: ErrorNorms,
    pub eval_points: usize,
    /// Evaluation covers [-1 + guard_band, 1 - guard_band].
    pub guard_band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub config: ExtractionConfig,
    pub function: FunctionSummary,
    pub m: usize,
    pub eps_cheb: f64,
    pub eps_psi: f64,
    pub nodes: NodeSet,
    pub perturbation: PerturbationDiagnostics,
    pub prefix_estimates: Vec<PrefixEstimate>,
    pub coefficients: Vec<f64>,
    pub condition: f64,
    pub metrics: ErrorMetrics,
    pub ledger: QueryLedger,
    pub predicted_cost: f64,
    /// ledger.prep_queries / predicted_cost.
    pub cost_ratio: f64,
    pub warnings: Vec<String>,
}

impl ExtractionReport {
    pub fn to_json(&self) -> String {
        super::json::to_json_string(self)
    }
}

/// (1/a_ψ)·Λ²·n²·max ψ/(ε_total·min ψ), the cost bound with unit constant.
pub fn predicted_cost(a_psi: f64, lambda: f64, n: u32, eps_total: f64, min_psi: f64, max_psi: f64) -> f64 {
    let n = n as f64;
    lambda * lambda * n * n * max_psi / (a_psi * eps_total * min_psi)
}

/// Cost bound for a config; builds and normalizes the function to get Λ and
/// the extrema.
pub fn predicted_cost_for(cfg: &ExtractionConfig) -> Result<(FunctionModel, f64)> {
    cfg.validate()?;
    let model = build_model(cfg)?;
    let cost = predicted_cost(
        cfg.a_psi,
        model.lambda,
        cfg.n,
        cfg.eps_total,
        model.min_psi,
        model.max_psi,
    );
    Ok((model, cost))
}

fn build_model(cfg: &ExtractionConfig) -> Result<FunctionModel> {
    let mut model = cfg.function.build(cfg.lambda_k_max).stage("function-model")?;
    if let Some(l) = cfg.lambda {
        model = model.with_lambda(l).stage("function-model")?;
    }
    normalize(&model).stage("normalize")
}

pub fn extract(cfg: &ExtractionConfig) -> Result<ExtractionReport> {
    cfg.validate()?;
    let model = build_model(cfg)?;
    if !model.lambda.is_finite() {
        return Err(Error::Config("no derivative bound available; pass --lambda".into()).in_stage("function-model"));
    }
    let grid = sample_grid(&model, cfg.n).stage("sample-grid")?;
    let mem = QuantumMemory::prepare(&grid, cfg.a_psi).stage("prepare")?;

    let eps_cheb = cfg.effective_eps_cheb();
    let m = cfg.cheb_m.unwrap_or_else(|| choose_m(model.lambda, eps_cheb));
    let nodes = make_node_set(m, cfg.n).stage("node-set")?;
    let eps_psi = cfg
        .eps_psi
        .unwrap_or_else(|| default_eps_psi(cfg.eps_total, model.min_psi, m));

    let settings = PrefixSettings {
        eps_psi,
        max_psi: grid.max(),
        mode: cfg.mode,
        mlae: cfg.mlae,
    };
    let prefix_estimates: Vec<PrefixEstimate> = cfg
        .execution
        .map_indexed(m, |k| {
            estimate_prefix_integral(
                &mem,
                nodes.mock_indices[k],
                &settings,
                derive_seed(cfg.seed, &[k as u64]),
            )
        })
        .into_iter()
        .collect::<Result<_>>()
        .stage("prefix-integration")?;

    let samples: Vec<f64> = prefix_estimates.iter().map(|e| e.psi_hat_value).collect();
    let interp = ChebyshevInterpolant::fit_mock(&nodes, &samples).stage("solve-coefficients")?;
    let derivative = interp.differentiate();
    let recovered = sqrt_recover(|x| derivative.eval(x), 0.0);

    let guard_band = 2.0 / (1u64 << cfg.n) as f64;
    let xs = linspace(-1.0 + guard_band, 1.0 - guard_band, cfg.eval_points);
    let oracle = model.integral_oracle_many(&xs).stage("oracle")?;
    let metrics = ErrorMetrics {
        psi: ErrorNorms::from_errors(xs.iter().map(|&x| recovered.eval(x) - model.eval(x))),
        psi_sq: ErrorNorms::from_errors(xs.iter().map(|&x| derivative.eval(x) - model.eval(x).powi(2))),
        integral: ErrorNorms::from_errors(xs.iter().zip(&oracle).map(|(&x, o)| interp.eval(x) - o)),
        eval_points: cfg.eval_points,
        guard_band,
    };

    let mut warnings: Vec<String> = Vec::new();
    for w in prefix_estimates.iter().flat_map(|e| &e.warnings) {
        if !warnings.contains(w) {
            warnings.push(w.clone());
        }
    }
    if let Some(dip) = recovered.scan(&xs) {
        warnings.push(dip.warning());
    }
    if metrics.psi_sq.sup > model.min_psi.powi(2) {
        warnings.push(format!(
            "ψ² error {:.3e} exceeds min ψ² = {:.3e}; the square-root error bound does not apply",
            metrics.psi_sq.sup,
            model.min_psi.powi(2)
        ));
    }

    let ledger: QueryLedger = prefix_estimates.iter().map(|e| e.ledger).sum();
    let predicted = predicted_cost(
        cfg.a_psi,
        model.lambda,
        cfg.n,
        cfg.eps_total,
        model.min_psi,
        model.max_psi,
    );
    Ok(ExtractionReport {
        config: cfg.clone(),
        function: FunctionSummary {
            name: model.name.clone(),
            provenance: model.provenance,
            scale: model.scale,
            lambda: model.lambda,
            lambda_source: model.lambda_source,
            min_psi: model.min_psi,
            max_psi: model.max_psi,
            grid_norm_sq: grid.norm_sq,
            grid_max_psi: grid.max(),
        },
        m,
        eps_cheb,
        eps_psi,
        perturbation: perturbation_diagnostics(&nodes),
        nodes,
        prefix_estimates,
        coefficients: interp.coeffs.clone(),
        condition: interp.condition,
        metrics,
        ledger,
        predicted_cost: predicted,
        cost_ratio: ledger.prep_queries as f64 / predicted,
        warnings,
    })
}
