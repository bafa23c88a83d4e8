use serde::{Deserialize, Serialize};

use crate::amplitude_estimation::{EstimationMode, MlaeConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::function_model::FunctionSpec;

pub const MIN_QUBITS: u32 = 4;
pub const DEFAULT_EVAL_POINTS: usize = 2048;
pub const DEFAULT_LAMBDA_K_MAX: u32 = 6;

/// Everything one extraction run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub function: FunctionSpec,
    pub n: u32,
    pub a_psi: f64,
    pub eps_total: f64,
    /// Target error on each Ψ sample; defaults to eps_total·min ψ/(10·M²).
    pub eps_psi: Option<f64>,
    /// Chebyshev truncation target; defaults to eps_total.
    pub eps_cheb: Option<f64>,
    pub mode: EstimationMode,
    pub seed: u64,
    /// Interpolation order override.
    pub cheb_m: Option<usize>,
    /// User-supplied Λ; estimated by finite differences otherwise.
    pub lambda: Option<f64>,
    pub lambda_k_max: u32,
    pub mlae: MlaeConfig,
    pub eval_points: usize,
    /// Not part of the report: results do not depend on it.
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            function: FunctionSpec::CosineBump(FunctionSpec::DEFAULT_BUMP),
            n: 12,
            a_psi: 1.0,
            eps_total: 0.05,
            eps_psi: None,
            eps_cheb: None,
            mode: EstimationMode::Exact,
            seed: 0,
            cheb_m: None,
            lambda: None,
            lambda_k_max: DEFAULT_LAMBDA_K_MAX,
            mlae: MlaeConfig::default(),
            eval_points: DEFAULT_EVAL_POINTS,
            execution: Execution::default(),
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        let max_n = crate::function_model::MAX_QUBITS;
        if !(MIN_QUBITS..=max_n).contains(&self.n) {
            return Err(Error::Config(format!("n = {} outside [{MIN_QUBITS}, {max_n}]", self.n)));
        }
        if !(self.a_psi > 0.0 && self.a_psi <= 1.0) {
            return Err(Error::Config(format!("a_psi = {} outside (0, 1]", self.a_psi)));
        }
        if !(self.eps_total > 0.0 && self.eps_total.is_finite()) {
            return Err(Error::Config(format!(
                "eps_total = {} must be positive",
                self.eps_total
            )));
        }
        if let Some(e) = self.eps_psi {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("eps_psi = {e} must be positive")));
            }
        }
        if let Some(e) = self.eps_cheb {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config(format!("eps_cheb = {e} outside (0, 1)")));
            }
        }
        if let Some(m) = self.cheb_m {
            if m < 2 {
                return Err(Error::Config(format!("M = {m}, need at least 2")));
            }
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("lambda = {l} must be non-negative")));
            }
        }
        if self.lambda_k_max > 8 {
            return Err(Error::Config(format!("lambda_k_max = {} > 8", self.lambda_k_max)));
        }
        if self.mlae.shots_per_power == 0 {
            return Err(Error::Config("shots per Grover power must be positive".into()));
        }
        if self.eval_points < 2 {
            return Err(Error::Config("need at least 2 evaluation points".into()));
        }
        Ok(())
    }

    /// Chebyshev truncation target actually used.
    pub fn effective_eps_cheb(&self) -> f64 {
        self.eps_cheb.unwrap_or(self.eps_total.min(0.5))
    }
}

/// Default Ψ sample precision eps_total·min ψ/(10·M²).
pub fn default_eps_psi(eps_total: f64, min_psi: f64, m: usize) -> f64 {
    eps_total * min_psi / (10.0 * (m * m) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExtractionConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_values_rejected() {
        let base = ExtractionConfig::default();
        for cfg in [
            ExtractionConfig { n: 3, ..base.clone() },
            ExtractionConfig { n: 25, ..base.clone() },
            ExtractionConfig {
                a_psi: 0.0,
                ..base.clone()
            },
            ExtractionConfig {
                a_psi: 1.1,
                ..base.clone()
            },
            ExtractionConfig {
                eps_total: 0.0,
                ..base.clone()
            },
            ExtractionConfig {
                eps_psi: Some(-1.0),
                ..base.clone()
            },
            ExtractionConfig {
                eps_cheb: Some(1.0),
                ..base.clone()
            },
            ExtractionConfig {
                cheb_m: Some(1),
                ..base.clone()
            },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn eps_psi_default_formula() {
        assert!((default_eps_psi(0.05, 0.5, 10) - 2.5e-5).abs() < 1e-18);
    }
}
