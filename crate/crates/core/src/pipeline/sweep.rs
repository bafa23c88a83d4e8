use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ExtractionConfig;
use super::extract::extract;
use crate::amplitude_estimation::EstimationMode;
use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub const SWEEP_HEADER: [&str; 9] = [
    "axis",
    "value",
    "sup_error",
    "l2_error",
    "prep_queries",
    "predicted_cost",
    "m",
    "warnings",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    N,
    EpsTotal,
    EpsPsi,
    M,
    APsi,
    Mode,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "n" => SweepAxis::N,
            "eps_total" | "eps-total" => SweepAxis::EpsTotal,
            "eps_psi" | "eps-psi" => SweepAxis::EpsPsi,
            "M" | "m" | "cheb-m" => SweepAxis::M,
            "a_psi" | "a-psi" => SweepAxis::APsi,
            "mode" => SweepAxis::Mode,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep axis '{other}', expected n, eps_total, eps_psi, M, a_psi or mode"
                )))
            }
        })
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::EpsTotal => "eps_total",
            SweepAxis::EpsPsi => "eps_psi",
            SweepAxis::M => "M",
            SweepAxis::APsi => "a_psi",
            SweepAxis::Mode => "mode",
        }
    }

    /// Copy of `template` with this axis set to `value`.
    pub fn apply(self, template: &ExtractionConfig, value: &str) -> Result<ExtractionConfig> {
        let mut cfg = template.clone();
        let bad = || Error::Config(format!("bad {} value '{value}'", self.name()));
        let float = || value.trim().parse::<f64>().map_err(|_| bad());
        match self {
            SweepAxis::N => cfg.n = value.trim().parse().map_err(|_| bad())?,
            SweepAxis::EpsTotal => cfg.eps_total = float()?,
            SweepAxis::EpsPsi => cfg.eps_psi = Some(float()?),
            SweepAxis::M => cfg.cheb_m = Some(value.trim().parse().map_err(|_| bad())?),
            SweepAxis::APsi => cfg.a_psi = float()?,
            SweepAxis::Mode => cfg.mode = EstimationMode::from_str(value.trim())?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub sup_error: Option<f64>,
    pub l2_error: Option<f64>,
    pub prep_queries: Option<u64>,
    pub predicted_cost: Option<f64>,
    pub m: Option<usize>,
    pub warnings: usize,
    pub error: Option<String>,
}

/// One extraction per value. Run `i` uses seed `derive_seed(template.seed, [i])`;
/// failed runs become rows with the error column set.
pub fn sweep(template: &ExtractionConfig, axis: SweepAxis, values: &[String]) -> Vec<SweepRow> {
    template.execution.map_indexed(values.len(), |i| {
        let value = &values[i];
        let run = axis.apply(template, value).and_then(|mut cfg| {
            cfg.seed = derive_seed(template.seed, &[i as u64]);
            extract(&cfg)
        });
        match run {
            Ok(r) => SweepRow {
                axis: axis.name().into(),
                value: value.clone(),
                sup_error: Some(r.metrics.psi.sup),
                l2_error: Some(r.metrics.psi.l2),
                prep_queries: Some(r.ledger.prep_queries),
                predicted_cost: Some(r.predicted_cost),
                m: Some(r.m),
                warnings: r.warnings.len(),
                error: None,
            },
            Err(e) => SweepRow {
                axis: axis.name().into(),
                value: value.clone(),
                sup_error: None,
                l2_error: None,
                prep_queries: None,
                predicted_cost: None,
                m: None,
                warnings: 0,
                error: Some(e.to_string()),
            },
        }
    })
}

/// Writes rows as CSV under [`SWEEP_HEADER`]; floats use 17 significant digits.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io {
        path: "<sweep csv>".into(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(io)?;
    let f = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.axis.clone(),
            r.value.clone(),
            f(r.sup_error),
            f(r.l2_error),
            r.prep_queries.map(|v| v.to_string()).unwrap_or_default(),
            f(r.predicted_cost),
            r.m.map(|v| v.to_string()).unwrap_or_default(),
            r.warnings.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<sweep csv>".into(),
        message: e.to_string(),
    })
}
