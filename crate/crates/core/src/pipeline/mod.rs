//! Orchestration: configuration, end-to-end extraction, cost prediction,
//! parameter sweeps and self-verification.

pub mod config;
pub mod extract;
pub mod json;
pub mod sweep;
pub mod verify;

pub use config::ExtractionConfig;
pub use extract::{extract, predicted_cost, predicted_cost_for, ErrorMetrics, ErrorNorms, ExtractionReport};
pub use sweep::{sweep, write_csv, SweepAxis, SweepRow, SWEEP_HEADER};
pub use verify::{verify, SuiteResult, VerifyOptions, VerifySummary};
