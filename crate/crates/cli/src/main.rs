use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qextract::amplitude_estimation::EstimationMode;
use qextract::function_model::FunctionSpec;
use qextract::pipeline::config::default_eps_psi;
use qextract::pipeline::json::to_json_string;
use qextract::pipeline::{
    extract, predicted_cost_for, sweep, verify, write_csv, ExtractionConfig, SweepAxis, VerifyOptions,
};
use qextract::{Error, Execution};
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qextract",
    version,
    about = "Extract a function from simulated amplitude-encoded quantum memory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one extraction and write a JSON report.
    Extract(Common),
    /// Run one extraction per value of a parameter and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// n, eps_total, eps_psi, M, a_psi or mode.
        #[arg(long)]
        axis: String,
        /// Comma-separated values for the axis.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Run the invariant suites and print a pass/fail table.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        tamper_basis_scale: Option<f64>,
    },
    /// Print the predicted query cost without running.
    Predict(Common),
}

#[derive(Args)]
struct Common {
    /// constant, cosine-bump[:a], gaussian[:alpha], expr:<expression> or file:<path>.
    #[arg(long, default_value = "cosine-bump")]
    function: String,
    #[arg(long = "qubits", short = 'n', default_value_t = 12)]
    qubits: u32,
    #[arg(long, default_value_t = 1.0)]
    a_psi: f64,
    #[arg(long, default_value_t = 0.05)]
    eps_total: f64,
    /// Prefix-integral precision; derived from eps_total when omitted.
    #[arg(long)]
    eps_psi: Option<f64>,
    /// Chebyshev truncation target; defaults to eps_total.
    #[arg(long)]
    eps_cheb: Option<f64>,
    #[arg(long, default_value = "exact", value_parser = ["exact", "noisy", "grover-ml"])]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of Chebyshev nodes; chosen from Λ when omitted.
    #[arg(long)]
    cheb_m: Option<usize>,
    /// Derivative-growth bound Λ; estimated when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExtractionConfig, Error> {
        let cfg = ExtractionConfig {
            function: FunctionSpec::parse(&self.function)?,
            n: self.qubits,
            a_psi: self.a_psi,
            eps_total: self.eps_total,
            eps_psi: self.eps_psi,
            eps_cheb: self.eps_cheb,
            mode: self.mode.parse::<EstimationMode>()?,
            seed: self.seed,
            cheb_m: self.cheb_m,
            lambda: self.lambda,
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Prediction {
    function: String,
    n: u32,
    a_psi: f64,
    eps_total: f64,
    lambda: f64,
    min_psi: f64,
    max_psi: f64,
    m: usize,
    eps_psi: f64,
    predicted_cost: f64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Config(_) | Error::Syntax { .. } | Error::Io { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let result = match out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).and_then(|_| lock.flush())
        }
    };
    result.map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: format!("writing output: {e}"),
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Extract(common) => {
            let cfg = common.config()?;
            let report = extract(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(common.out.as_deref(), |w| w.write_all(report.to_json().as_bytes()))?;
        }
        Command::Sweep { common, axis, values } => {
            let cfg = common.config()?;
            let axis: SweepAxis = axis.parse()?;
            let rows = sweep(&cfg, axis, &values);
            for r in &rows {
                if let Some(e) = &r.error {
                    eprintln!("warning: {} = {}: {e}", r.axis, r.value);
                }
            }
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(common.out.as_deref(), |w| w.write_all(&buf))?;
        }
        Command::Verify {
            common,
            tamper_basis_scale,
        } => {
            let cfg = common.config()?;
            let summary = verify(&cfg, &VerifyOptions { tamper_basis_scale })?;
            match &common.out {
                Some(path) => {
                    print!("{}", summary.table());
                    emit(Some(path), |w| w.write_all(to_json_string(&summary).as_bytes()))?;
                }
                None => emit(None, |w| w.write_all(summary.table().as_bytes()))?,
            }
            if !summary.passed() {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Predict(common) => {
            let cfg = common.config()?;
            let (model, cost) = predicted_cost_for(&cfg)?;
            let m = cfg
                .cheb_m
                .unwrap_or_else(|| qextract::chebyshev::choose_m(model.lambda, cfg.effective_eps_cheb()));
            let p = Prediction {
                function: cfg.function.to_string(),
                n: cfg.n,
                a_psi: cfg.a_psi,
                eps_total: cfg.eps_total,
                lambda: model.lambda,
                min_psi: model.min_psi,
                max_psi: model.max_psi,
                m,
                eps_psi: cfg
                    .eps_psi
                    .unwrap_or_else(|| default_eps_psi(cfg.eps_total, model.min_psi, m)),
                predicted_cost: cost,
            };
            emit(common.out.as_deref(), |w| w.write_all(to_json_string(&p).as_bytes()))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
