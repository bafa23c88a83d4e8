//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;

use qextract::amplitude_estimation::{estimate_amplitude, EstimationMode, MlaeConfig};
use qextract::chebyshev::{
    build_vandermonde, chebyshev_nodes, choose_m, condition_number, make_node_set, perturbation_diagnostics,
    sqrt_recover, ChebyshevInterpolant,
};
use qextract::function_model::{grid_point, normalize, sample_grid, FunctionModel, FunctionSpec};
use qextract::pipeline::{extract, sweep, write_csv, ExtractionConfig, SweepAxis};
use qextract::prefix_integration::{estimate_prefix_integral, PrefixSettings};
use qextract::quantum_memory::{GoodSet, QuantumMemory};
use qextract::rng::{derive_seed, rng_from_seed};
use qextract::Execution;
use rand::Rng;

// Criterion 1
const SEGMENTATION_TOL: f64 = 1e-13;
// Criterion 2
const ORTHONORMALITY_TOL: f64 = 1e-12;
const EXACT_CONDITION_TOL: f64 = 1e-10;
const SNAPPED_CONDITION_MAX: f64 = 1.5;
const PERTURBATION_FACTOR: f64 = 10.0;
// Criterion 3
const TRUNCATION_DECAY_MAX: f64 = 0.5;
const CHOOSE_M_TARGETS: [f64; 2] = [1e-3, 1e-5];
// Criterion 4
const AMPLIFICATION_FACTOR: f64 = 10.0;
const INJECTED_NOISE: [f64; 2] = [1e-3, 1e-4];
const AMPLIFICATION_M: [usize; 2] = [8, 12];
const AMPLIFICATION_SEEDS: u64 = 100;
// Criterion 5
const SQRT_FACTOR: f64 = 2.0;
// Criterion 6
const QAE_RATIO: (f64, f64) = (1.6, 2.6);
const QAE_EPS: [f64; 3] = [0.02, 0.01, 0.005];
const QAE_COVERAGE_EPS: f64 = 0.01;
const QAE_COVERAGE_RUNS: u64 = 200;
const QAE_COVERAGE_MIN: f64 = 0.95;
// Criterion 7
const SUBNORM_RATIO: (f64, f64) = (1.5, 2.8);
// Criterion 8
const RIEMANN_RATIO: (f64, f64) = (1.7, 2.3);
const RIEMANN_QUBITS: std::ops::RangeInclusive<u32> = 8..=14;
// Criterion 9
const EXACT_SUP_MAX: f64 = 1e-3;
const ML_SUP_MAX: f64 = 0.05;
const ML_SEEDS: u64 = 50;
const ML_PASS_FRACTION: f64 = 0.90;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn bump() -> FunctionModel {
    normalize(&FunctionModel::cosine_bump(0.5).unwrap()).unwrap()
}

fn constant() -> FunctionModel {
    normalize(&FunctionModel::constant(1.0).unwrap()).unwrap()
}

fn gaussian() -> FunctionModel {
    normalize(&FunctionModel::gaussian(1.0).unwrap()).unwrap()
}

/// Ψ(x) = (x+1)/2 + a·sin(πx)/(2π) for the normalized bump √((1 + a cos πx)/2).
fn bump_integral(a: f64, x: f64) -> f64 {
    (x + 1.0) / 2.0 + a * (PI * x).sin() / (2.0 * PI)
}

/// Normalized ∫_{-1}^x exp(-2αt²) dt by composite Simpson with 2^16 panels.
fn gaussian_integral(alpha: f64, x: f64) -> f64 {
    let simpson = |a: f64, b: f64| {
        let n = 1usize << 16;
        let h = (b - a) / n as f64;
        let g = |t: f64| (-2.0 * alpha * t * t).exp();
        let mut s = g(a) + g(b);
        for i in 1..n {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    simpson(-1.0, x) / simpson(-1.0, 1.0)
}

fn cheb_t(j: usize, x: f64) -> f64 {
    (j as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

fn uniform(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn criterion_1() -> Outcome {
    let n = 8;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for f in [constant(), bump()] {
        let grid = sample_grid(&f, n).unwrap();
        let mem = QuantumMemory::prepare(&grid, 1.0).unwrap();
        let settings = PrefixSettings {
            eps_psi: 1e-3,
            max_psi: grid.max(),
            mode: EstimationMode::Exact,
            mlae: MlaeConfig::default(),
        };
        let dim = 1usize << n;
        let squares: Vec<f64> = (0..dim).map(|j| f.eval(grid_point(j, n)).powi(2)).collect();
        let total: f64 = squares.iter().sum();
        for x in 0..=dim {
            let brute: f64 = squares[..x].iter().sum::<f64>() / total;
            let est = estimate_prefix_integral(&mem, x, &settings, 0).unwrap();
            worst = worst.max((est.psi_hat_value - brute).abs());
            checked += 1;
        }
    }
    outcome(
        worst <= SEGMENTATION_TOL,
        format!("{checked} prefixes, worst |Ψ̂ - brute force| = {worst:.2e} (tol {SEGMENTATION_TOL:.0e})"),
    )
}

fn criterion_2() -> Outcome {
    let mut ortho = 0.0f64;
    let mut cond = 0.0f64;
    for m in 1..=64usize {
        let nodes = chebyshev_nodes(m);
        let u = |j: usize, x: f64| {
            let s = if j == 0 {
                (1.0 / m as f64).sqrt()
            } else {
                (2.0 / m as f64).sqrt()
            };
            s * cheb_t(j, x)
        };
        for i in 0..m {
            for j in 0..m {
                let g: f64 = nodes.iter().map(|&x| u(i, x) * u(j, x)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((g - target).abs());
            }
        }
        cond = cond.max((condition_number(&build_vandermonde(&nodes, m)) - 1.0).abs());
    }
    let d = perturbation_diagnostics(&make_node_set(16, 12).unwrap());
    let norm_bound = PERTURBATION_FACTOR * 16f64.powf(2.5) / 4096.0;
    let passed = ortho <= ORTHONORMALITY_TOL
        && cond <= EXACT_CONDITION_TOL
        && d.condition_perturbed <= SNAPPED_CONDITION_MAX
        && d.norm_diff <= norm_bound;
    outcome(
        passed,
        format!(
            "Gram defect {ortho:.2e}, |κ-1| {cond:.2e} (M ≤ 64); M=16 n=12: κ_pert {:.4}, ‖V-V_pert‖₂ {:.3e} ≤ {norm_bound:.3e}",
            d.condition_perturbed, d.norm_diff
        ),
    )
}

fn criterion_3() -> Outcome {
    let a = 0.5;
    let xs = uniform(4001, -1.0, 1.0);
    let sup_error = |m: usize| {
        let nodes = chebyshev_nodes(m);
        let samples: Vec<f64> = nodes.iter().map(|&x| bump_integral(a, x)).collect();
        let p = ChebyshevInterpolant::fit(&nodes, &samples).unwrap();
        xs.iter()
            .map(|&x| (p.eval(x) - bump_integral(a, x)).abs())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = (4..=16).map(sup_error).collect();
    let worst_ratio = (0..errors.len() - 2)
        .map(|i| errors[i + 2] / errors[i])
        .fold(0.0, f64::max);
    let lambda = bump().lambda;
    let mut chosen = Vec::new();
    let mut choose_ok = true;
    for eps in CHOOSE_M_TARGETS {
        let m = choose_m(lambda, eps);
        let e = sup_error(m);
        choose_ok &= e <= eps;
        chosen.push(format!("ε={eps:.0e}: M={m} err {e:.1e}"));
    }
    outcome(
        worst_ratio <= TRUNCATION_DECAY_MAX && choose_ok,
        format!(
            "worst err(M+2)/err(M) over M=4..14: {worst_ratio:.3} (max {TRUNCATION_DECAY_MAX}); {}",
            chosen.join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let n = 12;
    let f = bump();
    let xs = uniform(2048, -1.0, 1.0);
    let mut worst_ratio = 0.0f64;
    for m in AMPLIFICATION_M {
        let nodes = make_node_set(m, n).unwrap();
        let clean: Vec<f64> = nodes
            .mock_nodes
            .iter()
            .map(|&x| f.integral_oracle(x).unwrap())
            .collect();
        let base = ChebyshevInterpolant::fit_mock(&nodes, &clean).unwrap().differentiate();
        let base_vals: Vec<f64> = xs.iter().map(|&x| base.eval(x)).collect();
        for eps in INJECTED_NOISE {
            for seed in 0..AMPLIFICATION_SEEDS {
                let mut rng = rng_from_seed(derive_seed(4, &[m as u64, seed]));
                let noisy: Vec<f64> = clean.iter().map(|v| v + rng.random_range(-eps..=eps)).collect();
                let d = ChebyshevInterpolant::fit_mock(&nodes, &noisy).unwrap().differentiate();
                let dev = xs
                    .iter()
                    .zip(&base_vals)
                    .map(|(&x, b)| (d.eval(x) - b).abs())
                    .fold(0.0, f64::max);
                worst_ratio = worst_ratio.max(dev / ((m * m) as f64 * eps));
            }
        }
    }
    outcome(
        worst_ratio <= AMPLIFICATION_FACTOR,
        format!(
            "max ψ² deviation / (M²ε) = {worst_ratio:.3} over M ∈ {AMPLIFICATION_M:?}, ε ∈ {INJECTED_NOISE:?}, {AMPLIFICATION_SEEDS} seeds (max {AMPLIFICATION_FACTOR})"
        ),
    )
}

fn criterion_5() -> Outcome {
    let catalog = [
        constant(),
        bump(),
        gaussian(),
        normalize(&FunctionSpec::parse("expr:2+sin(x)").unwrap().build(6).unwrap()).unwrap(),
    ];
    let xs = uniform(2048, -1.0, 1.0);
    let mut worst = 0.0f64;
    // Synthetic approximants ψ² + δ with |δ| ≤ ε ≤ min ψ².
    for f in &catalog {
        let min = f.min_psi;
        for frac in [1.0, 0.5, 0.1, 1e-3] {
            let eps = frac * min * min;
            for shape in 0..4 {
                let delta = |x: f64| match shape {
                    0 => eps,
                    1 => -eps,
                    2 => eps * (7.0 * x + 0.3).sin(),
                    _ => eps * (13.0 * x * x - 1.0).cos(),
                };
                let r = sqrt_recover(|x| f.eval(x).powi(2) + delta(x), 0.0);
                let err = xs.iter().map(|&x| (r.eval(x) - f.eval(x)).abs()).fold(0.0, f64::max);
                worst = worst.max(err / (eps / min));
            }
        }
    }
    // Measured errors of exact-mode extractions.
    let mut pipeline_worst = 0.0f64;
    for spec in ["constant", "cosine-bump:0.5", "gaussian:1", "expr:2+sin(x)"] {
        let cfg = ExtractionConfig {
            function: FunctionSpec::parse(spec).unwrap(),
            n: 12,
            ..Default::default()
        };
        let r = extract(&cfg).unwrap();
        let eps = r.metrics.psi_sq.sup;
        let min = r.function.min_psi;
        if eps <= min * min && eps > 0.0 {
            pipeline_worst = pipeline_worst.max(r.metrics.psi.sup / (eps / min));
        }
    }
    outcome(
        worst <= SQRT_FACTOR && pipeline_worst <= SQRT_FACTOR,
        format!("max ψ error / (ε/min ψ): synthetic {worst:.3}, extracted {pipeline_worst:.3} (max {SQRT_FACTOR})"),
    )
}

fn criterion_6() -> Outcome {
    let cfg = MlaeConfig::default();
    let grid = sample_grid(&constant(), 3).unwrap();
    let mem = QuantumMemory::prepare(&grid, 1.0).unwrap();
    let good = GoodSet::new(0, 2);
    let q = 0.5f64.sqrt();

    let preps: Vec<u64> = QAE_EPS
        .iter()
        .map(|&eps| {
            estimate_amplitude(&mem, &good, eps, EstimationMode::GroverMl, 1, &cfg)
                .unwrap()
                .ledger
                .prep_queries
        })
        .collect();
    let ratios: Vec<f64> = preps.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();

    let template = ExtractionConfig {
        n: 8,
        cheb_m: Some(6),
        mode: EstimationMode::GroverMl,
        ..Default::default()
    };
    let values: Vec<String> = QAE_EPS.iter().map(|e| e.to_string()).collect();
    let rows = sweep(&template, SweepAxis::EpsPsi, &values);
    let sweep_preps: Vec<u64> = rows.iter().map(|r| r.prep_queries.unwrap_or(0)).collect();
    let sweep_ratios: Vec<f64> = sweep_preps
        .windows(2)
        .map(|w| w[1] as f64 / w[0].max(1) as f64)
        .collect();

    let within = Execution::Parallel
        .map_indexed(QAE_COVERAGE_RUNS as usize, |s| {
            let est =
                estimate_amplitude(&mem, &good, QAE_COVERAGE_EPS, EstimationMode::GroverMl, s as u64, &cfg).unwrap();
            (est.q_hat - q).abs() <= QAE_COVERAGE_EPS
        })
        .into_iter()
        .filter(|&ok| ok)
        .count();
    let fraction = within as f64 / QAE_COVERAGE_RUNS as f64;

    let in_range = |r: &f64| (QAE_RATIO.0..=QAE_RATIO.1).contains(r);
    outcome(
        ratios.iter().all(in_range) && sweep_ratios.iter().all(in_range) && fraction >= QAE_COVERAGE_MIN,
        format!(
            "prep ratios per halving {:?} (estimator), {:?} (eps_psi sweep), range {QAE_RATIO:?}; {within}/{QAE_COVERAGE_RUNS} within ε (min {QAE_COVERAGE_MIN})",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            sweep_ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut ratios = Vec::new();
    for eps_total in [0.05, 0.02] {
        let run = |a_psi: f64| {
            let cfg = ExtractionConfig {
                n: 8,
                cheb_m: Some(8),
                a_psi,
                eps_total,
                mode: EstimationMode::GroverMl,
                seed: 3,
                ..Default::default()
            };
            extract(&cfg).unwrap().ledger.prep_queries as f64
        };
        ratios.push(run(0.5) / run(1.0));
    }
    outcome(
        ratios.iter().all(|r| (SUBNORM_RATIO.0..=SUBNORM_RATIO.1).contains(r)),
        format!(
            "prep(a_ψ=0.5)/prep(a_ψ=1) = {:?} at eps_total 0.05, 0.02 (range {SUBNORM_RATIO:?})",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_8() -> Outcome {
    // x̂ = 0.3125 is a grid point for every n ≥ 5: X = 21·2^(n-5).
    let x_hat = 0.3125;
    let mut report = Vec::new();
    let mut passed = true;
    let cases: [(&str, FunctionModel, f64); 2] = [
        ("cosine-bump", bump(), bump_integral(0.5, x_hat)),
        ("gaussian", gaussian(), gaussian_integral(1.0, x_hat)),
    ];
    for (name, f, oracle) in cases {
        let errors: Vec<f64> = RIEMANN_QUBITS
            .map(|n| {
                let grid = sample_grid(&f, n).unwrap();
                let mem = QuantumMemory::prepare(&grid, 1.0).unwrap();
                let settings = PrefixSettings {
                    eps_psi: 1e-3,
                    max_psi: grid.max(),
                    mode: EstimationMode::Exact,
                    mlae: MlaeConfig::default(),
                };
                let x = 21usize << (n - 5);
                (estimate_prefix_integral(&mem, x, &settings, 0).unwrap().psi_hat_value - oracle).abs()
            })
            .collect();
        let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
        passed &= ratios.iter().all(|r| (RIEMANN_RATIO.0..=RIEMANN_RATIO.1).contains(r));
        report.push(format!(
            "{name} [{}]",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ));
    }
    outcome(
        passed,
        format!(
            "error ratios per n+1 over n=8..14: {} (range {RIEMANN_RATIO:?})",
            report.join("; ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let exact = extract(&ExtractionConfig {
        function: FunctionSpec::CosineBump(0.5),
        n: 12,
        ..Default::default()
    })
    .unwrap();
    let sups = Execution::Parallel.map_indexed(ML_SEEDS as usize, |s| {
        let cfg = ExtractionConfig {
            function: FunctionSpec::CosineBump(0.5),
            n: 12,
            eps_total: 0.05,
            mode: EstimationMode::GroverMl,
            seed: s as u64,
            execution: Execution::Sequential,
            ..Default::default()
        };
        extract(&cfg).unwrap().metrics.psi.sup
    });
    let good = sups.iter().filter(|&&s| s <= ML_SUP_MAX).count();
    let worst = sups.iter().copied().fold(0.0, f64::max);
    let fraction = good as f64 / ML_SEEDS as f64;
    outcome(
        exact.metrics.psi.sup <= EXACT_SUP_MAX && fraction >= ML_PASS_FRACTION,
        format!(
            "exact sup {:.2e} (max {EXACT_SUP_MAX:.0e}); grover-ml {good}/{ML_SEEDS} seeds with sup ≤ {ML_SUP_MAX} (min {ML_PASS_FRACTION}), worst {worst:.3e}",
            exact.metrics.psi.sup
        ),
    )
}

fn criterion_10() -> Outcome {
    let configs = [
        ExtractionConfig {
            n: 10,
            ..Default::default()
        },
        ExtractionConfig {
            n: 10,
            a_psi: 0.5,
            mode: EstimationMode::Noisy,
            seed: 99,
            ..Default::default()
        },
        ExtractionConfig {
            mode: EstimationMode::GroverMl,
            seed: 7,
            ..Default::default()
        },
    ];
    let mut identical = 0;
    for cfg in &configs {
        let first = extract(cfg).unwrap().to_json();
        let again = extract(cfg).unwrap().to_json();
        let sequential = extract(&ExtractionConfig {
            execution: Execution::Sequential,
            ..cfg.clone()
        })
        .unwrap()
        .to_json();
        if first == again && first == sequential {
            identical += 1;
        }
    }
    let csv = || {
        let template = ExtractionConfig {
            n: 8,
            cheb_m: Some(6),
            mode: EstimationMode::Noisy,
            seed: 5,
            ..Default::default()
        };
        let rows = sweep(&template, SweepAxis::EpsTotal, &["0.1".into(), "0.05".into()]);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        buf
    };
    let csv_same = csv() == csv();
    outcome(
        identical == configs.len() && csv_same,
        format!(
            "{identical}/{} configs byte-identical across re-runs and sequential/parallel execution; sweep CSV identical: {csv_same}",
            configs.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("segmentation oracle equivalence", criterion_1),
        ("orthonormality and conditioning", criterion_2),
        ("Chebyshev truncation decay", criterion_3),
        ("M² error amplification", criterion_4),
        ("square-root propagation", criterion_5),
        ("QAE query scaling", criterion_6),
        ("sub-normalization factor", criterion_7),
        ("Riemann residual order", criterion_8),
        ("end-to-end extraction", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "acceptance {:>2} {} {name}: {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
