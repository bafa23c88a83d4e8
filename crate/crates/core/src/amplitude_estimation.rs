//! Amplitude estimation over a good-set window of the memory.
//!
//! Three modes:
//! - `Exact` reads the amplitude off the statevector (one preparation).
//! - `Noisy` perturbs the exact amplitude uniformly within ±ε and charges
//!   ⌈1/ε⌉ synthetic preparations.
//! - `GroverMl` runs maximum-likelihood amplitude estimation: for each
//!   Grover power m in {0, 1, 2, 4, …, 2^K} it draws `shots_per_power`
//!   Bernoulli outcomes with success probability sin²((2m+1)θ) and then
//!   maximizes the joint likelihood over θ ∈ [0, π/2].
//!
//! The Grover operator Q = (2|ψ⟩⟨ψ| - I)(I - 2Π_good) keeps the plane
//! spanned by the good and bad projections of the prepared state invariant,
//! so after m applications the good-set probability is exactly
//! sin²((2m+1)θ) with sin θ = √P_good. Sampling uses that closed form;
//! [`apply_grover`] performs the same rotation on the full statevector and
//! the two are checked against each other.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_memory::{reflect_window, window_probability, GoodSet, QuantumMemory, Statevector};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimationMode {
    Exact,
    Noisy,
    GroverMl,
}

impl std::str::FromStr for EstimationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(EstimationMode::Exact),
            "noisy" => Ok(EstimationMode::Noisy),
            "grover-ml" => Ok(EstimationMode::GroverMl),
            other => Err(Error::Config(format!(
                "unknown mode '{other}', expected exact, noisy or grover-ml"
            ))),
        }
    }
}

impl std::fmt::Display for EstimationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimationMode::Exact => "exact",
            EstimationMode::Noisy => "noisy",
            EstimationMode::GroverMl => "grover-ml",
        })
    }
}

/// State-preparation accounting. One Grover application costs a prepare
/// and an un-prepare; every shot costs one prepare.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub prep_queries: u64,
    pub grover_applications: u64,
    pub shots: u64,
}

impl QueryLedger {
    pub fn new(grover_applications: u64, shots: u64) -> Self {
        QueryLedger {
            prep_queries: 2 * grover_applications + shots,
            grover_applications,
            shots,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.prep_queries == 2 * self.grover_applications + self.shots
    }
}

impl std::ops::Add for QueryLedger {
    type Output = QueryLedger;

    fn add(self, rhs: QueryLedger) -> QueryLedger {
        QueryLedger {
            prep_queries: self.prep_queries + rhs.prep_queries,
            grover_applications: self.grover_applications + rhs.grover_applications,
            shots: self.shots + rhs.shots,
        }
    }
}

impl std::ops::AddAssign for QueryLedger {
    fn add_assign(&mut self, rhs: QueryLedger) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for QueryLedger {
    fn sum<I: Iterator<Item = QueryLedger>>(iter: I) -> Self {
        iter.fold(QueryLedger::default(), |a, b| a + b)
    }
}

/// Knobs of the maximum-likelihood schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlaeConfig {
    pub shots_per_power: u32,
    /// c in K = ⌈log₂(c/ε)⌉.
    pub schedule_constant: f64,
    pub coarse_grid_points: usize,
    pub refine_tol: f64,
}

impl Default for MlaeConfig {
    fn default() -> Self {
        MlaeConfig {
            shots_per_power: 100,
            schedule_constant: 1.0,
            coarse_grid_points: 10_000,
            refine_tol: 1e-10,
        }
    }
}

impl MlaeConfig {
    /// Grover powers 0, 1, 2, 4, …, 2^K.
    pub fn powers(&self, eps: f64) -> Vec<u64> {
        let k = (self.schedule_constant / eps).log2().ceil().max(0.0) as u32;
        std::iter::once(0).chain((0..=k).map(|i| 1u64 << i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEstimate {
    pub q_hat: f64,
    pub epsilon_target: f64,
    pub mode: EstimationMode,
    pub ledger: QueryLedger,
    pub seed: u64,
}

/// Applies Q^reps to the prepared state of `mem` and returns the result.
/// The reflection about the prepared state is a rank-one update.
pub fn apply_grover(mem: &QuantumMemory, good: &GoodSet, reps: u64) -> Result<Statevector> {
    mem.validate_window(good)?;
    let prepared = mem.state();
    let mut v = prepared.clone();
    for _ in 0..reps {
        reflect_window(&mut v, mem, good);
        let overlap = prepared.inner(&v) * 2.0;
        for (x, p) in v.good.iter_mut().zip(&prepared.good) {
            *x = overlap * p - *x;
        }
        for (x, p) in v.bad.iter_mut().zip(&prepared.bad) {
            *x = overlap * p - *x;
        }
    }
    Ok(v)
}

/// Good-set probability of `state`, window in the memory's original indexing.
pub fn good_probability(mem: &QuantumMemory, state: &Statevector, good: &GoodSet) -> Result<f64> {
    mem.validate_window(good)?;
    Ok(window_probability(state, mem, good))
}

/// sin²((2m+1)θ) for sin θ = q.
#[inline]
pub fn grover_success_probability(q: f64, reps: u64) -> f64 {
    let theta = q.clamp(0.0, 1.0).asin();
    ((2 * reps + 1) as f64 * theta).sin().powi(2)
}

pub fn estimate_amplitude(
    mem: &QuantumMemory,
    good: &GoodSet,
    eps: f64,
    mode: EstimationMode,
    seed: u64,
    cfg: &MlaeConfig,
) -> Result<AmplitudeEstimate> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::out_of_range("epsilon", format!("{eps}, need 0 < eps < 0.5")));
    }
    let q = mem.prefix_probability(good)?.sqrt().min(1.0);
    let (q_hat, ledger) = match mode {
        EstimationMode::Exact => (q, QueryLedger::new(0, 1)),
        EstimationMode::Noisy => {
            let mut rng = rng_from_seed(seed);
            let delta: f64 = rng.random_range(-eps..=eps);
            let shots = (1.0 / eps).ceil() as u64;
            ((q + delta).clamp(0.0, 1.0), QueryLedger::new(0, shots))
        }
        EstimationMode::GroverMl => {
            let powers = cfg.powers(eps);
            let hits = sample_schedule(q, &powers, cfg.shots_per_power, seed);
            let theta = maximize_likelihood(&powers, &hits, cfg);
            let n = cfg.shots_per_power as u64;
            let grover: u64 = powers.iter().sum::<u64>() * n;
            (theta.sin(), QueryLedger::new(grover, n * powers.len() as u64))
        }
    };
    Ok(AmplitudeEstimate {
        q_hat,
        epsilon_target: eps,
        mode,
        ledger,
        seed,
    })
}

/// Number of good outcomes at each power.
fn sample_schedule(q: f64, powers: &[u64], shots: u32, seed: u64) -> Vec<u32> {
    let mut rng = rng_from_seed(seed);
    powers
        .iter()
        .map(|&m| {
            let p = grover_success_probability(q, m);
            (0..shots).filter(|_| rng.random::<f64>() < p).count() as u32
        })
        .collect()
}

struct Likelihood<'a> {
    powers: &'a [u64],
    hits: &'a [u32],
    shots: u32,
}

impl Likelihood<'_> {
    fn log_at(&self, theta: f64, upto: usize) -> f64 {
        const TINY: f64 = 1e-300;
        let n = self.shots as f64;
        self.powers[..upto]
            .iter()
            .zip(self.hits)
            .map(|(&m, &h)| {
                let p = ((2 * m + 1) as f64 * theta).sin().powi(2);
                let h = h as f64;
                let mut ll = 0.0;
                if h > 0.0 {
                    ll += h * p.max(TINY).ln();
                }
                if h < n {
                    ll += (n - h) * (1.0 - p).max(TINY).ln();
                }
                ll
            })
            .sum()
    }

    /// Grid search over [lo, hi] (ties go to the smaller θ), then
    /// golden-section refinement around the best grid point.
    fn argmax(&self, lo: f64, hi: f64, points: usize, upto: usize, tol: f64) -> f64 {
        let step = (hi - lo) / (points - 1) as f64;
        let mut best = (lo, f64::NEG_INFINITY);
        for i in 0..points {
            let t = lo + step * i as f64;
            let v = self.log_at(t, upto);
            if v > best.1 {
                best = (t, v);
            }
        }
        let a = (best.0 - step).max(lo);
        let b = (best.0 + step).min(hi);
        let refined = golden_max(|t| self.log_at(t, upto), a, b, tol);
        if self.log_at(refined, upto) >= best.1 {
            refined
        } else {
            best.0
        }
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Maximum-likelihood θ for the observed schedule.
///
/// Powers whose likelihood fringes the coarse grid can resolve (at least 40
/// grid steps per period) are fitted jointly over the whole of [0, π/2].
/// Each higher power is then added in turn and the maximum is re-located
/// within one fringe period π/(2m+1) of the previous highest power m on
/// either side, or ±6 standard deviations (Fisher information
/// 4·N·Σ(2m+1)²) if that is wider. The period-wide window lets later data
/// overturn an earlier pick of a neighbouring likelihood peak.
fn maximize_likelihood(powers: &[u64], hits: &[u32], cfg: &MlaeConfig) -> f64 {
    let lik = Likelihood {
        powers,
        hits,
        shots: cfg.shots_per_power,
    };
    let points = cfg.coarse_grid_points.max(2);
    let spacing = FRAC_PI_2 / (points - 1) as f64;
    let period = |m: u64| std::f64::consts::PI / (2 * m + 1) as f64;
    let resolvable = powers
        .iter()
        .take_while(|&&m| period(m) >= 40.0 * spacing)
        .count()
        .max(1);
    let mut theta = lik.argmax(0.0, FRAC_PI_2, points, resolvable, cfg.refine_tol);
    let fisher = |upto: usize| {
        4.0 * cfg.shots_per_power as f64
            * powers[..upto]
                .iter()
                .map(|&m| ((2 * m + 1) as f64).powi(2))
                .sum::<f64>()
    };
    for upto in resolvable + 1..=powers.len() {
        let half = period(powers[upto - 2]).max(6.0 / fisher(upto - 1).sqrt());
        let lo = (theta - half).max(0.0);
        let hi = (theta + half).min(FRAC_PI_2);
        theta = lik.argmax(lo, hi, 400, upto, cfg.refine_tol);
    }
    theta
}
