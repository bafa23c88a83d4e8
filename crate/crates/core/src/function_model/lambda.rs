//! Finite-difference estimate of the derivative-growth bound
//! Λ_k = max_{x, j ≤ k} |ψ^(j)(x)|^{1/(j+1)}.

use super::FunctionModel;
use crate::error::{Error, Result};

pub const LAMBDA_GRID_POINTS: usize = 4096;
pub const MAX_K: u32 = 8;
pub(crate) const DEFAULT_K_MAX: u32 = 6;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference of order `order` with step `h`, together with a bound
/// on its rounding noise.
fn central(f: &impl Fn(f64) -> f64, x: f64, order: u32, h: f64) -> (f64, f64) {
    let mut acc = 0.0;
    let mut mag = 0.0;
    for i in 0..=order {
        let w = binomial(order, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
        let v = f(x + (order as f64 / 2.0 - i as f64) * h);
        acc += w * v;
        mag += (w * v).abs();
    }
    let scale = h.powi(order as i32);
    (acc / scale, 4.0 * f64::EPSILON * mag / scale)
}

/// Step for an order-`j` stencil: balances O(h⁶) truncation after two
/// Richardson levels against O(ε/h^j) rounding.
fn step(order: u32) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 6.0))
}

/// ψ^(order)(x) by Richardson-extrapolated central differences. Values
/// indistinguishable from rounding noise are returned as zero.
pub fn nth_derivative(f: &impl Fn(f64) -> f64, x: f64, order: u32) -> f64 {
    if order == 0 {
        return f(x);
    }
    let h = step(order);
    let (d0, n0) = central(f, x, order, h);
    let (d1, n1) = central(f, x, order, 0.5 * h);
    let (d2, n2) = central(f, x, order, 0.25 * h);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let value = (16.0 * r1 - r0) / 15.0;
    let noise = (16.0 * (4.0 * n2 + n1) + 4.0 * n1 + n0) / 45.0;
    if value.abs() <= noise {
        0.0
    } else {
        value
    }
}

/// Λ over derivative orders 0..=k_max on a 4096-point grid spanning [-1, 1].
///
/// Stencils reach up to `k_max·h/2` beyond the interval, so the evaluator
/// must extend past ±1. Tabulated models have no derivatives and need a
/// user-supplied Λ.
pub fn estimate_lambda(model: &FunctionModel, k_max: u32) -> Result<f64> {
    if k_max > MAX_K {
        return Err(Error::out_of_range("k_max", format!("{k_max} > {MAX_K}")));
    }
    if let super::Shape::Tabulated { .. } = model.shape {
        return Err(Error::Domain("tabulated functions need a user-supplied lambda".into()));
    }
    let f = |x: f64| model.eval(x);
    let n = LAMBDA_GRID_POINTS;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        for j in 0..=k_max {
            let d = nth_derivative(&f, x, j);
            if !d.is_finite() {
                return Err(Error::NonFinite(format!("derivative of order {j} at x = {x}")));
            }
            best = best.max(d.abs().powf(1.0 / (j as f64 + 1.0)));
        }
    }
    Ok(best)
}
