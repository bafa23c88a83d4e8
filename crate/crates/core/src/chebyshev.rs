//! Chebyshev interpolation of Ψ, differentiation back to ψ², and the
//! square-root step back to ψ.
//!
//! The basis is the orthonormalized set u_0 = √(1/M)·T_0,
//! u_j = √(2/M)·T_j, which is discretely orthonormal on the M Chebyshev
//! nodes cos((2k-1)π/(2M)). Samples are only available on the qubit grid,
//! so the nodes are snapped to the nearest grid point ("mock nodes") and the
//! slightly perturbed Vandermonde system is solved instead.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::grid_point;

/// Condition estimate above which a solve is refused.
pub const MAX_CONDITION: f64 = 1e6;

/// Interpolation order for a derivative bound Λ and truncation target:
/// ⌈e·Λ + 2 ln(1/ε)⌉, at least 2.
pub fn choose_m(lambda: f64, eps_cheb: f64) -> usize {
    assert!(lambda >= 0.0, "lambda must be non-negative");
    assert!(eps_cheb > 0.0 && eps_cheb < 1.0, "eps_cheb must lie in (0, 1)");
    let raw = E * lambda + 2.0 * (1.0 / eps_cheb).ln();
    // Absorb the last-ulp noise of ln so exact integers stay put.
    ((raw - 1e-9).ceil() as usize).max(2)
}

/// cos((2k-1)π/(2M)) for k = 1..=M.
pub fn chebyshev_nodes(m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * m) as f64).cos())
        .collect()
}

/// T_j(x): cos(j·arccos x) on [-1, 1], the cosh form outside.
pub fn cheb_t(j: usize, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (j as f64 * x.acos()).cos()
    } else {
        let sign = if x < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
        sign * (j as f64 * x.abs().acosh()).cosh()
    }
}

fn cheb_u_recurrence(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// U_k(x): sin((k+1)θ)/sin θ with θ = arccos x, the closed-form limit
/// (±1)^k·(k+1) at x = ±1, and the three-term recurrence where sin θ is
/// too small for the quotient (or outside [-1, 1]).
pub fn cheb_u(k: usize, x: f64) -> f64 {
    if x == 1.0 {
        return (k + 1) as f64;
    }
    if x == -1.0 {
        return if k.is_multiple_of(2) { 1.0 } else { -1.0 } * (k + 1) as f64;
    }
    if x.abs() > 1.0 {
        return cheb_u_recurrence(k, x);
    }
    let theta = x.acos();
    let s = theta.sin();
    if s < 1e-6 {
        return cheb_u_recurrence(k, x);
    }
    ((k + 1) as f64 * theta).sin() / s
}

/// The two basis normalization constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisScale {
    pub first: f64,
    pub rest: f64,
}

impl BasisScale {
    pub fn orthonormal(m: usize) -> Self {
        BasisScale {
            first: (1.0 / m as f64).sqrt(),
            rest: (2.0 / m as f64).sqrt(),
        }
    }

    #[inline]
    pub fn of(&self, j: usize) -> f64 {
        if j == 0 {
            self.first
        } else {
            self.rest
        }
    }
}

/// u_j(x).
pub fn basis_value(j: usize, x: f64, scale: &BasisScale) -> f64 {
    scale.of(j) * cheb_t(j, x)
}

/// Chebyshev nodes and their grid-snapped counterparts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    pub m: usize,
    pub n: u32,
    pub cheb_nodes: Vec<f64>,
    pub mock_nodes: Vec<f64>,
    pub mock_indices: Vec<usize>,
    pub max_snap_error: f64,
}

/// Snaps each of the M Chebyshev nodes to the nearest x_j = 2j/2ⁿ - 1,
/// j < 2ⁿ. Fails if two nodes land on the same grid point.
pub fn make_node_set(m: usize, n: u32) -> Result<NodeSet> {
    if m == 0 {
        return Err(Error::out_of_range("M", "M must be at least 1"));
    }
    let len = 1usize << n;
    let cheb_nodes = chebyshev_nodes(m);
    let mock_indices: Vec<usize> = cheb_nodes
        .iter()
        .map(|&x| {
            let pos = (x + 1.0) / 2.0 * len as f64;
            (pos.round().max(0.0) as usize).min(len - 1)
        })
        .collect();
    for k in 1..m {
        // Nodes are strictly decreasing, so collisions are adjacent.
        if mock_indices[k] == mock_indices[k - 1] {
            return Err(Error::NodeCollision {
                first: k,
                second: k + 1,
                index: mock_indices[k],
            });
        }
    }
    let mock_nodes: Vec<f64> = mock_indices.iter().map(|&j| grid_point(j, n)).collect();
    let max_snap_error = cheb_nodes
        .iter()
        .zip(&mock_nodes)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(NodeSet {
        m,
        n,
        cheb_nodes,
        mock_nodes,
        mock_indices,
        max_snap_error,
    })
}

/// V[k, j] = u_j(nodes[k]).
pub fn build_vandermonde(nodes: &[f64], m: usize) -> DMatrix<f64> {
    build_vandermonde_scaled(nodes, m, &BasisScale::orthonormal(m))
}

pub fn build_vandermonde_scaled(nodes: &[f64], m: usize, scale: &BasisScale) -> DMatrix<f64> {
    DMatrix::from_fn(nodes.len(), m, |k, j| basis_value(j, nodes[k], scale))
}

pub fn singular_values(v: &DMatrix<f64>) -> Vec<f64> {
    v.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// σ_max / σ_min.
pub fn condition_number(v: &DMatrix<f64>) -> f64 {
    let s = singular_values(v);
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn spectral_norm(v: &DMatrix<f64>) -> f64 {
    singular_values(v).into_iter().fold(0.0, f64::max)
}

/// Largest |(VᵀV - I)_{ij}| for the basis sampled at the exact nodes.
pub fn orthonormality_defect(m: usize, scale: &BasisScale) -> f64 {
    let v = build_vandermonde_scaled(&chebyshev_nodes(m), m, scale);
    let gram = v.transpose() * &v;
    let id = DMatrix::<f64>::identity(m, m);
    (gram - id).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub coeffs: Vec<f64>,
    pub condition: f64,
    pub residual: f64,
}

/// Solves V a = f by LU with partial pivoting.
pub fn solve_coefficients(v: &DMatrix<f64>, f: &[f64]) -> Result<Solution> {
    if v.nrows() != v.ncols() || v.nrows() != f.len() {
        return Err(Error::Config(format!(
            "system shape {}x{} with {} samples",
            v.nrows(),
            v.ncols(),
            f.len()
        )));
    }
    let condition = condition_number(v);
    if !(condition.is_finite() && condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_column_slice(f);
    let a = v.clone().lu().solve(&rhs).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let residual = (v * &a - &rhs).norm();
    let fnorm = rhs.norm();
    if residual > 1e-10 * fnorm.max(f64::MIN_POSITIVE) {
        return Err(Error::NonFinite(format!(
            "solve residual {residual:.3e} exceeds 1e-10·‖f‖ = {:.3e}",
            1e-10 * fnorm
        )));
    }
    Ok(Solution {
        coeffs: a.iter().copied().collect(),
        condition,
        residual,
    })
}

/// P(x) = Σ a_j u_j(x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevInterpolant {
    pub m: usize,
    pub coeffs: Vec<f64>,
    pub basis_scale: BasisScale,
    pub node_set: Option<NodeSet>,
    /// Condition number of the system the coefficients came from.
    pub condition: f64,
}

impl ChebyshevInterpolant {
    /// Interpolates `samples` taken at `nodes`.
    pub fn fit(nodes: &[f64], samples: &[f64]) -> Result<Self> {
        let m = nodes.len();
        let v = build_vandermonde(nodes, m);
        let sol = solve_coefficients(&v, samples)?;
        Ok(ChebyshevInterpolant {
            m,
            coeffs: sol.coeffs,
            basis_scale: BasisScale::orthonormal(m),
            node_set: None,
            condition: sol.condition,
        })
    }

    /// Interpolates samples taken at the mock nodes of `nodes`.
    pub fn fit_mock(nodes: &NodeSet, samples: &[f64]) -> Result<Self> {
        let mut interp = Self::fit(&nodes.mock_nodes, samples)?;
        interp.node_set = Some(nodes.clone());
        Ok(interp)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * basis_value(j, x, &self.basis_scale))
            .sum()
    }

    pub fn differentiate(&self) -> InterpolantDerivative {
        InterpolantDerivative {
            coeffs: self.coeffs.clone(),
            basis_scale: self.basis_scale,
        }
    }
}

/// P'(x) = Σ_j a_j·scale_j·j·U_{j-1}(x), the approximant of ψ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolantDerivative {
    pub coeffs: Vec<f64>,
    pub basis_scale: BasisScale,
}

impl InterpolantDerivative {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| a * self.basis_scale.of(j) * j as f64 * cheb_u(j - 1, x))
            .sum()
    }
}

/// Free-function form of [`ChebyshevInterpolant::differentiate`].
pub fn differentiate_interpolant(interp: &ChebyshevInterpolant) -> InterpolantDerivative {
    interp.differentiate()
}

/// x ↦ √max(f(x), floor).
#[derive(Debug, Clone)]
pub struct SqrtRecovery<F> {
    inner: F,
    floor: f64,
}

/// Most negative value the square root had to clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampExcursion {
    pub x: f64,
    pub value: f64,
}

impl<F: Fn(f64) -> f64> SqrtRecovery<F> {
    pub fn eval(&self, x: f64) -> f64 {
        (self.inner)(x).max(self.floor).sqrt()
    }

    /// Scans `xs` for points where clamping kicks in and reports the worst.
    pub fn scan(&self, xs: &[f64]) -> Option<ClampExcursion> {
        xs.iter()
            .map(|&x| ClampExcursion {
                x,
                value: (self.inner)(x),
            })
            .filter(|c| c.value < self.floor)
            .min_by(|a, b| a.value.total_cmp(&b.value))
    }
}

impl ClampExcursion {
    pub fn warning(&self) -> String {
        format!(
            "ψ² approximant dips to {:.3e} at x = {:.6}; clamped before the square root",
            self.value, self.x
        )
    }
}

/// Square root of a ψ² approximant, clamped at `min_floor` (normally 0).
pub fn sqrt_recover<F: Fn(f64) -> f64>(approx_sq: F, min_floor: f64) -> SqrtRecovery<F> {
    SqrtRecovery {
        inner: approx_sq,
        floor: min_floor.max(0.0),
    }
}

/// Distance between the exact and snapped Vandermonde matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationDiagnostics {
    pub m: usize,
    pub n: u32,
    pub max_snap_error: f64,
    pub norm_diff: f64,
    /// M^{5/2}/2ⁿ.
    pub scale_bound: f64,
    pub condition_exact: f64,
    pub condition_perturbed: f64,
}

pub fn perturbation_diagnostics(nodes: &NodeSet) -> PerturbationDiagnostics {
    let v = build_vandermonde(&nodes.cheb_nodes, nodes.m);
    let vp = build_vandermonde(&nodes.mock_nodes, nodes.m);
    PerturbationDiagnostics {
        m: nodes.m,
        n: nodes.n,
        max_snap_error: nodes.max_snap_error,
        norm_diff: spectral_norm(&(&v - &vp)),
        scale_bound: (nodes.m as f64).powf(2.5) / (1u64 << nodes.n) as f64,
        condition_exact: condition_number(&v),
        condition_perturbed: condition_number(&vp),
    }
}
