//! Target functions ψ(x) on [-1, 1]: definition, normalization, sampling on
//! the qubit grid, and classical ground truth for Ψ(x) = ∫_{-1}^x ψ² and Λ.

pub mod expr;
mod file;
mod lambda;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
pub use file::{parse_definition, read_definition, FunctionDefinition};
pub use lambda::{estimate_lambda, nth_derivative, LAMBDA_GRID_POINTS};

/// Points in the grid used to certify positivity and the min/max bounds.
pub const CHECK_GRID_POINTS: usize = 10_000;
/// Largest supported data-qubit count.
pub const MAX_QUBITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Builtin,
    ParsedExpression,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSource {
    UserSupplied,
    FiniteDifference { k_max: u32 },
}

/// The unscaled shape of ψ. The model multiplies it by `FunctionModel::scale`.
#[derive(Debug, Clone)]
pub enum Shape {
    Constant(f64),
    /// √((1 + a cos πx)/2), normalized for every a ∈ (0, 1).
    CosineBump {
        a: f64,
    },
    /// exp(-α x²).
    Gaussian {
        alpha: f64,
    },
    Expression {
        src: String,
        expr: expr::Expr,
    },
    /// Values on the grid x_j = 2j/N - 1, j < N; linear between grid
    /// points and held constant on the last cell [x_{N-1}, 1].
    Tabulated {
        values: Vec<f64>,
    },
}

impl Shape {
    pub fn is_constant(&self) -> bool {
        match self {
            Shape::Constant(_) => true,
            Shape::Expression { expr, .. } => expr.is_constant(),
            _ => false,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Shape::Constant(c) => *c,
            Shape::CosineBump { a } => ((1.0 + a * (PI * x).cos()) / 2.0).sqrt(),
            Shape::Gaussian { alpha } => (-alpha * x * x).exp(),
            Shape::Expression { expr, .. } => expr.eval(x),
            Shape::Tabulated { values } => tabulated_eval(values, x),
        }
    }
}

fn tabulated_cell(len: usize, x: f64) -> (usize, f64) {
    let h = 2.0 / len as f64;
    let pos = ((x + 1.0) / h).max(0.0);
    let j = (pos.floor() as usize).min(len - 1);
    (j, (pos - j as f64).clamp(0.0, 1.0))
}

fn tabulated_eval(values: &[f64], x: f64) -> f64 {
    let (j, t) = tabulated_cell(values.len(), x);
    if j + 1 == values.len() {
        values[j]
    } else {
        values[j] + (values[j + 1] - values[j]) * t
    }
}

/// ∫_{-1}^{x} of the squared piecewise-linear tabulated function, exact.
fn tabulated_cumulative(values: &[f64], x: f64) -> f64 {
    let len = values.len();
    let h = 2.0 / len as f64;
    let x = x.clamp(-1.0, 1.0);
    let (j, tau) = tabulated_cell(len, x);
    let cell = |k: usize, tau: f64| {
        let a = values[k];
        let b = if k + 1 == len { a } else { values[k + 1] };
        let d = b - a;
        h * (a * a * tau + a * d * tau * tau + d * d * tau * tau * tau / 3.0)
    };
    let mut parts: Vec<f64> = (0..j).map(|k| cell(k, 1.0)).collect();
    parts.push(cell(j, tau));
    neumaier_sum(parts)
}

/// A positive target function on [-1, 1].
#[derive(Debug, Clone)]
pub struct FunctionModel {
    pub name: String,
    pub shape: Shape,
    /// Multiplier applied to the shape; set by [`normalize`].
    pub scale: f64,
    /// Derivative-growth bound Λ.
    pub lambda: f64,
    pub lambda_source: LambdaSource,
    pub min_psi: f64,
    pub max_psi: f64,
    pub provenance: Provenance,
}

impl fmt::Display for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (scale {:.6}, Λ {:.4})", self.name, self.scale, self.lambda)
    }
}

impl FunctionModel {
    fn from_shape(name: String, shape: Shape, provenance: Provenance) -> Result<Self> {
        let mut model = FunctionModel {
            name,
            shape,
            scale: 1.0,
            lambda: f64::NAN,
            lambda_source: LambdaSource::UserSupplied,
            min_psi: f64::NAN,
            max_psi: f64::NAN,
            provenance,
        };
        model.refresh_bounds()?;
        Ok(model)
    }

    /// ψ(x).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.scale * self.shape.eval(x)
    }

    /// Constant ψ ≡ c, Λ = c (all derivatives vanish).
    pub fn constant(c: f64) -> Result<Self> {
        let mut m = Self::from_shape(format!("constant({c})"), Shape::Constant(c), Provenance::Builtin)?;
        m.lambda = c;
        Ok(m)
    }

    /// √((1 + a cos πx)/2).
    pub fn cosine_bump(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::out_of_range(
                "cosine-bump amplitude",
                format!("a = {a}, need 0 < a < 1"),
            ));
        }
        let mut m = Self::from_shape(
            format!("cosine-bump({a})"),
            Shape::CosineBump { a },
            Provenance::Builtin,
        )?;
        m.lambda = estimate_lambda(&m, lambda::DEFAULT_K_MAX)?;
        m.lambda_source = LambdaSource::FiniteDifference {
            k_max: lambda::DEFAULT_K_MAX,
        };
        Ok(m)
    }

    /// exp(-α x²), unnormalized.
    pub fn gaussian(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::out_of_range("gaussian width", format!("alpha = {alpha}")));
        }
        let mut m = Self::from_shape(
            format!("gaussian({alpha})"),
            Shape::Gaussian { alpha },
            Provenance::Builtin,
        )?;
        m.lambda = estimate_lambda(&m, lambda::DEFAULT_K_MAX)?;
        m.lambda_source = LambdaSource::FiniteDifference {
            k_max: lambda::DEFAULT_K_MAX,
        };
        Ok(m)
    }

    /// Tabulated samples on the 2ⁿ grid with a user-supplied Λ.
    pub fn tabulated(values: Vec<f64>, lambda: f64) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() || len > 1usize << MAX_QUBITS {
            return Err(Error::out_of_range(
                "tabulated length",
                format!("{len} values; need 2^n with 1 <= n <= {MAX_QUBITS}"),
            ));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("tabulated value {j} is {v}, must be positive")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::out_of_range("lambda", format!("{lambda}")));
        }
        let mut m = Self::from_shape(
            format!("tabulated({len})"),
            Shape::Tabulated { values },
            Provenance::Tabulated,
        )?;
        m.lambda = lambda;
        Ok(m)
    }

    /// Replaces Λ with a user-supplied value.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::out_of_range("lambda", format!("{lambda}")));
        }
        self.lambda = lambda;
        self.lambda_source = LambdaSource::UserSupplied;
        Ok(self)
    }

    /// Recomputes Λ by finite differences up to derivative order `k_max`.
    pub fn with_estimated_lambda(mut self, k_max: u32) -> Result<Self> {
        self.lambda = estimate_lambda(&self, k_max)?;
        self.lambda_source = LambdaSource::FiniteDifference { k_max };
        Ok(self)
    }

    fn refresh_bounds(&mut self) -> Result<()> {
        match &self.shape {
            Shape::Constant(c) => {
                self.min_psi = self.scale * c;
                self.max_psi = self.scale * c;
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::Domain(format!("constant {c} is not positive")));
                }
            }
            Shape::CosineBump { a } => {
                self.min_psi = self.scale * ((1.0 - a) / 2.0).sqrt();
                self.max_psi = self.scale * ((1.0 + a) / 2.0).sqrt();
            }
            Shape::Gaussian { alpha } => {
                self.min_psi = self.scale * (-alpha).exp();
                self.max_psi = self.scale;
            }
            Shape::Expression { .. } | Shape::Tabulated { .. } => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for x in check_grid() {
                    let v = self.eval(x);
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::Domain(format!(
                            "ψ({x}) = {v}; the function must be finite and strictly positive on [-1, 1]"
                        )));
                    }
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                if let Shape::Tabulated { values } = &self.shape {
                    for v in values {
                        lo = lo.min(self.scale * v);
                        hi = hi.max(self.scale * v);
                    }
                }
                self.min_psi = lo;
                self.max_psi = hi;
            }
        }
        Ok(())
    }

    /// ∫_{-1}^{1} ψ².
    pub fn norm_integral(&self) -> Result<f64> {
        self.integral_between(-1.0, 1.0)
    }

    fn integral_between(&self, a: f64, b: f64) -> Result<f64> {
        match &self.shape {
            Shape::Tabulated { values } => {
                Ok(self.scale * self.scale * (tabulated_cumulative(values, b) - tabulated_cumulative(values, a)))
            }
            _ => quadrature::integrate(
                &|x: f64| {
                    let v = self.eval(x);
                    v * v
                },
                a,
                b,
                quadrature::DEFAULT_TOL,
                quadrature::DEFAULT_MAX_DEPTH,
            ),
        }
    }

    /// Ψ(x) = ∫_{-1}^{x} ψ(t)² dt by adaptive quadrature.
    pub fn integral_oracle(&self, x: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::out_of_range("oracle abscissa", format!("x = {x}")));
        }
        self.integral_between(-1.0, x)
    }

    /// Ψ at many points, integrating panel by panel between sorted abscissae.
    pub fn integral_oracle_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let mut out = vec![0.0; xs.len()];
        let (mut prev, mut acc, mut comp) = (-1.0, 0.0f64, 0.0f64);
        for i in order {
            let x = xs[i];
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::out_of_range("oracle abscissa", format!("x = {x}")));
            }
            let piece = self.integral_between(prev, x)?;
            let t = acc + piece;
            comp += if acc.abs() >= piece.abs() {
                (acc - t) + piece
            } else {
                (piece - t) + acc
            };
            acc = t;
            prev = x;
            out[i] = acc + comp;
        }
        Ok(out)
    }
}

/// The 10⁴-point positivity/bounds grid.
pub fn check_grid() -> impl Iterator<Item = f64> {
    let n = CHECK_GRID_POINTS;
    (0..n).map(move |i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
}

/// Parses an expression into an unnormalized model (Λ not yet estimated).
pub fn parse_function_expr(src: &str) -> Result<FunctionModel> {
    let parsed = expr::parse(src)?;
    let name = format!("expr({})", src.trim());
    let mut model = FunctionModel::from_shape(
        name,
        Shape::Expression {
            src: src.trim().to_string(),
            expr: parsed,
        },
        Provenance::ParsedExpression,
    )?;
    model.lambda = match &model.shape {
        Shape::Expression { expr, .. } if expr.is_constant() => model.max_psi,
        _ => f64::NAN,
    };
    Ok(model)
}

/// Returns a copy scaled so that ∫ψ² = 1. The applied factor is folded into
/// `scale` and Λ, min and max are rescaled with it.
pub fn normalize(f: &FunctionModel) -> Result<FunctionModel> {
    let integral = f.norm_integral()?;
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::Domain(format!("∫ψ² = {integral}")));
    }
    let factor = integral.sqrt().recip();
    let mut out = f.clone();
    out.scale *= factor;
    out.min_psi *= factor;
    out.max_psi *= factor;
    if let LambdaSource::FiniteDifference { k_max } = out.lambda_source {
        out.lambda = estimate_lambda(&out, k_max)?;
    }
    if out.shape.is_constant() {
        out.lambda = out.max_psi;
    }
    Ok(out)
}

/// Samples of ψ on the n-qubit grid x_j = 2j/2ⁿ - 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub n: u32,
    pub values: Vec<f64>,
    /// 𝒩 = Σ_j ψ(x_j)².
    pub norm_sq: f64,
}

impl GridFunction {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// (1/𝒩) Σ_{j<X} ψ(x_j)², computed directly from the samples.
    pub fn prefix_mass(&self, x_index: usize) -> f64 {
        neumaier_sum(self.values[..x_index].iter().map(|v| v * v)) / self.norm_sq
    }
}

/// Grid abscissa x_j = 2j/2ⁿ - 1.
#[inline]
pub fn grid_point(j: usize, n: u32) -> f64 {
    2.0 * j as f64 / (1u64 << n) as f64 - 1.0
}

pub fn sample_grid(f: &FunctionModel, n: u32) -> Result<GridFunction> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::out_of_range(
            "qubit count",
            format!("n = {n}, need 1..={MAX_QUBITS}"),
        ));
    }
    let len = 1usize << n;
    let values: Vec<f64> = (0..len).map(|j| f.eval(grid_point(j, n))).collect();
    if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Domain(format!("ψ(x_{j}) = {v}")));
    }
    let norm_sq = neumaier_sum(values.iter().map(|v| v * v));
    Ok(GridFunction { n, values, norm_sq })
}

/// Named function source, as accepted by `--function`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum FunctionSpec {
    Constant,
    CosineBump(f64),
    Gaussian(f64),
    Expr(String),
    File(String),
}

impl FunctionSpec {
    pub const DEFAULT_BUMP: f64 = 0.5;
    pub const DEFAULT_GAUSSIAN_ALPHA: f64 = 1.0;

    /// Parses `constant`, `cosine-bump[:a]`, `gaussian[:alpha]`,
    /// `expr:<expression>` or `file:<path>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let num = |t: Option<&str>, default: f64| -> Result<f64> {
            match t {
                None => Ok(default),
                Some(t) => t
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad parameter '{t}' in '{s}'"))),
            }
        };
        match head {
            "constant" if tail.is_none() => Ok(FunctionSpec::Constant),
            "cosine-bump" => Ok(FunctionSpec::CosineBump(num(tail, Self::DEFAULT_BUMP)?)),
            "gaussian" => Ok(FunctionSpec::Gaussian(num(tail, Self::DEFAULT_GAUSSIAN_ALPHA)?)),
            "expr" => Ok(FunctionSpec::Expr(tail.unwrap_or_default().to_string())),
            "file" => Ok(FunctionSpec::File(tail.unwrap_or_default().to_string())),
            _ => Err(Error::Config(format!(
                "unknown function '{s}'; expected constant, cosine-bump[:a], gaussian[:alpha], expr:<e> or file:<path>"
            ))),
        }
    }

    /// Builds the (unnormalized) model. Λ is estimated with `k_max` unless
    /// the source provides it.
    pub fn build(&self, k_max: u32) -> Result<FunctionModel> {
        let m = match self {
            FunctionSpec::Constant => FunctionModel::constant(1.0)?,
            FunctionSpec::CosineBump(a) => FunctionModel::cosine_bump(*a)?,
            FunctionSpec::Gaussian(alpha) => FunctionModel::gaussian(*alpha)?,
            FunctionSpec::Expr(src) => parse_function_expr(src)?,
            FunctionSpec::File(path) => return read_definition(path)?.into_model(k_max),
        };
        match (&m.shape, m.lambda_source) {
            (Shape::Expression { .. }, _) if !m.lambda.is_finite() => m.with_estimated_lambda(k_max),
            (_, LambdaSource::FiniteDifference { k_max: k }) if k != k_max => m.with_estimated_lambda(k_max),
            _ => Ok(m),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Constant => write!(f, "constant"),
            FunctionSpec::CosineBump(a) => write!(f, "cosine-bump:{a}"),
            FunctionSpec::Gaussian(alpha) => write!(f, "gaussian:{alpha}"),
            FunctionSpec::Expr(e) => write!(f, "expr:{e}"),
            FunctionSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump_psi(a: f64, x: f64) -> f64 {
        (x + 1.0) / 2.0 + a * (PI * x).sin() / (2.0 * PI)
    }

    #[test]
    fn constant_expression_model() {
        let m = parse_function_expr("1/sqrt(2)").unwrap();
        assert!((m.eval(0.3) - 0.707_106_781_186_547_5).abs() < 1e-15);
        assert_eq!(m.provenance, Provenance::ParsedExpression);
        assert!((m.lambda - 0.707_106_781_186_547_5).abs() < 1e-15);
    }

    #[test]
    fn parsed_bump_is_already_normalized() {
        let m = parse_function_expr("sqrt((1+0.5*cos(pi*x))/2)").unwrap();
        assert!((m.norm_integral().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_expression_is_a_domain_error() {
        assert!(matches!(parse_function_expr("x"), Err(Error::Domain(_))));
        assert!(matches!(parse_function_expr("sqrt(x)"), Err(Error::Domain(_))));
        assert!(matches!(parse_function_expr("1/(x-x)"), Err(Error::Domain(_))));
    }

    #[test]
    fn normalize_constant_one() {
        let m = normalize(&FunctionModel::constant(1.0).unwrap()).unwrap();
        assert!((m.eval(0.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((m.lambda - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn normalize_leaves_bump_unchanged() {
        let m = FunctionModel::cosine_bump(0.5).unwrap();
        let n = normalize(&m).unwrap();
        assert!((n.scale - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_gaussian_matches_quadrature_oracle() {
        let g = FunctionModel::gaussian(4.0).unwrap();
        let norm = normalize(&g).unwrap();
        // Independent: composite Simpson with 2·10⁴ panels on exp(-8x²).
        let n = 20_000;
        let h = 2.0 / n as f64;
        let f = |x: f64| (-8.0f64 * x * x).exp();
        let mut s = f(-1.0) + f(1.0);
        for i in 1..n {
            let x = -1.0 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        let integral = s * h / 3.0;
        assert!((norm.scale - integral.sqrt().recip()).abs() < 1e-12);
        assert!((norm.norm_integral().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normalize_is_idempotent() {
        for m in [
            FunctionModel::gaussian(2.0).unwrap(),
            parse_function_expr("2+x").unwrap(),
        ] {
            let once = normalize(&m).unwrap();
            let twice = normalize(&once).unwrap();
            assert!((twice.scale / once.scale - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_endpoints_and_bump_closed_form() {
        let m = normalize(&FunctionModel::gaussian(1.0).unwrap()).unwrap();
        assert_eq!(m.integral_oracle(-1.0).unwrap(), 0.0);
        assert!((m.integral_oracle(1.0).unwrap() - 1.0).abs() < 1e-12);

        let b = FunctionModel::cosine_bump(0.5).unwrap();
        assert!((b.integral_oracle(0.0).unwrap() - 0.5).abs() < 1e-12);
        for &x in &[-0.7, -0.2, 0.5, 0.93] {
            assert!((b.integral_oracle(x).unwrap() - bump_psi(0.5, x)).abs() < 1e-12);
        }
        assert!(b.integral_oracle(1.5).is_err());
    }

    #[test]
    fn oracle_many_matches_pointwise() {
        let b = FunctionModel::cosine_bump(0.3).unwrap();
        let xs = [0.4, -0.9, 0.0, 1.0, -1.0, 0.75];
        let many = b.integral_oracle_many(&xs).unwrap();
        for (x, v) in xs.iter().zip(many) {
            assert!((v - bump_psi(0.3, *x)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn sample_grid_points_and_norm() {
        let m = normalize(&FunctionModel::constant(1.0).unwrap()).unwrap();
        let g = sample_grid(&m, 1).unwrap();
        assert_eq!(g.values.len(), 2);
        assert_eq!(grid_point(0, 1), -1.0);
        assert_eq!(grid_point(1, 1), 0.0);

        let g = sample_grid(&m, 3).unwrap();
        assert!(g
            .values
            .iter()
            .all(|v| (v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15));
        assert!((g.norm_sq - 4.0).abs() < 1e-12);

        assert!(sample_grid(&m, 0).is_err());
        assert!(sample_grid(&m, 25).is_err());
    }

    #[test]
    fn grid_norm_close_to_half_grid_size() {
        let m = FunctionModel::gaussian(3.0).unwrap();
        let m = normalize(&m).unwrap();
        for n in [6u32, 10, 14] {
            let g = sample_grid(&m, n).unwrap();
            let dev = (g.norm_sq / (1u64 << (n - 1)) as f64 - 1.0).abs();
            assert!(dev <= m.lambda * m.lambda / (1u64 << n) as f64, "n={n}: {dev}");
        }
    }

    #[test]
    fn tabulated_model_integrates_exactly() {
        let vals = vec![1.0, 2.0, 3.0, 2.0];
        let m = FunctionModel::tabulated(vals, 1.0).unwrap();
        // Cells of width 1/2: ∫(1..2)², ∫(2..3)², ∫(3..2)², then 2² held.
        let cell = |a: f64, b: f64| 0.5 * (a * a + a * b + b * b) / 3.0;
        let expect = cell(1.0, 2.0) + cell(2.0, 3.0) + cell(3.0, 2.0) + 0.5 * 4.0;
        assert!((m.norm_integral().unwrap() - expect).abs() < 1e-14);
        let n = normalize(&m).unwrap();
        assert!((n.norm_integral().unwrap() - 1.0).abs() < 1e-14);
        let g = sample_grid(&n, 2).unwrap();
        for (v, raw) in g.values.iter().zip([1.0, 2.0, 3.0, 2.0]) {
            assert!((v - raw * n.scale).abs() < 1e-15);
        }
        assert!(FunctionModel::tabulated(vec![1.0, 2.0, 3.0], 1.0).is_err());
        assert!(FunctionModel::tabulated(vec![1.0, -2.0], 1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        assert_eq!(FunctionSpec::parse("constant").unwrap(), FunctionSpec::Constant);
        assert_eq!(
            FunctionSpec::parse("cosine-bump").unwrap(),
            FunctionSpec::CosineBump(0.5)
        );
        assert_eq!(
            FunctionSpec::parse("cosine-bump:0.25").unwrap(),
            FunctionSpec::CosineBump(0.25)
        );
        assert_eq!(FunctionSpec::parse("gaussian:2").unwrap(), FunctionSpec::Gaussian(2.0));
        assert_eq!(
            FunctionSpec::parse("expr:1+x*x").unwrap(),
            FunctionSpec::Expr("1+x*x".into())
        );
        assert!(FunctionSpec::parse("bogus").is_err());
        assert!(FunctionSpec::parse("gaussian:abc").is_err());
        let s = FunctionSpec::CosineBump(0.25);
        assert_eq!(FunctionSpec::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn cosine_bump_rejects_bad_amplitude() {
        assert!(FunctionModel::cosine_bump(1.0).is_err());
        assert!(FunctionModel::cosine_bump(0.0).is_err());
    }
}
