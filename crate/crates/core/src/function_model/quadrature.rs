//! Adaptive bisection with a 7/15-point Gauss-Kronrod panel rule.
//!
//! This is the classical ground truth for every integral the pipeline is
//! checked against, so it shares no code with the Chebyshev machinery.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

// Kronrod abscissae (positive half, descending) and weights; every other
// abscissa starting at index 1 is a Gauss-Legendre node.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One GK15 panel: returns (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each bisection halves the local tolerance. A panel is accepted once its
/// Kronrod/Gauss discrepancy falls below the local tolerance or below a few
/// ulps of the panel value.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (whole, err) = gk15(f, lo, hi);
    let mut sum = 0.0;
    let mut comp = 0.0;
    recurse(f, lo, hi, whole, err, tol, 0, max_depth, &mut sum, &mut comp)?;
    Ok(sign * (sum + comp))
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    est: f64,
    err: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
    sum: &mut f64,
    comp: &mut f64,
) -> Result<()> {
    if !est.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a}, {b}]")));
    }
    if err <= tol.max(8.0 * f64::EPSILON * est.abs()) {
        // Neumaier summation keeps 10^4-panel totals at the 1e-16 level.
        let t = *sum + est;
        if sum.abs() >= est.abs() {
            *comp += (*sum - t) + est;
        } else {
            *comp += (est - t) + *sum;
        }
        *sum = t;
        return Ok(());
    }
    if depth >= max_depth {
        return Err(Error::Quadrature { a, b, max_depth });
    }
    let m = 0.5 * (a + b);
    let (l, le) = gk15(f, a, m);
    let (r, re) = gk15(f, m, b);
    recurse(f, a, m, l, le, 0.5 * tol, depth + 1, max_depth, sum, comp)?;
    recurse(f, m, b, r, re, 0.5 * tol, depth + 1, max_depth, sum, comp)
}
