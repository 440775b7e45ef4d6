//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.
//!
//! The caller supplies the initial panel boundaries (discontinuities, kernel
//! scales, oscillation periods); the integrator then keeps bisecting whichever
//! panel carries the largest error estimate until the summed error meets the
//! tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed beyond the initial panels.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_subdivisions: 200_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Kronrod panel with the QUADPACK error heuristic.
pub fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// `breakpoints` must be strictly increasing and finite.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Err(Error::invalid("breakpoints", "need at least two"));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("breakpoints", "must be finite and strictly increasing"));
    }

    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut settled = Vec::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error) = gauss_kronrod15(&f, w[0], w[1]);
        evaluations += 15;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    let mut subdivisions = 0;

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
            // Panel cannot be split further in floating point.
            settled.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                evaluations,
            });
        }
        subdivisions += 1;
        let (v1, e1) = gauss_kronrod15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // Resum now and then to keep the running totals honest.
        if subdivisions % 4096 == 0 {
            total = heap.iter().chain(settled.iter()).map(|p| p.value).sum();
            total_err = heap.iter().chain(settled.iter()).map(|p| p.error).sum();
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(settled);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        let r = integrate(f, &[b, a], cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    integrate(f, &[a, b], cfg)
}

/// `∫_a^∞ f` via the substitution `x = a / s`, `s ∈ (0, 1]` (requires `a > 0`).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if !(a > 0.0) {
        return Err(Error::invalid("a", "lower limit must be positive"));
    }
    let g = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            let x = a / s;
            let v = f(x) * a / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        }
    };
    integrate(g, &[0.0, 1e-3, 0.1, 1.0], cfg)
}

/// Sorted, deduplicated breakpoints restricted to `[lo, hi]` (both included).
pub fn breakpoints_within(lo: f64, hi: f64, candidates: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = candidates
        .into_iter()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(f64::MIN_POSITIVE));
    pts
}
