//! Inversions: `Γ(t) = 1` for the collapse time, `t_C(ω_M) = t_M` for the
//! cutoff lower bound, and `I` or `J` equal to a threshold for the
//! device-independent bound.
//!
//! Every target is monotone, so a single bracketing bisection serves all of
//! them. Monotonicity is checked on every sample rather than assumed.

use rayon::prelude::*;

use crate::collapse::{gamma_current, white_cubic_coefficient, CollapseParams};
use crate::error::{ensure_positive, Error, Result};
use crate::fluctuations::FluctuationMeasure;
use crate::scenarios::MeasurementScenario;
use crate::spectral::{CutoffKind, CutoffSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative width of the final bracket.
    pub rel_tol: f64,
    pub max_iterations: usize,
    /// Factor by which the bracket grows while searching for a sign change.
    pub growth_factor: f64,
    /// Time bracket [s].
    pub t_floor: f64,
    pub t_ceiling: f64,
    /// Cutoff-frequency bracket [1/s].
    pub omega_floor: f64,
    pub omega_ceiling: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iterations: 200,
            growth_factor: 10.0,
            t_floor: 1e-12,
            t_ceiling: 1e6,
            omega_floor: 1e-9,
            omega_ceiling: 1e18,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-4) {
            return Err(Error::invalid("rel_tol", format!("must lie in (0, 1e-4), got {}", self.rel_tol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be positive"));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::invalid("growth_factor", "must be > 1"));
        }
        ensure_positive("t_floor", self.t_floor)?;
        ensure_positive("omega_floor", self.omega_floor)?;
        if !(self.t_ceiling > self.t_floor) || !(self.omega_ceiling > self.omega_floor) {
            return Err(Error::invalid("ceiling", "must exceed the floor"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundQuantity {
    /// `t_C` [s].
    CollapseTime,
    /// `ω_M` [1/s].
    CutoffFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub quantity: BoundQuantity,
    pub value: f64,
    /// Final bracket; the target is below at `bracket.0` and reached at `bracket.1`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Target function minus its goal at `value`.
    pub residual: f64,
}

struct Root {
    x: f64,
    lo: f64,
    hi: f64,
    iterations: usize,
    residual: f64,
}

fn check_order(x_prev: f64, f_prev: f64, x: f64, f: f64) -> Result<()> {
    if f < f_prev || f.is_nan() {
        Err(Error::NotMonotone { x_prev, f_prev, x, f })
    } else {
        Ok(())
    }
}

/// Finds `x` in `[floor, ceiling]` with `f(x) = target` for nondecreasing `f`.
///
/// The bracket grows geometrically from `floor`, then shrinks by geometric
/// bisection until its relative width is below `cfg.rel_tol`.
fn solve_nondecreasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    floor: f64,
    ceiling: f64,
    cfg: &SolverConfig,
) -> Result<Root> {
    cfg.validate()?;
    let mut lo = floor;
    let mut f_lo = f(lo);
    if f_lo.is_nan() {
        return Err(Error::invalid("target", format!("function is NaN at {lo:e}")));
    }
    if f_lo >= target {
        return Err(Error::invalid(
            "bracket",
            format!("target already reached at the floor {floor:e}"),
        ));
    }
    let mut iterations = 0;
    let (mut hi, mut f_hi);
    loop {
        iterations += 1;
        hi = (lo * cfg.growth_factor).min(ceiling);
        f_hi = f(hi);
        check_order(lo, f_lo, hi, f_hi)?;
        if f_hi >= target {
            break;
        }
        if hi >= ceiling {
            return Err(Error::NoRootInBudget { ceiling, value: f_hi });
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::MaxIterations { iterations });
        }
        lo = hi;
        f_lo = f_hi;
    }

    while hi / lo - 1.0 > cfg.rel_tol {
        if iterations >= cfg.max_iterations {
            return Err(Error::MaxIterations { iterations });
        }
        iterations += 1;
        let mid = (lo * hi).sqrt();
        let f_mid = f(mid);
        check_order(lo, f_lo, mid, f_mid)?;
        check_order(mid, f_mid, hi, f_hi)?;
        if f_mid >= target {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }

    let x = (lo * hi).sqrt();
    Ok(Root {
        x,
        lo,
        hi,
        iterations,
        residual: f(x) - target,
    })
}

/// Collapse time: solves `Γ(t_C) = 1` for a nondecreasing `Γ` with `Γ(0) = 0`.
pub fn collapse_time<F: Fn(f64) -> f64>(gamma_fn: F, cfg: &SolverConfig) -> Result<BoundResult> {
    let root = solve_nondecreasing(gamma_fn, 1.0, cfg.t_floor, cfg.t_ceiling, cfg)?;
    Ok(BoundResult {
        quantity: BoundQuantity::CollapseTime,
        value: root.x,
        bracket: (root.lo, root.hi),
        iterations: root.iterations,
        residual: root.residual,
    })
}

/// Collapse time of the battery current of `scenario` under `spec`.
pub fn scenario_collapse_time(
    params: &CollapseParams,
    spec: &CutoffSpec,
    scenario: &MeasurementScenario,
    cfg: &SolverConfig,
) -> Result<BoundResult> {
    params.validate()?;
    scenario.validate()?;
    collapse_time(|t| gamma_current(params, spec, scenario, t), cfg)
}

/// White-noise collapse time from the cubic law, `t_C = K^{−1/3}`.
pub fn white_collapse_time_analytic(params: &CollapseParams, scenario: &MeasurementScenario) -> f64 {
    white_cubic_coefficient(params, scenario).powf(-1.0 / 3.0)
}

/// Smallest cutoff `ω_M` for which the scenario collapses by `t_m`.
///
/// Solves `Γ(t_m; ω_M) = 1`; since `Γ` grows with both `t` and `ω_M`, this is
/// the same as `t_C(ω_M) = t_m`.
pub fn cutoff_lower_bound(
    params: &CollapseParams,
    kind: CutoffKind,
    scenario: &MeasurementScenario,
    t_m: f64,
    cfg: &SolverConfig,
) -> Result<BoundResult> {
    params.validate()?;
    scenario.validate()?;
    ensure_positive("t_m", t_m)?;
    if kind == CutoffKind::White {
        return Err(Error::invalid("kind", "a cutoff bound needs a colored kernel"));
    }
    let white = CutoffSpec::white();
    if gamma_current(params, &white, scenario, t_m) < 1.0 {
        let t_c_white = scenario_collapse_time(params, &white, scenario, cfg)
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY);
        return Err(Error::NeverCollapsing { t_m, t_c_white });
    }
    let gamma_at = |omega: f64| match CutoffSpec::new(kind, omega) {
        Ok(spec) => gamma_current(params, &spec, scenario, t_m),
        Err(_) => f64::NAN,
    };
    if gamma_at(cfg.omega_floor) >= 1.0 {
        return Err(Error::AlreadyCollapsing {
            t_m,
            omega_floor: cfg.omega_floor,
        });
    }
    let root = solve_nondecreasing(gamma_at, 1.0, cfg.omega_floor, cfg.omega_ceiling, cfg)?;
    Ok(BoundResult {
        quantity: BoundQuantity::CutoffFrequency,
        value: root.x,
        bracket: (root.lo, root.hi),
        iterations: root.iterations,
        residual: root.residual,
    })
}

/// The small-cutoff limit of [`cutoff_lower_bound`] for a Lorentzian kernel:
/// `Λ ≈ ω_M t²/4` gives `ω* = 2 / (K t_M⁴)` with `K` the white cubic coefficient.
pub fn small_omega_bound(params: &CollapseParams, scenario: &MeasurementScenario, t_m: f64) -> f64 {
    2.0 / (white_cubic_coefficient(params, scenario) * t_m.powi(4))
}

const X_FLOOR: f64 = 1e-6;
const X_CEILING: f64 = 1e12;

/// `ω_M t_M` at which the normalized measure drops to its threshold.
pub fn fluctuation_crossing(measure: &FluctuationMeasure, kind: CutoffKind, cfg: &SolverConfig) -> Result<f64> {
    if kind == CutoffKind::White {
        return Err(Error::WhiteNotNormalizable);
    }
    FluctuationMeasure::new(measure.kind, measure.threshold)?;
    // Unit t, so ω_M equals the dimensionless product.
    let value = |x: f64| match CutoffSpec::new(kind, x) {
        Ok(spec) => measure.evaluate(&spec, 1.0).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    let root = solve_nondecreasing(|x| -value(x), -measure.threshold, X_FLOOR, X_CEILING, cfg)?;
    Ok(root.x)
}

/// Smallest `ω_M` for which the measure has dropped to its threshold by `t_m`.
pub fn fluctuation_bound(
    measure: &FluctuationMeasure,
    t_m: f64,
    kind: CutoffKind,
    cfg: &SolverConfig,
) -> Result<BoundResult> {
    ensure_positive("t_m", t_m)?;
    if kind == CutoffKind::White {
        return Err(Error::WhiteNotNormalizable);
    }
    FluctuationMeasure::new(measure.kind, measure.threshold)?;
    let value = |omega: f64| match CutoffSpec::new(kind, omega) {
        Ok(spec) => measure.evaluate(&spec, t_m).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    let root = solve_nondecreasing(
        |omega| -value(omega),
        -measure.threshold,
        X_FLOOR / t_m,
        X_CEILING / t_m,
        cfg,
    )?;
    Ok(BoundResult {
        quantity: BoundQuantity::CutoffFrequency,
        value: root.x,
        bracket: (root.lo, root.hi),
        iterations: root.iterations,
        residual: root.residual,
    })
}

/// Factor by which λ may shrink while a white-noise collapse still completes
/// by `t_m`: `(t_C/t_M)³`, from `Γ ∝ λ t³`.
pub fn lambda_rescale(t_c_white: f64, t_m: f64) -> Result<f64> {
    ensure_positive("t_c_white", t_c_white)?;
    ensure_positive("t_m", t_m)?;
    Ok((t_c_white / t_m).powi(3))
}

/// `n` points log-spaced over `[lo, hi]`, both included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    ensure_positive("lo", lo)?;
    ensure_positive("hi", hi)?;
    if n < 2 || hi <= lo {
        return Err(Error::invalid("grid", "need hi > lo and at least two points"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

/// `t_C(ω_M)` on a grid of cutoffs; evaluated in parallel, returned in grid order.
pub fn collapse_time_curve(
    params: &CollapseParams,
    kind: CutoffKind,
    scenario: &MeasurementScenario,
    omegas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    omegas
        .par_iter()
        .map(|&omega| {
            let spec = CutoffSpec::new(kind, omega)?;
            scenario_collapse_time(params, &spec, scenario, cfg).map(|r| r.value)
        })
        .collect()
}

/// Times at which the measure crosses its threshold on a grid of cutoffs.
pub fn fluctuation_locus(
    measure: &FluctuationMeasure,
    kind: CutoffKind,
    omegas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let x = fluctuation_crossing(measure, kind, cfg)?;
    omegas
        .iter()
        .map(|&w| {
            ensure_positive("omega_m", w)?;
            Ok(x / w)
        })
        .collect()
}
