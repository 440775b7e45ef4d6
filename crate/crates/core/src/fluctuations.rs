//! Device-independent fluctuation measures.
//!
//! With `ξ̄(t) = (1/t) ∫₀ᵗ ξ`:
//!
//! * `Ĩ(t) = E[ξ(t) ξ̄(t)] = (1/t) ∫₀ᵗ δ_γ(τ) dτ`
//! * `J̃(t) = E[ξ̄(t)²] = 2 Λ(t) / t²`
//!
//! and `I`, `J` are the same divided by their `t → 0⁺` limits, which both
//! equal `δ_γ(0)`. Every normalized measure depends on `ω_M t` alone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::spectral::{
    correlator_integral, delta_gamma, delta_gamma_zero, exp_m1_plus_x, lambda_big, CutoffKind, CutoffSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Correlation of the noise with its own running average.
    I,
    /// Variance of the running average.
    J,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::I => "I",
            Measure::J => "J",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Measure::I),
            "J" | "j" => Ok(Measure::J),
            other => Err(Error::invalid("measure", format!("expected I or J, got `{other}`"))),
        }
    }
}

/// A measure together with the level below which the noise counts as having
/// fluctuated enough.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationMeasure {
    pub kind: Measure,
    pub threshold: f64,
}

pub const DEFAULT_THRESHOLD: f64 = 0.1;

impl FluctuationMeasure {
    pub fn new(kind: Measure, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::invalid("threshold", format!("must lie in (0, 1), got {threshold}")));
        }
        Ok(Self { kind, threshold })
    }

    pub fn evaluate(&self, spec: &CutoffSpec, t: f64) -> Result<f64> {
        match self.kind {
            Measure::I => i_norm(spec, t),
            Measure::J => j_norm(spec, t),
        }
    }
}

impl Default for FluctuationMeasure {
    fn default() -> Self {
        Self {
            kind: Measure::I,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// `Ĩ(t)` [1/s]. For `t = 0` returns the right limit `δ_γ(0)`.
pub fn i_tilde(spec: &CutoffSpec, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return delta_gamma_zero(spec).map_err(|_| Error::WhiteNotNormalizable);
    }
    Ok(correlator_integral(spec, t) / t)
}

/// `J̃(t) = 2Λ(t)/t²` [1/s]. For `t = 0` returns the right limit `δ_γ(0)`.
pub fn j_tilde(spec: &CutoffSpec, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return delta_gamma_zero(spec).map_err(|_| Error::WhiteNotNormalizable);
    }
    Ok(2.0 * lambda_big(spec, t) / (t * t))
}

/// `I(t) = Ĩ(t)/Ĩ(0⁺)`, in `(0, 1]`.
pub fn i_norm(spec: &CutoffSpec, t: f64) -> Result<f64> {
    let Some(w) = spec.omega_m() else {
        return Err(Error::WhiteNotNormalizable);
    };
    if t == 0.0 {
        return Ok(1.0);
    }
    if spec.kind() == CutoffKind::Lorentzian && t > 0.0 {
        let x = w * t;
        return Ok(-(-x).exp_m1() / x);
    }
    Ok(i_tilde(spec, t)? / delta_gamma_zero(spec)?)
}

/// `J(t) = J̃(t)/J̃(0⁺)`, in `(0, 1]`.
pub fn j_norm(spec: &CutoffSpec, t: f64) -> Result<f64> {
    let Some(w) = spec.omega_m() else {
        return Err(Error::WhiteNotNormalizable);
    };
    if t == 0.0 {
        return Ok(1.0);
    }
    if spec.kind() == CutoffKind::Lorentzian && t > 0.0 {
        let x = w * t;
        return Ok(2.0 * exp_m1_plus_x(x) / (x * x));
    }
    Ok(j_tilde(spec, t)? / delta_gamma_zero(spec)?)
}

/// `Ĩ(t)` by direct quadrature of the closed-form correlator over `[0, t]`.
pub fn i_tilde_quadrature(spec: &CutoffSpec, t: f64, rel_tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", "must be > 0"));
    }
    let w = spec.omega_m().ok_or(Error::WhiteNotPointwise)?;
    // Panels of at most a quarter period of the fastest oscillation (Heaviside).
    let n = ((w * t / 1.5).ceil() as usize).clamp(1, 1_000_000);
    let points: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
    let r = integrate(
        |tau| delta_gamma(spec, tau).unwrap_or(f64::NAN),
        &points,
        &QuadratureConfig::with_rel_tol(rel_tol),
    )?;
    Ok(r.value / t)
}
