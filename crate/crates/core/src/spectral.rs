//! Cutoff kernels `γ(ω)`, their time correlators `δ_γ(τ)` and the accumulated
//! collapse factor `Λ(t) = ∫₀ᵗ ds ∫₀ˢ du δ_γ(s − u)`.
//!
//! Closed forms are the primary path. The quadrature functions evaluate the
//! same quantities straight from the frequency-domain definitions and serve
//! as independent oracles:
//!
//! ```text
//! δ_γ(τ) = (1/π) ∫₀^∞ γ(ω) cos(ωτ) dω
//! Λ(t)   = (1/π) ∫₀^∞ γ(ω) (1 − cos ωt) / ω² dω
//! ```

use std::f64::consts::{FRAC_1_PI, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::quadrature::{breakpoints_within, integrate, integrate_to_infinity, QuadratureConfig};
use crate::special::{erf, si};

/// Shape of the spectral cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffKind {
    /// `γ = 1`; no cutoff.
    White,
    /// `γ = θ(ω_M − ω)`.
    Heaviside,
    /// `γ = exp(−ω²/ω_M²)`.
    GaussianExp,
    /// `γ = exp(−ω/ω_M)`.
    Exponential,
    /// `γ = ω_M² / (ω² + ω_M²)`.
    Lorentzian,
}

impl CutoffKind {
    pub const ALL: [CutoffKind; 5] = [
        CutoffKind::White,
        CutoffKind::Heaviside,
        CutoffKind::GaussianExp,
        CutoffKind::Exponential,
        CutoffKind::Lorentzian,
    ];

    pub const COLORED: [CutoffKind; 4] = [
        CutoffKind::Heaviside,
        CutoffKind::GaussianExp,
        CutoffKind::Exponential,
        CutoffKind::Lorentzian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutoffKind::White => "white",
            CutoffKind::Heaviside => "heaviside",
            CutoffKind::GaussianExp => "gaussian-exp",
            CutoffKind::Exponential => "exponential",
            CutoffKind::Lorentzian => "lorentzian",
        }
    }

    /// The kernel as a function of `v = ω/ω_M`.
    fn normalized(self) -> fn(f64) -> f64 {
        match self {
            CutoffKind::White => |_| 1.0,
            CutoffKind::Heaviside => |v| if v <= 1.0 { 1.0 } else { 0.0 },
            CutoffKind::GaussianExp => |v| (-v * v).exp(),
            CutoffKind::Exponential => |v| (-v).exp(),
            CutoffKind::Lorentzian => |v| 1.0 / (1.0 + v * v),
        }
    }
}

impl fmt::Display for CutoffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutoffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "white" => Ok(CutoffKind::White),
            "heaviside" | "step" => Ok(CutoffKind::Heaviside),
            "gaussian-exp" | "gaussian" => Ok(CutoffKind::GaussianExp),
            "exponential" | "exp" => Ok(CutoffKind::Exponential),
            "lorentzian" => Ok(CutoffKind::Lorentzian),
            other => Err(Error::invalid("cutoff", format!("unknown kind `{other}`"))),
        }
    }
}

/// A cutoff kernel together with its cutoff frequency `ω_M` [1/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    kind: CutoffKind,
    omega_m: Option<f64>,
}

impl CutoffSpec {
    /// `omega_m` is ignored for [`CutoffKind::White`].
    pub fn new(kind: CutoffKind, omega_m: f64) -> Result<Self> {
        if kind == CutoffKind::White {
            return Ok(Self::white());
        }
        ensure_positive("omega_m", omega_m)?;
        Ok(Self {
            kind,
            omega_m: Some(omega_m),
        })
    }

    pub fn white() -> Self {
        Self {
            kind: CutoffKind::White,
            omega_m: None,
        }
    }

    /// Panics if `omega_m` is not a positive finite number.
    pub fn lorentzian(omega_m: f64) -> Self {
        Self::new(CutoffKind::Lorentzian, omega_m).expect("omega_m must be positive")
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn omega_m(&self) -> Option<f64> {
        self.omega_m
    }

    pub fn is_white(&self) -> bool {
        self.kind == CutoffKind::White
    }

    fn cutoff(&self) -> f64 {
        self.omega_m.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for CutoffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.omega_m {
            Some(w) => write!(f, "{}(omega_m={w:e})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// `e^{−x} − 1 + x`, accurate for small `x`.
pub(crate) fn exp_m1_plus_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // Σ_{k≥2} (−x)^k / k!
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..40 {
            term *= -x / k as f64;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-x).exp_m1() + x
    }
}

/// Spectral weight `γ(ω)` for `ω ≥ 0`.
pub fn gamma_of_omega(spec: &CutoffSpec, omega: f64) -> f64 {
    match spec.omega_m {
        None => 1.0,
        Some(w) => spec.kind.normalized()(omega / w),
    }
}

/// Time correlator `δ_γ(τ)` [1/s]; even in `τ`.
pub fn delta_gamma(spec: &CutoffSpec, tau: f64) -> Result<f64> {
    let Some(w) = spec.omega_m else {
        return Err(Error::WhiteNotPointwise);
    };
    let tau = tau.abs();
    let b = w * tau;
    Ok(match spec.kind {
        CutoffKind::White => unreachable!(),
        CutoffKind::Lorentzian => 0.5 * w * (-b).exp(),
        CutoffKind::GaussianExp => w / (2.0 * PI.sqrt()) * (-0.25 * b * b).exp(),
        CutoffKind::Exponential => w * FRAC_1_PI / (1.0 + b * b),
        CutoffKind::Heaviside => {
            if b == 0.0 {
                w * FRAC_1_PI
            } else {
                w * FRAC_1_PI * b.sin() / b
            }
        }
    })
}

/// `δ_γ(0) = (1/π) ∫₀^∞ γ`, the `t → 0⁺` value of both fluctuation measures.
pub fn delta_gamma_zero(spec: &CutoffSpec) -> Result<f64> {
    delta_gamma(spec, 0.0)
}

/// `∫₀ᵗ δ_γ(τ) dτ`, which equals `dΛ/dt`. White noise contributes half its
/// delta function at the endpoint, giving `1/2`.
pub fn correlator_integral(spec: &CutoffSpec, t: f64) -> f64 {
    let t = t.max(0.0);
    let x = spec.cutoff() * t;
    match spec.kind {
        CutoffKind::White => {
            if t > 0.0 {
                0.5
            } else {
                0.0
            }
        }
        CutoffKind::Lorentzian => -0.5 * (-x).exp_m1(),
        CutoffKind::GaussianExp => 0.5 * erf(0.5 * x),
        CutoffKind::Exponential => x.atan() * FRAC_1_PI,
        CutoffKind::Heaviside => si(x) * FRAC_1_PI,
    }
}

/// Accumulated collapse factor `Λ(t)` [s] in closed form. Zero for `t ≤ 0`.
pub fn lambda_big(spec: &CutoffSpec, t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let Some(w) = spec.omega_m else {
        return 0.5 * t;
    };
    let x = w * t;
    match spec.kind {
        CutoffKind::White => unreachable!(),
        CutoffKind::Lorentzian => exp_m1_plus_x(x) / (2.0 * w),
        CutoffKind::Heaviside => {
            let half = 0.5 * x;
            let cos_m1 = -2.0 * half.sin() * half.sin();
            FRAC_1_PI * (cos_m1 / w + t * si(x))
        }
        CutoffKind::GaussianExp => {
            (-0.25 * x * x).exp_m1() / (w * PI.sqrt()) + 0.5 * t * erf(0.5 * x)
        }
        CutoffKind::Exponential => FRAC_1_PI * (t * x.atan() - (x * x).ln_1p() / (2.0 * w)),
    }
}

const OSCILLATION_PERIODS: usize = 2000;
const MAX_PERIODS: f64 = 2.0e6;

/// `Λ(t)` from the frequency integral, by adaptive quadrature.
///
/// Works in `u = ωt`: `Λ = (t/π) ∫₀^∞ g(u/a) · 2 sin²(u/2)/u² du` with `a = ω_M t`.
/// Integration runs panel by panel over 2000 periods of the cosine; the
/// non-oscillating part of the remaining tail is integrated exactly and the
/// oscillating remainder is `O(U⁻³)`, below 1e-12 relative. White noise is
/// accepted as the `a → ∞` case.
pub fn lambda_big_quadrature(spec: &CutoffSpec, t: f64, rel_tol: f64) -> Result<f64> {
    ensure_nonnegative("t", t)?;
    if !(1e-12..1.0).contains(&rel_tol) {
        return Err(Error::invalid("rel_tol", format!("must lie in [1e-12, 1), got {rel_tol}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = spec.cutoff() * t;
    let g = spec.kind.normalized();
    let kernel = move |u: f64| {
        if u == 0.0 {
            return 0.5;
        }
        let s = (0.5 * u).sin();
        let v = if a.is_finite() { g(u / a) } else { 1.0 };
        v * 2.0 * s * s / (u * u)
    };
    let cfg = QuadratureConfig::with_rel_tol(rel_tol * 0.1);

    let upper = if spec.kind == CutoffKind::Heaviside {
        if a / TAU > MAX_PERIODS {
            return Err(Error::QuadratureNonConvergence {
                error: f64::NAN,
                evaluations: 0,
            });
        }
        a
    } else {
        TAU * OSCILLATION_PERIODS as f64
    };

    let periods = (upper / TAU).ceil() as usize;
    let scale_points = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0]
        .into_iter()
        .map(|f| f * a)
        .chain([0.25, 0.5, 1.0, 2.0, PI])
        .chain((1..=periods).map(|k| TAU * k as f64));
    let points = breakpoints_within(0.0, upper, scale_points);
    let body = integrate(kernel, &points, &cfg)?.value;

    let tail = if spec.kind == CutoffKind::Heaviside {
        0.0
    } else {
        let smooth = move |u: f64| {
            let v = if a.is_finite() { g(u / a) } else { 1.0 };
            v / (u * u)
        };
        integrate_to_infinity(smooth, upper, &cfg)?.value
    };

    Ok(t * FRAC_1_PI * (body + tail))
}

/// `δ_γ(τ)` from its cosine-transform definition, by adaptive quadrature.
pub fn delta_gamma_quadrature(spec: &CutoffSpec, tau: f64, rel_tol: f64) -> Result<f64> {
    let Some(w) = spec.omega_m else {
        return Err(Error::WhiteNotPointwise);
    };
    let g = spec.kind.normalized();
    let b = w * tau.abs();
    let cfg = QuadratureConfig::with_rel_tol(rel_tol);

    let integral = if spec.kind == CutoffKind::Heaviside {
        let periods = (b / TAU).floor() as usize;
        let points = breakpoints_within(0.0, 1.0, (1..=periods).map(|k| TAU * k as f64 / b));
        integrate(|v| (b * v).cos(), &points, &cfg)?.value
    } else if b == 0.0 {
        integrate(g, &[0.0, 0.5, 1.0], &cfg)?.value + integrate_to_infinity(g, 1.0, &cfg)?.value
    } else {
        let reach = if spec.kind == CutoffKind::Lorentzian { 1e4 } else { 40.0 };
        let periods = ((b * reach / TAU).ceil() as usize).max(50);
        if periods as f64 > MAX_PERIODS {
            return Err(Error::QuadratureNonConvergence {
                error: f64::NAN,
                evaluations: 0,
            });
        }
        let upper = TAU * periods as f64 / b;
        let points = breakpoints_within(
            0.0,
            upper,
            [0.5, 1.0, 2.0].into_iter().chain((1..=periods).map(|k| TAU * k as f64 / b)),
        );
        integrate(|v| g(v) * (b * v).cos(), &points, &cfg)?.value
    };
    Ok(w * FRAC_1_PI * integral)
}
