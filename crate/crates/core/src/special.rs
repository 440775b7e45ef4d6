//! Sine integral and error function.
//!
//! Both use a convergent power series for small arguments and a continued
//! fraction for large ones; the switch points keep the series free of
//! serious cancellation and the continued fractions short.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_SQRT_PI, FRAC_PI_2, PI};

use crate::error::{Error, Result};

const SI_SERIES_LIMIT: f64 = 4.0;
const ERF_SERIES_LIMIT: f64 = 3.0;

/// Accuracy controls for the series and continued-fraction evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFunctionConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SpecialFunctionConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1000,
        }
    }
}

impl SpecialFunctionConfig {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1e-6) {
            return Err(Error::invalid("rel_tol", format!("must lie in (0, 1e-6), got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be positive"));
        }
        Ok(Self { rel_tol, max_terms })
    }

    // Iterations stop on this; the default rel_tol is an accuracy target, so
    // run to machine precision whenever the caller asks for 1e-12 or tighter.
    fn eps(&self) -> f64 {
        self.rel_tol.clamp(f64::EPSILON, 1e-15)
    }
}

/// Sine integral `Si(x) = ∫₀ˣ sin(u)/u du`.
pub fn si(x: f64) -> f64 {
    si_with(x, &SpecialFunctionConfig::default())
}

pub fn si_with(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -si_with(-x, cfg);
    }
    if x.is_infinite() {
        return FRAC_PI_2;
    }
    if x <= SI_SERIES_LIMIT {
        si_series(x, cfg)
    } else {
        si_continued_fraction(x, cfg)
    }
}

fn si_series(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    // Si(x) = Σ (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    let x2 = x * x;
    let mut power = x; // (-1)^k x^(2k+1) / (2k+1)!
    let mut sum = x;
    for k in 1..cfg.max_terms {
        let m = (2 * k) as f64;
        power *= -x2 / (m * (m + 1.0));
        let term = power / (m + 1.0);
        sum += term;
        if term.abs() <= cfg.eps() * sum.abs() {
            break;
        }
    }
    sum
}

fn si_continued_fraction(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    // Modified Lentz evaluation of E₁(ix); Si(x) = π/2 + Im(e^{-ix} · cf).
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..cfg.max_terms {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() <= cfg.eps() {
            break;
        }
    }
    let (s, co) = x.sin_cos();
    let h = h * Complex64::new(co, -s);
    FRAC_PI_2 + h.im
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    erf_with(x, &SpecialFunctionConfig::default())
}

pub fn erf_with(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf_with(-x, cfg);
    }
    if x < ERF_SERIES_LIMIT {
        erf_series(x, cfg)
    } else {
        1.0 - erfc_continued_fraction(x, cfg)
    }
}

/// Complementary error function `1 − erf(x)`, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    let cfg = SpecialFunctionConfig::default();
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= ERF_SERIES_LIMIT {
        erfc_continued_fraction(x, &cfg)
    } else {
        1.0 - erf_with(x, &cfg)
    }
}

fn erf_series(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    // erf(x) = 2/√π e^{-x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1)); all terms positive.
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..cfg.max_terms {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term <= cfg.eps() * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

fn erfc_continued_fraction(x: f64, cfg: &SpecialFunctionConfig) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    // erfc(x) = e^{-x²}/√π / (x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..cfg.max_terms {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() <= cfg.eps() {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Inverse error function on `(-1, 1)` by safeguarded Newton iteration.
pub fn erf_inv(p: f64) -> f64 {
    if p.is_nan() || p.abs() > 1.0 {
        return f64::NAN;
    }
    if p == 0.0 {
        return p;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p == -1.0 {
        return f64::NEG_INFINITY;
    }
    if p < 0.0 {
        return -erf_inv(-p);
    }
    let (mut lo, mut hi) = (0.0_f64, 6.0_f64);
    let mut x = 0.5;
    for _ in 0..100 {
        let f = erf(x) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / (FRAC_2_SQRT_PI * (-x * x).exp());
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * next.abs() {
            return next;
        }
        x = next;
    }
    x
}
