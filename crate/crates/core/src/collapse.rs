//! Decay exponent `Γ(t)` of the off-diagonal density-matrix elements for a
//! factorized noise correlator.
//!
//! Only the diagonal (same-particle) terms of the pair sum are kept; the
//! cross terms between distinct particles oscillate and are dropped. In the
//! small-displacement regime this gives
//!
//! ```text
//! Γ(t) = λ Λ(t) Σ_s n_s² N_s Δ_s² / (2 r_C²)
//! ```

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::constants::{ELEMENTARY_CHARGE, NUCLEON_MASS};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::noise_mc::{stream_rng, McEstimate};
use crate::scenarios::MeasurementScenario;
use crate::spectral::{lambda_big, CutoffSpec};

/// CSL parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseParams {
    /// Collapse rate λ [1/s].
    pub lambda: f64,
    /// Correlation length r_C [m].
    pub r_c: f64,
    /// Nucleon mass reference m₀ [kg].
    pub m0: f64,
}

impl Default for CollapseParams {
    fn default() -> Self {
        Self {
            lambda: 1e-8,
            r_c: 1e-7,
            m0: NUCLEON_MASS,
        }
    }
}

impl CollapseParams {
    pub fn new(lambda: f64, r_c: f64) -> Result<Self> {
        let p = Self {
            lambda,
            r_c,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("lambda", self.lambda)?;
        ensure_positive("r_c", self.r_c)?;
        ensure_positive("m0", self.m0)
    }

    /// Largest displacement for which the small-displacement form is trusted.
    pub fn displacement_limit(&self) -> f64 {
        self.r_c / 10.0
    }
}

/// A population of identical particles moved by the same distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacedSpecies {
    pub name: String,
    /// Nucleons per particle (63.5 for natural copper, hence not an integer).
    pub n: f64,
    /// Number of displaced particles N.
    pub count: f64,
    /// Displacement Δ [m].
    pub displacement: f64,
}

impl DisplacedSpecies {
    pub fn new(name: impl Into<String>, n: f64, count: f64, displacement: f64) -> Self {
        Self {
            name: name.into(),
            n,
            count,
            displacement,
        }
    }
}

/// `Γ(t)` for point-like particles in the diagonal approximation.
pub fn gamma_point(
    params: &CollapseParams,
    spec: &CutoffSpec,
    species: &[DisplacedSpecies],
    t: f64,
) -> Result<f64> {
    params.validate()?;
    ensure_nonnegative("t", t)?;
    let limit = params.displacement_limit();
    let mut weight = 0.0;
    for s in species {
        ensure_positive("n", s.n)?;
        ensure_nonnegative("count", s.count)?;
        ensure_nonnegative("displacement", s.displacement)?;
        if s.displacement >= limit {
            return Err(Error::DisplacementTooLarge {
                species: s.name.clone(),
                displacement: s.displacement,
                limit,
            });
        }
        weight += s.n * s.n * s.count * s.displacement * s.displacement;
    }
    Ok(params.lambda * lambda_big(spec, t) * weight / (2.0 * params.r_c * params.r_c))
}

/// Number of ions moved through an electrolyte of thickness `h` by a current,
/// `N = (I/e) h / v`.
pub fn ions_displaced(i_electric: f64, h: f64, v: f64) -> Result<f64> {
    ensure_positive("i_electric", i_electric)?;
    ensure_positive("h", h)?;
    ensure_positive("v", v)?;
    Ok(i_electric / ELEMENTARY_CHARGE * h / v)
}

/// Coefficient `C` in `Γ(t) = C t² Λ(t)` for the battery transport of a scenario.
///
/// Each species contributes `n² N Δ² = n² (I_p h / v_s)(v_s t)² = n² I_p h v_s t²`,
/// where `I_p = I/e` is the particle current.
pub fn current_prefactor(params: &CollapseParams, scenario: &MeasurementScenario) -> f64 {
    let battery = &scenario.battery;
    let particle_current = scenario.particle_current();
    let weight: f64 = battery
        .species
        .iter()
        .map(|s| s.nucleons * s.nucleons * battery.velocity_of(s))
        .sum();
    params.lambda * weight * particle_current * battery.h_electrolyte / (2.0 * params.r_c * params.r_c)
}

/// `Γ(t)` driven by the battery current of `scenario`; the ion displacement
/// `Δ = v t` grows with time, so `Γ ∝ t³` for white noise.
pub fn gamma_current(
    params: &CollapseParams,
    spec: &CutoffSpec,
    scenario: &MeasurementScenario,
    t: f64,
) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    current_prefactor(params, scenario) * t * t * lambda_big(spec, t)
}

/// `K` in the white-noise cubic law `Γ(t) = K t³`.
pub fn white_cubic_coefficient(params: &CollapseParams, scenario: &MeasurementScenario) -> f64 {
    0.5 * current_prefactor(params, scenario)
}

/// Sphere bracket `e^{−y} − 1 + (y/2)(e^{−y} + 1)` divided by `y³/6`, `y = R²/r_C²`.
///
/// The bracket vanishes like `y³/12`; below `y = 0.5` it is summed as a series
/// to avoid the cancellation of order-one terms.
fn sphere_bracket_scaled(y: f64) -> f64 {
    if y < 0.5 {
        // 6/y³ Σ_{k≥3} (−1)^{k+1} (k−2)/(2 k!) y^k = Σ_{k≥3} (−1)^{k+1} 3(k−2)/k! y^{k−3}
        let mut inv_fact = 1.0 / 6.0;
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 3..60 {
            if k > 3 {
                inv_fact /= k as f64;
                power *= -y;
            }
            let term = 3.0 * (k - 2) as f64 * inv_fact * power;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let e = (-y).exp();
        6.0 * (e - 1.0 + 0.5 * y * (e + 1.0)) / (y * y * y)
    }
}

/// `∫ d³k e^{−r_C² k²} k_x² |μ(k)|²` for a uniform sphere of radius `R`,
/// with `μ` normalized to `μ(0) = 1` [1/m⁵].
pub fn sphere_form_factor(radius: f64, r_c: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    ensure_positive("r_c", r_c)?;
    let y = (radius / r_c).powi(2);
    Ok(PI.powf(1.5) / r_c.powi(5) * sphere_bracket_scaled(y))
}

/// Fourier transform of a uniform unit-mass sphere at `q = kR`.
fn sphere_transform(q: f64) -> f64 {
    if q < 1e-2 {
        let q2 = q * q;
        1.0 - q2 / 10.0 + q2 * q2 / 280.0
    } else {
        3.0 * (q.sin() - q * q.cos()) / (q * q * q)
    }
}

const MC_CHUNKS: u64 = 64;

/// Monte-Carlo estimate of [`sphere_form_factor`]: `k` is drawn from the
/// Gaussian weight `e^{−r_C² k²}` and the remaining `k_x² μ²` averaged.
///
/// Samples are split into fixed chunks with one random stream each, so the
/// result depends only on `(seed, samples)`.
pub fn sphere_form_factor_mc(radius: f64, r_c: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    ensure_positive("radius", radius)?;
    ensure_positive("r_c", r_c)?;
    if samples < 2 {
        return Err(Error::invalid("samples", "need at least two"));
    }
    let sigma = 1.0 / (2f64.sqrt() * r_c);
    let norm = (PI / (r_c * r_c)).powf(1.5);
    let per_chunk = samples.div_ceil(MC_CHUNKS as usize);
    let partial: Vec<(f64, f64, usize)> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk as usize * per_chunk;
            let n = per_chunk.min(samples.saturating_sub(start));
            let mut rng = stream_rng(seed, chunk);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let kx: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
                let ky: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
                let kz: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
                let k = (kx * kx + ky * ky + kz * kz).sqrt();
                let mu = sphere_transform(k * radius);
                let v = norm * kx * kx * mu * mu;
                s1 += v;
                s2 += v * v;
            }
            (s1, s2, n)
        })
        .collect();
    Ok(McEstimate::from_moments(
        partial.iter().map(|p| p.0).sum(),
        partial.iter().map(|p| p.1).sum(),
        partial.iter().map(|p| p.2).sum(),
    ))
}

/// `Γ(t)` for `count` identical uniform spheres of `n` nucleons and radius
/// `radius`, each displaced by `delta`. Reduces to [`gamma_point`] as `R → 0`.
#[allow(clippy::too_many_arguments)]
pub fn gamma_sphere(
    params: &CollapseParams,
    spec: &CutoffSpec,
    n: f64,
    count: f64,
    radius: f64,
    delta: f64,
    t: f64,
) -> Result<f64> {
    params.validate()?;
    ensure_nonnegative("t", t)?;
    ensure_positive("n", n)?;
    ensure_nonnegative("count", count)?;
    ensure_nonnegative("delta", delta)?;
    let limit = params.displacement_limit();
    if delta >= limit {
        return Err(Error::DisplacementTooLarge {
            species: "sphere".into(),
            displacement: delta,
            limit,
        });
    }
    let form = sphere_form_factor(radius, params.r_c)?;
    // m = n m₀, so m²/m₀² = n².
    Ok(count * params.lambda * params.r_c.powi(3) * n * n * delta * delta * lambda_big(spec, t) * form
        / PI.powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::MeasurementScenario;
    use approx::assert_relative_eq;

    #[test]
    fn point_examples() {
        let p = CollapseParams::default();
        let cu = [DisplacedSpecies::new("Cu", 63.5, 2.67e21, 4e-22)];
        let g = gamma_point(&p, &CutoffSpec::white(), &cu, 1e-8).unwrap();
        assert_relative_eq!(g, 4.3e-21, max_relative = 0.01);
        assert_eq!(gamma_point(&p, &CutoffSpec::white(), &cu, 0.0).unwrap(), 0.0);

        let one = [DisplacedSpecies::new("nucleon", 1.0, 1.0, 1e-9)];
        let g = gamma_point(&p, &CutoffSpec::white(), &one, 1.0).unwrap();
        assert_relative_eq!(g, 2.5e-13, max_relative = 1e-12);
    }

    #[test]
    fn point_is_additive_over_species() {
        let p = CollapseParams::default();
        let spec = CutoffSpec::lorentzian(1e5);
        let a = DisplacedSpecies::new("a", 7.0, 1e10, 1e-12);
        let b = DisplacedSpecies::new("b", 145.0, 3e9, 2e-12);
        let both = gamma_point(&p, &spec, &[a.clone(), b.clone()], 1e-5).unwrap();
        let sep = gamma_point(&p, &spec, &[a], 1e-5).unwrap() + gamma_point(&p, &spec, &[b], 1e-5).unwrap();
        assert_relative_eq!(both, sep, max_relative = 1e-14);
    }

    #[test]
    fn large_displacement_rejected() {
        let p = CollapseParams::default();
        let s = [DisplacedSpecies::new("x", 1.0, 1.0, 1e-8)];
        assert!(matches!(
            gamma_point(&p, &CutoffSpec::white(), &s, 1.0),
            Err(Error::DisplacementTooLarge { .. })
        ));
    }

    #[test]
    fn ion_counts() {
        assert_relative_eq!(ions_displaced(2e-3, 1e-4, 2.8e-7).unwrap(), 4.46e18, max_relative = 1e-3);
        assert_relative_eq!(ions_displaced(0.5, 1e-4, 2.8e-7).unwrap(), 1.11e21, max_relative = 1e-2);
        assert_relative_eq!(ions_displaced(13.8e-3, 1e-4, 2.8e-7).unwrap(), 3.08e19, max_relative = 1e-2);
        assert!(ions_displaced(0.0, 1e-4, 2.8e-7).is_err());
    }

    #[test]
    fn current_examples() {
        let p = CollapseParams::default();
        let flash = MeasurementScenario::preset("flash-500mA").unwrap();
        let white = CutoffSpec::white();
        assert_eq!(gamma_current(&p, &white, &flash, 0.0), 0.0);
        // Closed-form inversion of the cubic law.
        let k = white_cubic_coefficient(&p, &flash);
        let t = (1.0 / k).cbrt();
        assert_relative_eq!(t, 1.295e-6, max_relative = 1e-3);
        assert_relative_eq!(gamma_current(&p, &white, &flash, t), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_current(&p, &white, &flash, 1.295e-6), 1.0, max_relative = 1e-3);
    }

    #[test]
    fn white_current_is_cubic() {
        let p = CollapseParams::default();
        let s = MeasurementScenario::preset("nand-13.8mA").unwrap();
        let k = white_cubic_coefficient(&p, &s);
        // K recomputed by hand from its definition.
        let ip = 13.8e-3 / ELEMENTARY_CHARGE;
        let k_hand = 1e-8 * (49.0 + 145.0 * 145.0) * ip * 1e-4 * 2.8e-7 / (4.0 * 1e-14);
        assert_relative_eq!(k, k_hand, max_relative = 1e-14);
        for &t in &[1e-7, 1e-6, 1e-5] {
            let g = gamma_current(&p, &CutoffSpec::white(), &s, t);
            assert_relative_eq!(g, k * t * t * t, max_relative = 1e-12);
        }
    }

    #[test]
    fn anion_momentum_correction_factor() {
        let p = CollapseParams::default();
        let s = MeasurementScenario::preset("flash-500mA").unwrap();
        let mut corrected = s.clone();
        corrected.battery = corrected.battery.with_momentum_corrected_anion();
        let ratio = (white_cubic_coefficient(&p, &s) / white_cubic_coefficient(&p, &corrected)).cbrt();
        assert!((ratio - 2.7).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn sphere_bracket_series_matches_direct_form() {
        for &y in &[0.3f64, 0.45, 0.499] {
            let e = (-y).exp();
            let direct = 6.0 * (e - 1.0 + 0.5 * y * (e + 1.0)) / (y * y * y);
            assert_relative_eq!(sphere_bracket_scaled(y), direct, max_relative = 1e-9);
        }
        // Continuity at the switch point.
        assert_relative_eq!(sphere_bracket_scaled(0.5 - 1e-12), sphere_bracket_scaled(0.5), max_relative = 1e-10);
    }

    #[test]
    fn sphere_small_radius_limit() {
        let rc = 1e-7;
        let ff = sphere_form_factor(1e-3 * rc, rc).unwrap();
        assert_relative_eq!(ff, PI.powf(1.5) / (2.0 * rc.powi(5)), max_relative = 1e-6);
    }

    #[test]
    fn sphere_at_r_c() {
        let rc: f64 = 1e-7;
        let e1 = (-1f64).exp();
        let bracket = e1 - 1.0 + 0.5 * (e1 + 1.0);
        assert_relative_eq!(bracket, 0.051_819_16, max_relative = 1e-6);
        let expected = PI.powf(1.5) / rc.powi(5) * bracket * 6.0;
        assert_relative_eq!(sphere_form_factor(rc, rc).unwrap(), expected, max_relative = 1e-14);
        assert!(sphere_form_factor(3.0 * rc, rc).unwrap() < sphere_form_factor(rc, rc).unwrap());
    }

    #[test]
    fn sphere_reduces_to_point() {
        let p = CollapseParams::default();
        let spec = CutoffSpec::lorentzian(1e6);
        let point = gamma_point(&p, &spec, &[DisplacedSpecies::new("x", 7.0, 3.0, 1e-16)], 1e-4).unwrap();
        let sphere = gamma_sphere(&p, &spec, 7.0, 3.0, 1e-12, 1e-16, 1e-4).unwrap();
        assert_relative_eq!(sphere, point, max_relative = 1e-6);
        assert_eq!(gamma_sphere(&p, &spec, 7.0, 3.0, 1e-12, 1e-16, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sphere_at_tenth_of_r_c() {
        let p = CollapseParams::default();
        let white = CutoffSpec::white();
        let r = p.r_c / 10.0;
        let point = gamma_point(&p, &white, &[DisplacedSpecies::new("x", 7.0, 1.0, 1e-16)], 1e-4).unwrap();
        let sphere = gamma_sphere(&p, &white, 7.0, 1.0, r, 1e-16, 1e-4).unwrap();
        let y: f64 = 0.01;
        let e = (-y).exp();
        let bracket = e - 1.0 + 0.5 * y * (e + 1.0);
        // Series of the ratio: 1 − y/2 + 3y²/20 + O(y³)
        assert_relative_eq!(sphere / point, 1.0 - y / 2.0 + 0.15 * y * y, max_relative = 1e-6);
        assert_relative_eq!(sphere / point, 12.0 * bracket / y.powi(3), max_relative = 1e-6);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = sphere_form_factor_mc(1e-7, 1e-7, 10_000, 7).unwrap();
        let b = sphere_form_factor_mc(1e-7, 1e-7, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 10_000);
    }
}
