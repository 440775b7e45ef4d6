//! Monte-Carlo noise sampler: an independent check on the analytic Λ and Ĩ.
//!
//! The noise is taken to be a stationary Gaussian process with correlator
//! `δ_γ`. Lorentzian noise is an Ornstein–Uhlenbeck process and is sampled by
//! its exact autoregressive discretization; every other kernel goes through
//! random-phase spectral synthesis.
//!
//! Randomness: trajectory `i` of an ensemble with seed `s` draws from the
//! ChaCha8 stream `i` of the generator seeded by `s` (see [`stream_rng`]), so
//! results do not depend on how the ensemble is split across threads.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::fluctuations::i_tilde;
use crate::special::erf_inv;
use crate::spectral::{delta_gamma, gamma_of_omega, lambda_big, CutoffKind, CutoffSpec};

/// Random stream `index` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Mean and standard error of independent draws.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean,
            std_error,
            samples: n,
        }
    }

    /// From the sum and sum of squares of `n` independent draws.
    pub fn from_moments(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let std_error = if n > 1 {
            ((sum_sq - sum * mean).max(0.0) / (nf - 1.0) / nf).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean,
            std_error,
            samples: n,
        }
    }

    /// `(mean − value) / std_error`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.std_error
    }

    pub fn within_sigma(&self, value: f64, k: f64) -> bool {
        self.z_score(value).abs() <= k
    }
}

/// A sampled noise path `ξ(k·dt)`, `k = 0..values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory {
    pub dt: f64,
    /// [s^{−1/2}]
    pub values: Vec<f64>,
    pub seed: u64,
    pub spec: CutoffSpec,
}

impl NoiseTrajectory {
    /// Time covered, `dt·(len − 1)`.
    pub fn horizon(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    /// `ξ̄` over the whole horizon by the trapezoidal rule.
    pub fn time_average(&self) -> f64 {
        trapezoid_mean(&self.values)
    }

    /// Writes `index,time,value` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,time,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{k},{:.8e},{:.8e}", k as f64 * self.dt, v)?;
        }
        Ok(())
    }
}

fn trapezoid_mean(values: &[f64]) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    (inner + 0.5 * (values[0] + values[n - 1])) / (n - 1) as f64
}

/// Largest `ω·dt` the samplers accept.
pub const MAX_RESOLUTION: f64 = 0.1;

fn check_grid(dt: f64, steps: usize) -> Result<()> {
    ensure_positive("dt", dt)?;
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    Ok(())
}

fn lorentzian_path<R: Rng>(omega_m: f64, dt: f64, steps: usize, rng: &mut R) -> Vec<f64> {
    let variance = omega_m / 2.0;
    let alpha = (-omega_m * dt).exp();
    // 1 − α² without cancellation for small ω·dt.
    let kick = (variance * -(-2.0 * omega_m * dt).exp_m1()).sqrt();
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = variance.sqrt() * rng.sample::<f64, _>(StandardNormal);
    values.push(x);
    for _ in 0..steps {
        x = alpha * x + kick * rng.sample::<f64, _>(StandardNormal);
        values.push(x);
    }
    values
}

/// Lorentzian noise on `steps + 1` points, started from the stationary law.
pub fn sample_lorentzian(omega_m: f64, dt: f64, steps: usize, seed: u64) -> Result<NoiseTrajectory> {
    let spec = CutoffSpec::new(CutoffKind::Lorentzian, omega_m)?;
    check_grid(dt, steps)?;
    if omega_m * dt > MAX_RESOLUTION {
        return Err(Error::ResolutionTooCoarse { product: omega_m * dt });
    }
    let mut rng = stream_rng(seed, 0);
    Ok(NoiseTrajectory {
        dt,
        values: lorentzian_path(omega_m, dt, steps, &mut rng),
        seed,
        spec,
    })
}

/// Frequency below which 99.9% of `∫₀^∞ γ` lies.
pub fn spectral_cutoff(spec: &CutoffSpec) -> Result<f64> {
    let w = spec.omega_m().ok_or(Error::WhiteNotSamplable)?;
    Ok(match spec.kind() {
        CutoffKind::White => unreachable!(),
        CutoffKind::Heaviside => w,
        CutoffKind::Lorentzian => w * (0.999 * PI / 2.0).tan(),
        CutoffKind::GaussianExp => w * erf_inv(0.999),
        CutoffKind::Exponential => w * 1000f64.ln(),
    })
}

struct ModeGrid {
    omegas: Vec<f64>,
    amplitudes: Vec<f64>,
}

fn mode_grid(spec: &CutoffSpec, n_modes: usize) -> Result<ModeGrid> {
    let omega_max = spectral_cutoff(spec)?;
    if n_modes == 0 {
        return Err(Error::invalid("n_modes", "need at least one mode"));
    }
    let d_omega = omega_max / n_modes as f64;
    let omegas: Vec<f64> = (0..n_modes).map(|m| (m as f64 + 0.5) * d_omega).collect();
    let amplitudes = omegas
        .iter()
        .map(|&w| (gamma_of_omega(spec, w) * d_omega / PI).sqrt())
        .collect();
    Ok(ModeGrid { omegas, amplitudes })
}

fn spectral_path<R: Rng>(grid: &ModeGrid, dt: f64, steps: usize, rng: &mut R) -> Vec<f64> {
    let mut values = vec![0.0; steps + 1];
    for (&w, &c) in grid.omegas.iter().zip(&grid.amplitudes) {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        // Advance (cos ωt, sin ωt) by rotation; renormalized at each step.
        let (sr, cr) = (w * dt).sin_cos();
        let (mut c_t, mut s_t) = (1.0, 0.0);
        for v in values.iter_mut() {
            *v += c * (a * c_t + b * s_t);
            let next_c = c_t * cr - s_t * sr;
            let next_s = s_t * cr + c_t * sr;
            let norm = (next_c * next_c + next_s * next_s).sqrt();
            c_t = next_c / norm;
            s_t = next_s / norm;
        }
    }
    values
}

/// Noise on `steps + 1` points as a sum of `n_modes` random-phase cosines.
///
/// Mode `m` sits at `(m + ½)Δω` with `Δω = ω_max/n_modes`. The sampled
/// correlator is the midpoint rule for `δ_γ` truncated at `ω_max`; it repeats
/// with period `4π/Δω`, so keep `Δω·horizon ≪ 1`.
pub fn sample_spectral(
    spec: &CutoffSpec,
    dt: f64,
    steps: usize,
    n_modes: usize,
    seed: u64,
) -> Result<NoiseTrajectory> {
    let grid = mode_grid(spec, n_modes)?;
    check_grid(dt, steps)?;
    let mut rng = stream_rng(seed, 0);
    Ok(NoiseTrajectory {
        dt,
        values: spectral_path(&grid, dt, steps, &mut rng),
        seed,
        spec: *spec,
    })
}

/// How one ensemble member over `[0, t]` is drawn.
enum Sampler {
    Lorentzian { omega_m: f64, dt: f64, steps: usize },
    Spectral { grid: ModeGrid, dt: f64, steps: usize },
}

impl Sampler {
    fn for_horizon(spec: &CutoffSpec, t: f64) -> Result<Self> {
        ensure_positive("t", t)?;
        let w = spec.omega_m().ok_or(Error::WhiteNotSamplable)?;
        if spec.kind() == CutoffKind::Lorentzian {
            let steps = ((20.0 * w * t).ceil() as usize).max(20);
            return Ok(Sampler::Lorentzian {
                omega_m: w,
                dt: t / steps as f64,
                steps,
            });
        }
        let omega_max = spectral_cutoff(spec)?;
        let steps = ((10.0 * omega_max * t).ceil() as usize).max(20);
        let n_modes = ((omega_max * t / 0.05).ceil() as usize).max(64);
        Ok(Sampler::Spectral {
            grid: mode_grid(spec, n_modes)?,
            dt: t / steps as f64,
            steps,
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Sampler::Lorentzian { omega_m, dt, steps } => lorentzian_path(*omega_m, *dt, *steps, rng),
            Sampler::Spectral { grid, dt, steps } => spectral_path(grid, *dt, *steps, rng),
        }
    }
}

fn ensemble<F>(spec: &CutoffSpec, t: f64, ensemble_size: usize, seed: u64, statistic: F) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if ensemble_size < 2 {
        return Err(Error::invalid("ensemble_size", "need at least two trajectories"));
    }
    let sampler = Sampler::for_horizon(spec, t)?;
    let values: Vec<f64> = (0..ensemble_size as u64)
        .into_par_iter()
        .map(|i| statistic(&sampler.draw(&mut stream_rng(seed, i))))
        .collect();
    Ok(McEstimate::from_samples(&values))
}

/// `Λ(t) = (t²/2)·E[ξ̄(t)²]` from `ensemble_size` trajectories.
pub fn estimate_lambda(spec: &CutoffSpec, t: f64, ensemble_size: usize, seed: u64) -> Result<McEstimate> {
    ensemble(spec, t, ensemble_size, seed, |path| {
        let avg = trapezoid_mean(path);
        0.5 * t * t * avg * avg
    })
}

/// `Ĩ(t) = E[ξ(t)·ξ̄(t)]` from `ensemble_size` trajectories.
pub fn estimate_i(spec: &CutoffSpec, t: f64, ensemble_size: usize, seed: u64) -> Result<McEstimate> {
    ensemble(spec, t, ensemble_size, seed, |path| path[path.len() - 1] * trapezoid_mean(path))
}

fn spectral_values_at<R: Rng>(grid: &ModeGrid, times: &[f64], rng: &mut R) -> Vec<f64> {
    let mut values = vec![0.0; times.len()];
    for (&w, &c) in grid.omegas.iter().zip(&grid.amplitudes) {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        for (v, &t) in values.iter_mut().zip(times) {
            let (s, co) = (w * t).sin_cos();
            *v += c * (a * co + b * s);
        }
    }
    values
}

/// `E[ξ(0)ξ(τ)]` of spectrally synthesized noise for each `τ` in `lags`,
/// estimated across `ensemble_size` independent realizations.
pub fn spectral_autocovariance(
    spec: &CutoffSpec,
    lags: &[f64],
    n_modes: usize,
    ensemble_size: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let grid = mode_grid(spec, n_modes)?;
    if ensemble_size < 2 {
        return Err(Error::invalid("ensemble_size", "need at least two realizations"));
    }
    if lags.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::invalid("lags", "must be >= 0"));
    }
    let mut times = Vec::with_capacity(lags.len() + 1);
    times.push(0.0);
    times.extend_from_slice(lags);
    let products: Vec<Vec<f64>> = (0..ensemble_size as u64)
        .into_par_iter()
        .map(|i| {
            let x = spectral_values_at(&grid, &times, &mut stream_rng(seed, i));
            x[1..].iter().map(|v| x[0] * v).collect()
        })
        .collect();
    Ok((0..lags.len())
        .map(|j| McEstimate::from_samples(&products.iter().map(|p| p[j]).collect::<Vec<_>>()))
        .collect())
}

/// Batches used by [`autocovariance`] for its standard error.
const BATCHES: usize = 100;

/// Lag-`lag` autocovariance `⟨ξ_k ξ_{k+lag}⟩` along one zero-mean trajectory,
/// with a batch-means standard error.
pub fn autocovariance(values: &[f64], lag: usize) -> Result<McEstimate> {
    if values.len() < lag + 2 * BATCHES {
        return Err(Error::invalid("lag", "trajectory too short for this lag"));
    }
    let n = values.len() - lag;
    let per_batch = n / BATCHES;
    let means: Vec<f64> = (0..BATCHES)
        .map(|b| {
            let range = b * per_batch..(b + 1) * per_batch;
            range.clone().map(|k| values[k] * values[k + lag]).sum::<f64>() / range.len() as f64
        })
        .collect();
    let mut est = McEstimate::from_samples(&means);
    est.samples = per_batch * BATCHES;
    Ok(est)
}

/// Which analytic quantity a cell checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Lambda,
    ITilde,
}

/// One preregistered `(kind, ω_M, t)` comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCell {
    pub kind: CutoffKind,
    pub omega_m: f64,
    pub t: f64,
    pub estimator: Estimator,
}

/// The ten cells of the oracle suite, fixed ahead of any run.
pub const ORACLE_CELLS: [OracleCell; 10] = [
    OracleCell { kind: CutoffKind::Lorentzian, omega_m: 1e4, t: 1e-4, estimator: Estimator::Lambda },
    OracleCell { kind: CutoffKind::Lorentzian, omega_m: 1e4, t: 3e-4, estimator: Estimator::ITilde },
    OracleCell { kind: CutoffKind::Lorentzian, omega_m: 1e6, t: 1e-7, estimator: Estimator::Lambda },
    OracleCell { kind: CutoffKind::Lorentzian, omega_m: 1e4, t: 1e-3, estimator: Estimator::ITilde },
    OracleCell { kind: CutoffKind::GaussianExp, omega_m: 1e4, t: 1e-4, estimator: Estimator::Lambda },
    OracleCell { kind: CutoffKind::GaussianExp, omega_m: 1e4, t: 3e-4, estimator: Estimator::ITilde },
    OracleCell { kind: CutoffKind::Exponential, omega_m: 1e4, t: 1e-4, estimator: Estimator::Lambda },
    OracleCell { kind: CutoffKind::Exponential, omega_m: 1e4, t: 3e-5, estimator: Estimator::ITilde },
    OracleCell { kind: CutoffKind::Heaviside, omega_m: 1e4, t: 1e-4, estimator: Estimator::Lambda },
    OracleCell { kind: CutoffKind::Heaviside, omega_m: 1e4, t: 3e-4, estimator: Estimator::ITilde },
];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub label: String,
    pub estimate: McEstimate,
    pub analytic: f64,
    pub passed: bool,
}

impl OracleOutcome {
    fn new(label: String, estimate: McEstimate, analytic: f64) -> Self {
        let passed = estimate.within_sigma(analytic, 3.0);
        Self {
            label,
            estimate,
            analytic,
            passed,
        }
    }

    pub fn z_score(&self) -> f64 {
        self.estimate.z_score(self.analytic)
    }
}

/// Runs one cell with its own seed, `seed + index`.
pub fn run_cell(cell: &OracleCell, ensemble_size: usize, seed: u64) -> Result<OracleOutcome> {
    let spec = CutoffSpec::new(cell.kind, cell.omega_m)?;
    let (name, estimate, analytic) = match cell.estimator {
        Estimator::Lambda => ("Lambda", estimate_lambda(&spec, cell.t, ensemble_size, seed)?, lambda_big(&spec, cell.t)),
        Estimator::ITilde => ("I~", estimate_i(&spec, cell.t, ensemble_size, seed)?, i_tilde(&spec, cell.t)?),
    };
    let label = format!("{name} {} omega_m={:e} t={:e}", cell.kind, cell.omega_m, cell.t);
    Ok(OracleOutcome::new(label, estimate, analytic))
}

/// All preregistered cells; cell `j` uses seed `seed + j`.
pub fn run_oracle_cells(ensemble_size: usize, seed: u64) -> Result<Vec<OracleOutcome>> {
    ORACLE_CELLS
        .iter()
        .enumerate()
        .map(|(j, cell)| run_cell(cell, ensemble_size, seed.wrapping_add(j as u64)))
        .collect()
}

/// Variance and lag correlations of one long Lorentzian path at `k·dt ∈ {0, 1/ω_M, 3/ω_M}`,
/// against `(ω_M/2)·e^{−ω_M k dt}`.
pub fn lorentzian_sampler_checks(omega_m: f64, dt: f64, steps: usize, seed: u64) -> Result<Vec<OracleOutcome>> {
    let path = sample_lorentzian(omega_m, dt, steps, seed)?;
    let spec = path.spec;
    [0.0, 1.0, 3.0]
        .iter()
        .map(|&lag_time| {
            let lag = (lag_time / (omega_m * dt)).round() as usize;
            let est = autocovariance(&path.values, lag)?;
            let analytic = delta_gamma(&spec, lag as f64 * dt)?;
            Ok(OracleOutcome::new(format!("Lorentzian autocovariance omega_m*tau={lag_time}"), est, analytic))
        })
        .collect()
}
