//! TOML run configuration. Every key is optional and falls back to the
//! built-in default; command-line flags override both.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use csl_cutoff::bounds::SolverConfig;
use csl_cutoff::collapse::CollapseParams;
use csl_cutoff::scenarios::{MeasurementScenario, MeasurementTimeMode};
use csl_cutoff::CutoffKind;

use crate::CliError;

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "CSL_CUTOFF_CONFIG";

/// Largest cutoff shown for the Lorentzian curves; marks where bulk heating
/// excludes the cutoff range. Emitted as metadata, never computed.
pub const DEFAULT_BULK_HEATING_BOUND: f64 = 4e10;

pub const DEFAULT_SEED: u64 = 0x5EED_2024;
pub const DEFAULT_ENSEMBLE: usize = 10_000;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub collapse: CollapseSection,
    pub cutoff: CutoffSection,
    pub scenario: ScenarioSection,
    pub solver: SolverSection,
    pub mc: McSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseSection {
    pub lambda: Option<f64>,
    pub r_c: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffSection {
    pub kind: Option<CutoffKind>,
    pub omega_m: Option<f64>,
    pub threshold: Option<f64>,
    pub bulk_heating_bound: Option<f64>,
    pub t_grid: Option<String>,
    pub omega_grid: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub preset: Option<String>,
    pub i_electric: Option<f64>,
    pub t_detect: Option<f64>,
    pub t_amplify: Option<f64>,
    pub t_record: Option<f64>,
    pub t_pulse: Option<f64>,
    pub time_mode: Option<MeasurementTimeMode>,
    pub v_drift: Option<f64>,
    pub h_electrolyte: Option<f64>,
    pub momentum_corrected_anion: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub rel_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub growth_factor: Option<f64>,
    pub t_floor: Option<f64>,
    pub t_ceiling: Option<f64>,
    pub omega_floor: Option<f64>,
    pub omega_ceiling: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub ensemble: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// The file named by `explicit`, else by the environment, else nothing.
    pub fn discover(explicit: Option<&Path>) -> Result<Self, CliError> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(path) => Self::load(&path),
            None => Ok(Self::default()),
        }
    }

    pub fn collapse_params(&self) -> Result<CollapseParams, CliError> {
        let d = CollapseParams::default();
        Ok(CollapseParams::new(
            self.collapse.lambda.unwrap_or(d.lambda),
            self.collapse.r_c.unwrap_or(d.r_c),
        )?)
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let d = SolverConfig::default();
        let s = &self.solver;
        let cfg = SolverConfig {
            rel_tol: s.rel_tol.unwrap_or(d.rel_tol),
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            growth_factor: s.growth_factor.unwrap_or(d.growth_factor),
            t_floor: s.t_floor.unwrap_or(d.t_floor),
            t_ceiling: s.t_ceiling.unwrap_or(d.t_ceiling),
            omega_floor: s.omega_floor.unwrap_or(d.omega_floor),
            omega_ceiling: s.omega_ceiling.unwrap_or(d.omega_ceiling),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn bulk_heating_bound(&self) -> f64 {
        self.cutoff.bulk_heating_bound.unwrap_or(DEFAULT_BULK_HEATING_BOUND)
    }

    pub fn seed(&self) -> u64 {
        self.mc.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn ensemble(&self) -> usize {
        self.mc.ensemble.unwrap_or(DEFAULT_ENSEMBLE)
    }

    /// Presets to run: the flag if given, else the file's preset, else `fallback`.
    pub fn preset_names(&self, flag: Option<&str>, fallback: &[&str]) -> Vec<String> {
        match flag.or(self.scenario.preset.as_deref()) {
            Some(name) => vec![name.to_string()],
            None => fallback.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// A preset with every override from the file, then `current`, applied.
    pub fn scenario(&self, preset: &str, current: Option<f64>) -> Result<MeasurementScenario, CliError> {
        let s = &self.scenario;
        let mut sc = MeasurementScenario::preset(preset)?;
        sc.i_electric = current.or(s.i_electric).unwrap_or(sc.i_electric);
        sc.t_detect = s.t_detect.unwrap_or(sc.t_detect);
        sc.t_amplify = s.t_amplify.unwrap_or(sc.t_amplify);
        sc.t_record = s.t_record.unwrap_or(sc.t_record);
        sc.t_pulse = s.t_pulse.unwrap_or(sc.t_pulse);
        sc.time_mode = s.time_mode.unwrap_or(sc.time_mode);
        sc.battery.v_drift = s.v_drift.unwrap_or(sc.battery.v_drift);
        sc.battery.h_electrolyte = s.h_electrolyte.unwrap_or(sc.battery.h_electrolyte);
        if s.momentum_corrected_anion.unwrap_or(false) {
            sc.battery = sc.battery.with_momentum_corrected_anion();
        }
        sc.validate()?;
        Ok(sc)
    }
}
