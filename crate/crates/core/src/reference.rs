//! Published figures for the default setup next to the values this crate
//! computes for them.

use std::fmt;

use crate::bounds::{cutoff_lower_bound, fluctuation_bound, lambda_rescale, scenario_collapse_time, SolverConfig};
use crate::collapse::CollapseParams;
use crate::error::Result;
use crate::fluctuations::{FluctuationMeasure, Measure};
use crate::scenarios::{heating_report, MeasurementScenario, WireModel};
use crate::spectral::{CutoffKind, CutoffSpec};

/// Heating chain inputs: the 500 mA pulse flowing for 100 µs.
pub const HEATING_CURRENT: f64 = 0.5;
pub const HEATING_TIME: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|computed/quoted − 1| ≤ tol`.
    Relative(f64),
    /// `computed/quoted ∈ [1/f, f]`, for figures quoted only to an order of magnitude.
    Factor(f64),
    /// `computed ≤ quoted`.
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A known disagreement whose cause is understood; reported, not failed.
    Annotated,
    Deviates,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "OK",
            Status::Annotated => "ANNOTATED",
            Status::Deviates => "DEVIATES",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub quoted: f64,
    pub tolerance: Tolerance,
    /// Explanation when the quoted figure is known not to follow from the stated inputs.
    pub note: Option<&'static str>,
}

impl ReferenceEntry {
    pub fn relative_deviation(&self) -> f64 {
        self.computed / self.quoted - 1.0
    }

    pub fn within_tolerance(&self) -> bool {
        let ratio = self.computed / self.quoted;
        match self.tolerance {
            Tolerance::Relative(tol) => (ratio - 1.0).abs() <= tol,
            Tolerance::Factor(f) => ratio >= 1.0 / f && ratio <= f,
            Tolerance::AtMost => self.computed <= self.quoted,
        }
    }

    pub fn status(&self) -> Status {
        if self.note.is_some() {
            Status::Annotated
        } else if self.within_tolerance() {
            Status::Ok
        } else {
            Status::Deviates
        }
    }
}

const FOOTNOTE_NOTE: &str = "(t_C/t_M)^3 with t_C = 4.29e-6 s and t_M = 1e-4 s is 7.9e-5; the quoted 7.9e-6 looks like a typo";
const HEATING_NOTE: &str =
    "matches only with Lambda taken at 1e-8 s; heating and Lambda both at 1e-4 s give about 1e4 times more";

fn entry(
    id: &'static str,
    description: &'static str,
    unit: &'static str,
    computed: f64,
    quoted: f64,
    tolerance: Tolerance,
) -> ReferenceEntry {
    ReferenceEntry {
        id,
        description,
        unit,
        computed,
        quoted,
        tolerance,
        note: None,
    }
}

/// Every quoted figure for the default parameters.
pub fn reference_table(params: &CollapseParams, cfg: &SolverConfig) -> Result<Vec<ReferenceEntry>> {
    let detection = MeasurementScenario::preset("detection-2mA")?;
    let nand = MeasurementScenario::preset("nand-13.8mA")?;
    let flash = MeasurementScenario::preset("flash-500mA")?;
    let white = CutoffSpec::white();
    let rel = Tolerance::Relative;
    let mut rows = Vec::new();

    rows.push(entry("ions-2mA", "Li+ ions displaced, 2 mA", "", detection.ions_displaced()?, 4.46e18, rel(0.01)));
    rows.push(entry("ions-13.8mA", "Li+ ions displaced, 13.8 mA", "", nand.ions_displaced()?, 3.08e19, rel(0.01)));
    rows.push(entry("ions-500mA", "Li+ ions displaced, 500 mA", "", flash.ions_displaced()?, 1.11e21, rel(0.01)));

    let tc_2 = scenario_collapse_time(params, &white, &detection, cfg)?.value;
    let tc_13 = scenario_collapse_time(params, &white, &nand, cfg)?.value;
    let tc_500 = scenario_collapse_time(params, &white, &flash, cfg)?.value;
    rows.push(entry("tc-white-2mA", "white-noise collapse time, 2 mA", "s", tc_2, 8.16e-6, rel(0.01)));
    rows.push(entry("tc-white-500mA", "white-noise collapse time, 500 mA", "s", tc_500, 1.30e-6, rel(0.01)));
    rows.push(entry("tc-white-13.8mA", "white-noise collapse time, 13.8 mA", "s", tc_13, 4.29e-6, rel(0.01)));

    let bound = |s: &MeasurementScenario, t_m: f64| {
        cutoff_lower_bound(params, CutoffKind::Lorentzian, s, t_m, cfg).map(|r| r.value)
    };
    let factor = Tolerance::Factor(2.0);
    rows.push(entry("cutoff-13.8mA-1e-4", "Lorentzian cutoff bound, 13.8 mA, t_M = 1e-4 s", "1/s", bound(&nand, 1e-4)?, 1.0, factor));
    rows.push(entry("cutoff-500mA-1e-4", "Lorentzian cutoff bound, 500 mA, t_M = 1e-4 s", "1/s", bound(&flash, 1e-4)?, 5e-2, factor));
    rows.push(entry("cutoff-13.8mA-1e-5", "Lorentzian cutoff bound, 13.8 mA, t_M = 1e-5 s", "1/s", bound(&nand, 1e-5)?, 1e4, factor));
    rows.push(entry("cutoff-500mA-1e-5", "Lorentzian cutoff bound, 500 mA, t_M = 1e-5 s", "1/s", bound(&flash, 1e-5)?, 5e2, factor));

    let i_measure = FluctuationMeasure::new(Measure::I, 0.1)?;
    let fluct = |t_m: f64| fluctuation_bound(&i_measure, t_m, CutoffKind::Lorentzian, cfg).map(|r| r.value);
    rows.push(entry("fluct-I-1e-4", "I = 0.1 cutoff, t_M = 1e-4 s", "1/s", fluct(1e-4)?, 1e5, rel(0.05)));
    rows.push(entry("fluct-I-1e-5", "I = 0.1 cutoff, t_M = 1e-5 s", "1/s", fluct(1e-5)?, 1e6, rel(0.05)));

    rows.push(entry("rescale-500mA-1e-5", "lambda rescaling, 500 mA, t_M = 1e-5 s", "", lambda_rescale(tc_500, 1e-5)?, 2.2e-3, rel(0.03)));
    rows.push(entry("rescale-13.8mA-1e-5", "lambda rescaling, 13.8 mA, t_M = 1e-5 s", "", lambda_rescale(tc_13, 1e-5)?, 7.9e-2, rel(0.03)));
    rows.push(entry("rescale-500mA-1e-4", "lambda rescaling, 500 mA, t_M = 1e-4 s", "", lambda_rescale(tc_500, 1e-4)?, 2.2e-6, rel(0.03)));
    rows.push(ReferenceEntry {
        note: Some(FOOTNOTE_NOTE),
        ..entry("rescale-13.8mA-1e-4", "lambda rescaling, 13.8 mA, t_M = 1e-4 s", "", lambda_rescale(tc_13, 1e-4)?, 7.9e-6, rel(0.03))
    });

    let h = heating_report(params, &white, &WireModel::default(), HEATING_CURRENT, HEATING_TIME)?;
    rows.push(entry("heat-volume", "wire volume", "m^3", h.volume, 3.14e-8, rel(0.01)));
    rows.push(entry("heat-atoms", "copper atoms in the wire", "", h.atom_count, 2.67e21, rel(0.01)));
    rows.push(entry("heat-resistance", "wire resistance", "ohm", h.resistance, 5.35e-5, rel(0.01)));
    rows.push(entry("heat-power", "dissipated power", "W", h.power, 1.34e-5, rel(0.01)));
    rows.push(entry("heat-temperature", "temperature rise", "K", h.temperature_rise, 1.24e-8, rel(0.01)));
    rows.push(entry("heat-xr", "thermal atomic amplitude", "m", h.thermal_amplitude, 2e-11, rel(0.15)));
    rows.push(entry("heat-displacement", "phonon displacement", "m", h.displacement, 4e-22, rel(0.20)));
    rows.push(entry("heat-gamma-ceiling", "heating collapse rate, consistent time", "", h.gamma, 1e-16, Tolerance::AtMost));
    rows.push(ReferenceEntry {
        note: Some(HEATING_NOTE),
        ..entry("heat-gamma-quoted", "heating collapse rate, quoted timescale", "", h.gamma_quoted_timescale, 4.3e-21, rel(0.10))
    });

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_is_ok_or_annotated() {
        let rows = reference_table(&CollapseParams::default(), &SolverConfig::default()).unwrap();
        assert_eq!(rows.len(), 25);
        for r in &rows {
            assert_ne!(r.status(), Status::Deviates, "{} computed {:e}", r.id, r.computed);
        }
        let annotated: Vec<_> = rows.iter().filter(|r| r.status() == Status::Annotated).map(|r| r.id).collect();
        assert_eq!(annotated, ["rescale-13.8mA-1e-4", "heat-gamma-quoted"]);
        // Annotated rows still carry the computed figure, and the heating one matches.
        let quoted = rows.iter().find(|r| r.id == "heat-gamma-quoted").unwrap();
        assert!(quoted.within_tolerance());
        let footnote = rows.iter().find(|r| r.id == "rescale-13.8mA-1e-4").unwrap();
        assert!((footnote.computed / 7.9e-5 - 1.0).abs() < 0.03);
    }

    #[test]
    fn tolerance_kinds() {
        let mut e = entry("x", "x", "", 1.6, 1.0, Tolerance::Factor(2.0));
        assert!(e.within_tolerance());
        e.computed = 2.1;
        assert!(!e.within_tolerance());
        e.tolerance = Tolerance::AtMost;
        assert!(!e.within_tolerance());
        e.computed = 0.5;
        assert!(e.within_tolerance());
    }
}
