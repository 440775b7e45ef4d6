use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use csl_cutoff::bounds::{
    collapse_time_curve, cutoff_lower_bound, fluctuation_bound, fluctuation_crossing, lambda_rescale,
    scenario_collapse_time, small_omega_bound,
};
use csl_cutoff::collapse::current_prefactor;
use csl_cutoff::fluctuations::{FluctuationMeasure, Measure, DEFAULT_THRESHOLD};
use csl_cutoff::noise_mc::{lorentzian_sampler_checks, run_oracle_cells, sample_lorentzian, OracleOutcome, ORACLE_CELLS};
use csl_cutoff::reference::{reference_table, Status, HEATING_CURRENT, HEATING_TIME};
use csl_cutoff::scenarios::{heating_report, WireModel, PRESET_NAMES};
use csl_cutoff::spectral::lambda_big;
use csl_cutoff::{CutoffKind, CutoffSpec};

use crate::config::FileConfig;
use crate::table::{fmt_num, parse_grid, Csv};
use crate::{Cli, CliError, Command};

const DEFAULT_T_GRID: &str = "log:1e-12:1e-3:200";
const DEFAULT_LAMBDA_OMEGAS: &str = "1e6,1e8,4e10";
const DEFAULT_OMEGA_GRID: &str = "log:1e-3:1e11:141";
const DEFAULT_T_M: &str = "1e-5,1e-4";
const BOUND_PRESETS: [&str; 2] = ["nand-13.8mA", "flash-500mA"];
/// Cells of the oracle suite that must agree within 3σ.
const REQUIRED_CELLS: usize = 9;

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = FileConfig::discover(cli.config.as_deref())?;
    let mut file = match &cli.output {
        Some(path) => Some(create(path)?),
        None => None,
    };
    match &cli.command {
        Command::LambdaCurve(a) => {
            let csv = lambda_curve(&cfg, a)?;
            csv.write(sink(&mut file, out))?;
        }
        Command::CollapseTime(a) => collapse_time(&cfg, a, sink(&mut file, out))?,
        Command::CutoffBound(a) => {
            let csv = cutoff_bound(&cfg, a, out)?;
            if let Some(f) = file.as_mut() {
                csv.write(f)?;
            }
        }
        Command::FluctBound(a) => {
            let csv = fluct_bound(&cfg, a, out)?;
            if let Some(f) = file.as_mut() {
                csv.write(f)?;
            }
        }
        Command::Heating(a) => heating(&cfg, a, sink(&mut file, out))?,
        Command::Ions(a) => ions(&cfg, a, sink(&mut file, out))?,
        Command::McVerify(a) => mc_verify(&cfg, a, sink(&mut file, out))?,
        Command::Report => report(&cfg, sink(&mut file, out))?,
    }
    if let Some(mut f) = file {
        f.flush()?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))
}

fn sink<'a>(file: &'a mut Option<BufWriter<File>>, out: &'a mut dyn Write) -> &'a mut dyn Write {
    match file {
        Some(f) => f,
        None => out,
    }
}

fn kv(out: &mut dyn Write, key: &str, value: &str) -> Result<(), CliError> {
    writeln!(out, "{key:<28} {value}")?;
    Ok(())
}

fn parse_kind(text: &str) -> Result<CutoffKind, CliError> {
    text.parse::<CutoffKind>().map_err(|e| CliError::Usage(e.to_string()))
}

fn kind_or(cfg: &FileConfig, flag: Option<&str>, fallback: CutoffKind) -> Result<CutoffKind, CliError> {
    match flag {
        Some(k) => parse_kind(k),
        None => Ok(cfg.cutoff.kind.unwrap_or(fallback)),
    }
}

fn spec_for(cfg: &FileConfig, kind: CutoffKind, omega_flag: Option<f64>) -> Result<CutoffSpec, CliError> {
    if kind == CutoffKind::White {
        return Ok(CutoffSpec::white());
    }
    let omega = omega_flag
        .or(cfg.cutoff.omega_m)
        .ok_or_else(|| CliError::Usage(format!("cutoff `{kind}` needs --omega-m")))?;
    Ok(CutoffSpec::new(kind, omega)?)
}

fn grid(flag: Option<&str>, from_file: Option<&str>, fallback: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(flag.or(from_file).unwrap_or(fallback))
}

fn lambda_curve(cfg: &FileConfig, a: &crate::LambdaCurveArgs) -> Result<Csv, CliError> {
    let kinds: Vec<CutoffKind> = if a.cutoff.is_empty() {
        vec![cfg.cutoff.kind.unwrap_or(CutoffKind::Lorentzian)]
    } else {
        a.cutoff.iter().map(|k| parse_kind(k)).collect::<Result<_, _>>()?
    };
    let default_omegas = cfg.cutoff.omega_m.map(|w| w.to_string());
    let omegas = grid(
        a.omega_m.as_deref(),
        default_omegas.as_deref(),
        DEFAULT_LAMBDA_OMEGAS,
    )?;
    let times = grid(a.t_grid.as_deref(), cfg.cutoff.t_grid.as_deref(), DEFAULT_T_GRID)?;

    let mut specs = Vec::new();
    let mut header = vec!["t".to_string()];
    for &kind in kinds.iter().filter(|k| **k != CutoffKind::White) {
        for &w in &omegas {
            specs.push(CutoffSpec::new(kind, w)?);
            header.push(format!("lambda_{kind}_{w:e}"));
        }
    }
    specs.push(CutoffSpec::white());
    header.push("lambda_white".to_string());

    let mut csv = Csv::new(header);
    for &t in &times {
        let mut row = vec![t];
        row.extend(specs.iter().map(|s| lambda_big(s, t)));
        if row[1..].iter().any(|&l| l > 0.5 * t * (1.0 + 1e-12)) {
            return Err(CliError::InvalidOutput(format!("Lambda above t/2 at t = {t:e}")));
        }
        csv.push(row);
    }
    Ok(csv)
}

fn collapse_time(cfg: &FileConfig, a: &crate::CollapseTimeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = cfg.collapse_params()?;
    let solver = cfg.solver()?;
    let preset = cfg.preset_names(a.preset.as_deref(), &["flash-500mA"]).remove(0);
    let scenario = cfg.scenario(&preset, a.current)?;
    let kind = match a.cutoff.as_deref() {
        Some(k) => parse_kind(k)?,
        None => CutoffKind::White,
    };
    let spec = spec_for(cfg, kind, a.omega_m)?;
    let r = scenario_collapse_time(&params, &spec, &scenario, &solver)?;
    kv(out, "scenario", &scenario.label)?;
    kv(out, "cutoff", &spec.to_string())?;
    kv(out, "current_a", &fmt_num(scenario.i_electric))?;
    kv(out, "t_c_s", &fmt_num(r.value))?;
    kv(out, "bracket_s", &format!("{} {}", fmt_num(r.bracket.0), fmt_num(r.bracket.1)))?;
    kv(out, "residual", &format!("{:.3e}", r.residual))?;
    kv(out, "iterations", &r.iterations.to_string())?;
    let t_m = scenario.measurement_time();
    kv(out, "t_m_s", &fmt_num(t_m))?;
    kv(out, "collapses_by_t_m", if r.value <= t_m { "yes" } else { "no" })?;
    Ok(())
}

fn cutoff_bound(cfg: &FileConfig, a: &crate::CutoffBoundArgs, out: &mut dyn Write) -> Result<Csv, CliError> {
    let params = cfg.collapse_params()?;
    let solver = cfg.solver()?;
    let kind = kind_or(cfg, a.cutoff.as_deref(), CutoffKind::Lorentzian)?;
    if kind == CutoffKind::White {
        return Err(CliError::Usage("cutoff-bound needs a colored cutoff".into()));
    }
    let t_ms = parse_grid(a.t_m.as_deref().unwrap_or(DEFAULT_T_M))?;
    let omegas = grid(a.omega_grid.as_deref(), cfg.cutoff.omega_grid.as_deref(), DEFAULT_OMEGA_GRID)?;
    let scenarios = cfg
        .preset_names(a.preset.as_deref(), &BOUND_PRESETS)
        .iter()
        .map(|p| cfg.scenario(p, a.current))
        .collect::<Result<Vec<_>, _>>()?;

    writeln!(
        out,
        "{:<14} {:>16} {:>16} {:>16} {:>16} {:>16}",
        "scenario", "t_m_s", "omega_bound", "small_omega_law", "t_c_white_s", "lambda_rescale"
    )?;
    let mut csv_header = vec!["omega_m".to_string()];
    let mut columns = Vec::new();
    for s in &scenarios {
        let t_c_white = scenario_collapse_time(&params, &CutoffSpec::white(), s, &solver)?.value;
        for &t_m in &t_ms {
            let bound = cutoff_lower_bound(&params, kind, s, t_m, &solver)?;
            writeln!(
                out,
                "{:<14} {:>16} {:>16} {:>16} {:>16} {:>16}",
                s.label,
                fmt_num(t_m),
                fmt_num(bound.value),
                fmt_num(small_omega_bound(&params, s, t_m)),
                fmt_num(t_c_white),
                fmt_num(lambda_rescale(t_c_white, t_m)?),
            )?;
        }
        csv_header.push(format!("t_c_{}", s.label));
        columns.push(collapse_time_curve(&params, kind, s, &omegas, &solver)?);
    }

    let mut csv = Csv::new(csv_header);
    csv.metadata("bulk_heating_bound", cfg.bulk_heating_bound());
    for (i, &w) in omegas.iter().enumerate() {
        let mut row = vec![w];
        row.extend(columns.iter().map(|c| c[i]));
        csv.push(row);
    }
    Ok(csv)
}

fn fluct_bound(cfg: &FileConfig, a: &crate::FluctBoundArgs, out: &mut dyn Write) -> Result<Csv, CliError> {
    let solver = cfg.solver()?;
    let kind = kind_or(cfg, a.cutoff.as_deref(), CutoffKind::Lorentzian)?;
    let threshold = a.threshold.or(cfg.cutoff.threshold).unwrap_or(DEFAULT_THRESHOLD);
    let measures: Vec<Measure> = match a.measure.as_deref() {
        Some(m) => vec![m.parse().map_err(|e: csl_cutoff::Error| CliError::Usage(e.to_string()))?],
        None => vec![Measure::I, Measure::J],
    };
    let t_ms = parse_grid(a.t_m.as_deref().unwrap_or(DEFAULT_T_M))?;
    let omegas = grid(a.omega_grid.as_deref(), cfg.cutoff.omega_grid.as_deref(), DEFAULT_OMEGA_GRID)?;

    writeln!(out, "{:<8} {:>16} {:>16} {:>16}", "measure", "t_m_s", "omega_t_m", "omega_bound")?;
    let mut header = vec!["omega_m".to_string()];
    let mut crossings = Vec::new();
    for &m in &measures {
        let measure = FluctuationMeasure::new(m, threshold)?;
        for &t_m in &t_ms {
            let r = fluctuation_bound(&measure, t_m, kind, &solver)?;
            writeln!(
                out,
                "{:<8} {:>16} {:>16} {:>16}",
                m.to_string(),
                fmt_num(t_m),
                fmt_num(r.value * t_m),
                fmt_num(r.value)
            )?;
        }
        header.push(format!("t_{m}"));
        crossings.push(fluctuation_crossing(&measure, kind, &solver)?);
    }

    let mut csv = Csv::new(header);
    csv.metadata("bulk_heating_bound", cfg.bulk_heating_bound());
    csv.metadata("threshold", threshold);
    for &w in &omegas {
        let mut row = vec![w];
        row.extend(crossings.iter().map(|x| x / w));
        csv.push(row);
    }
    Ok(csv)
}

fn heating(cfg: &FileConfig, a: &crate::HeatingArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = cfg.collapse_params()?;
    let kind = match a.cutoff.as_deref() {
        Some(k) => parse_kind(k)?,
        None => CutoffKind::White,
    };
    let spec = spec_for(cfg, kind, a.omega_m)?;
    let current = a.current.unwrap_or(HEATING_CURRENT);
    let time = a.time.unwrap_or(HEATING_TIME);
    let h = heating_report(&params, &spec, &WireModel::default(), current, time)?;
    for (k, v) in [("current_a", current), ("time_s", time)] {
        kv(out, k, &fmt_num(v))?;
    }
    let rows = [
        ("volume_m3", h.volume),
        ("copper_atoms", h.atom_count),
        ("resistance_ohm", h.resistance),
        ("power_w", h.power),
        ("temperature_rise_k", h.temperature_rise),
        ("thermal_amplitude_m", h.thermal_amplitude),
        ("displacement_m", h.displacement),
        ("gamma", h.gamma),
        ("gamma_lambda_at_1e-8_s", h.gamma_quoted_timescale),
    ];
    for (k, v) in rows {
        if v.is_nan() || v < 0.0 {
            return Err(CliError::InvalidOutput(format!("{k} = {v}")));
        }
        kv(out, k, &fmt_num(v))?;
    }
    Ok(())
}

fn ions(cfg: &FileConfig, a: &crate::IonsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = cfg.collapse_params()?;
    writeln!(
        out,
        "{:<14} {:>16} {:>16} {:>16} {:>16}",
        "scenario", "current_a", "particles_per_s", "ions", "gamma_prefactor"
    )?;
    for p in cfg.preset_names(a.preset.as_deref(), &PRESET_NAMES) {
        let s = cfg.scenario(&p, a.current)?;
        let prefactor = current_prefactor(&params, &s);
        writeln!(
            out,
            "{:<14} {:>16} {:>16} {:>16} {:>16}",
            s.label,
            fmt_num(s.i_electric),
            fmt_num(s.particle_current()),
            fmt_num(s.ions_displaced()?),
            fmt_num(prefactor)
        )?;
    }
    Ok(())
}

fn outcome_line(out: &mut dyn Write, o: &OracleOutcome) -> Result<(), CliError> {
    writeln!(
        out,
        "{} {:<52} mc={} se={} analytic={} z={:+.2}",
        if o.passed { "PASS" } else { "FAIL" },
        o.label,
        fmt_num(o.estimate.mean),
        fmt_num(o.estimate.std_error),
        fmt_num(o.analytic),
        o.z_score()
    )?;
    Ok(())
}

fn mc_verify(cfg: &FileConfig, a: &crate::McVerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let seed = a.seed.unwrap_or(cfg.seed());
    let ensemble = a.ensemble.unwrap_or(cfg.ensemble());
    if let Some(path) = &a.dump_trajectory {
        let path_traj = sample_lorentzian(1e4, 1e-6, 10_000, seed)?;
        let mut f = create(path)?;
        path_traj.write_csv(&mut f)?;
        f.flush()?;
    }
    let sampler = lorentzian_sampler_checks(1e4, 1e-6, 1_000_000, seed)?;
    for o in &sampler {
        outcome_line(out, o)?;
    }
    let cells = run_oracle_cells(ensemble, seed)?;
    for o in &cells {
        outcome_line(out, o)?;
    }
    let passed = cells.iter().filter(|o| o.passed).count();
    let sampler_ok = sampler.iter().all(|o| o.passed);
    writeln!(
        out,
        "cells within 3 sigma: {passed}/{} (need {REQUIRED_CELLS}); sampler checks: {}",
        ORACLE_CELLS.len(),
        if sampler_ok { "pass" } else { "fail" }
    )?;
    if passed < REQUIRED_CELLS || !sampler_ok {
        return Err(CliError::Verification(format!(
            "{passed}/{} cells within 3 sigma, sampler checks {}",
            ORACLE_CELLS.len(),
            if sampler_ok { "passed" } else { "failed" }
        )));
    }
    Ok(())
}

fn report(cfg: &FileConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = reference_table(&cfg.collapse_params()?, &cfg.solver()?)?;
    writeln!(
        out,
        "{:<22} {:>16} {:>16} {:>11}  {:<9} description",
        "id", "computed", "quoted", "rel_dev", "status"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:<22} {:>16} {:>16} {:>+11.3e}  {:<9} {}",
            r.id,
            fmt_num(r.computed),
            fmt_num(r.quoted),
            r.relative_deviation(),
            r.status().to_string(),
            r.description
        )?;
        if let Some(note) = r.note {
            writeln!(out, "{:<22} note: {note}", "")?;
        }
    }
    let count = |s: Status| rows.iter().filter(|r| r.status() == s).count();
    writeln!(
        out,
        "{} ok, {} annotated, {} deviating",
        count(Status::Ok),
        count(Status::Annotated),
        count(Status::Deviates)
    )?;
    Ok(())
}
