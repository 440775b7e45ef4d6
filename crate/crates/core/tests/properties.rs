use csl_cutoff::bounds::{
    collapse_time_curve, cutoff_lower_bound, log_grid, scenario_collapse_time, small_omega_bound, SolverConfig,
};
use csl_cutoff::collapse::{
    gamma_current, gamma_point, sphere_form_factor, sphere_form_factor_mc, white_cubic_coefficient, CollapseParams,
    DisplacedSpecies,
};
use csl_cutoff::fluctuations::{i_norm, j_norm, j_tilde, FluctuationMeasure};
use csl_cutoff::noise_mc::{estimate_i, estimate_lambda};
use csl_cutoff::scenarios::{heating_report, temperature_rise, MeasurementScenario, WireModel};
use csl_cutoff::spectral::{delta_gamma, delta_gamma_zero, lambda_big};
use csl_cutoff::{CutoffKind, CutoffSpec};
use proptest::prelude::*;

const OMEGAS: [f64; 4] = [1e2, 1e4, 1e6, 1e8];

fn kind() -> impl Strategy<Value = CutoffKind> {
    prop::sample::select(CutoffKind::ALL.to_vec())
}

fn colored() -> impl Strategy<Value = CutoffKind> {
    prop::sample::select(CutoffKind::COLORED.to_vec())
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn preset(name: &str) -> MeasurementScenario {
    MeasurementScenario::preset(name).unwrap()
}

#[test]
fn lambda_is_monotone_and_below_white_on_the_grid() {
    let times = log_grid(1e-10, 1e-3, 40).unwrap();
    for kind in CutoffKind::ALL {
        for w in OMEGAS {
            let spec = CutoffSpec::new(kind, w).unwrap();
            let values: Vec<f64> = times.iter().map(|&t| lambda_big(&spec, t)).collect();
            for (v, t) in values.iter().zip(&times) {
                assert!(*v >= 0.0 && *v <= t / 2.0 * (1.0 + 1e-14), "{kind} {w} {t}");
            }
            assert!(values.windows(2).all(|p| p[1] >= p[0]), "{kind} {w}");
        }
    }
}

proptest! {
    #[test]
    fn lambda_bounded_and_nondecreasing(kind in kind(), w in log_uniform(1e2, 1e8), t in log_uniform(1e-10, 1e-3), step in 1.0001f64..3.0) {
        let spec = CutoffSpec::new(kind, w).unwrap();
        let a = lambda_big(&spec, t);
        let b = lambda_big(&spec, t * step);
        prop_assert!(a >= 0.0);
        prop_assert!(a <= t / 2.0 * (1.0 + 1e-14));
        prop_assert!(b >= a);
    }

    #[test]
    fn correlator_is_even(kind in colored(), w in log_uniform(1e2, 1e8), x in 0.0f64..50.0) {
        let spec = CutoffSpec::new(kind, w).unwrap();
        let tau = x / w;
        prop_assert_eq!(delta_gamma(&spec, tau).unwrap(), delta_gamma(&spec, -tau).unwrap());
        prop_assert!(delta_gamma(&spec, tau).unwrap().abs() <= delta_gamma_zero(&spec).unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn white_limit_and_small_time_law() {
    for w in OMEGAS {
        let l = CutoffSpec::lorentzian(w);
        let t = 1e3 / w;
        assert!(lambda_big(&l, t) / (t / 2.0) > 0.99);
        let t = 1e-2 / w;
        let law = w * t * t / 4.0;
        assert!((lambda_big(&l, t) / law - 1.0).abs() < 0.01);
    }
}

#[test]
fn correlator_at_zero() {
    let w = 3e5;
    let pi = std::f64::consts::PI;
    let expect = [
        (CutoffKind::Lorentzian, w / 2.0),
        (CutoffKind::Heaviside, w / pi),
        (CutoffKind::GaussianExp, w / (2.0 * pi.sqrt())),
        (CutoffKind::Exponential, w / pi),
    ];
    for (kind, v) in expect {
        let spec = CutoffSpec::new(kind, w).unwrap();
        assert!((delta_gamma_zero(&spec).unwrap() / v - 1.0).abs() < 1e-14);
        assert_eq!(delta_gamma(&spec, 0.0).unwrap(), delta_gamma_zero(&spec).unwrap());
    }
}

#[test]
fn lorentzian_curves_order_below_white_and_merge() {
    let omegas = [1e6, 1e8, 4e10];
    let times = log_grid(1e-12, 1e-3, 200).unwrap();
    for &t in &times {
        let v: Vec<f64> = omegas.iter().map(|&w| lambda_big(&CutoffSpec::lorentzian(w), t)).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2] && v[2] <= t / 2.0, "{t}");
    }
    for w in omegas {
        let t = 10.0 / w;
        assert!(lambda_big(&CutoffSpec::lorentzian(w), t) / (t / 2.0) > 0.9);
    }
}

fn species(delta: f64) -> Vec<DisplacedSpecies> {
    vec![DisplacedSpecies::new("a", 7.0, 1e18, delta), DisplacedSpecies::new("b", 145.0, 1e18, delta)]
}

proptest! {
    #[test]
    fn gamma_point_properties(
        kind in kind(),
        w in log_uniform(1e2, 1e10),
        t in log_uniform(1e-10, 1e-2),
        lambda in log_uniform(1e-12, 1e-6),
        delta in log_uniform(1e-15, 1e-9),
    ) {
        let spec = CutoffSpec::new(kind, w).unwrap();
        let p = CollapseParams::new(lambda, 1e-7).unwrap();
        let g = gamma_point(&p, &spec, &species(delta), t).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert_eq!(gamma_point(&p, &spec, &species(delta), 0.0).unwrap(), 0.0);
        prop_assert!(gamma_point(&p, &spec, &species(delta), t * 1.5).unwrap() >= g);
        let p2 = CollapseParams::new(2.0 * lambda, 1e-7).unwrap();
        let g2 = gamma_point(&p2, &spec, &species(delta), t).unwrap();
        prop_assert!((g2 / (2.0 * g) - 1.0).abs() < 1e-13);
        let p3 = CollapseParams::new(lambda, 2e-7).unwrap();
        let g3 = gamma_point(&p3, &spec, &species(delta), t).unwrap();
        prop_assert!((g3 * 4.0 / g - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_ordered_by_cutoff(w1 in log_uniform(1e-2, 1e12), f in 1.0f64..1e4, t in log_uniform(1e-10, 1e-2)) {
        let p = CollapseParams::default();
        let s = preset("flash-500mA");
        let g1 = gamma_current(&p, &CutoffSpec::lorentzian(w1), &s, t);
        let g2 = gamma_current(&p, &CutoffSpec::lorentzian(w1 * f), &s, t);
        let gw = gamma_current(&p, &CutoffSpec::white(), &s, t);
        prop_assert!(g1 <= g2 && g2 <= gw);
    }

    #[test]
    fn solver_postcondition(current in log_uniform(1e-3, 2.0), lambda in log_uniform(1e-10, 1e-6), kind in kind(), w in log_uniform(1e4, 1e12)) {
        let p = CollapseParams::new(lambda, 1e-7).unwrap();
        let mut s = preset("flash-500mA");
        s.i_electric = current;
        let spec = CutoffSpec::new(kind, w).unwrap();
        let cfg = SolverConfig::default();
        let r = scenario_collapse_time(&p, &spec, &s, &cfg).unwrap();
        prop_assert!(r.residual.abs() < 1e-8);
        prop_assert!(gamma_current(&p, &spec, &s, r.bracket.0) < 1.0);
        prop_assert!(gamma_current(&p, &spec, &s, r.bracket.1) >= 1.0);
    }

    #[test]
    fn cutoff_bound_meets_small_cutoff_law(current in log_uniform(1e-2, 1.0), t_m in log_uniform(1e-5, 1e-3)) {
        let p = CollapseParams::default();
        let mut s = preset("nand-13.8mA");
        s.i_electric = current;
        let law = small_omega_bound(&p, &s, t_m);
        prop_assume!(law * t_m < 1e-2);
        let cfg = SolverConfig::default();
        let r = cutoff_lower_bound(&p, CutoffKind::Lorentzian, &s, t_m, &cfg).unwrap();
        prop_assert!((r.value / law - 1.0).abs() < 5e-3);
        // And the collapse time at the bound is t_m.
        let t_c = scenario_collapse_time(&p, &CutoffSpec::lorentzian(r.value), &s, &cfg).unwrap().value;
        prop_assert!((t_c / t_m - 1.0).abs() < 1e-8);
    }
}

#[test]
fn white_current_is_cubic_over_two_decades() {
    let p = CollapseParams::default();
    for name in ["detection-2mA", "nand-13.8mA", "flash-500mA"] {
        let s = preset(name);
        let k = white_cubic_coefficient(&p, &s);
        for t in log_grid(1e-7, 1e-5, 21).unwrap() {
            let g = gamma_current(&p, &CutoffSpec::white(), &s, t);
            assert!((g / (k * t * t * t) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sphere_closed_form_matches_monte_carlo() {
    let r_c = 1e-7;
    for (i, ratio) in [0.3, 1.0, 3.0].into_iter().enumerate() {
        let exact = sphere_form_factor(ratio * r_c, r_c).unwrap();
        let mc = sphere_form_factor_mc(ratio * r_c, r_c, 400_000, 100 + i as u64).unwrap();
        assert!(mc.within_sigma(exact, 3.0), "R/r_c = {ratio}: {} ± {} vs {exact}", mc.mean, mc.std_error);
    }
}

/// The default heating setup with each parameter scaled by its factor.
fn scaled_heating(f: &[f64; 10]) -> f64 {
    let d = WireModel::default();
    let w = WireModel {
        length: d.length * f[0],
        radius: d.radius * f[1],
        resistivity: d.resistivity * f[2],
        mass_density: d.mass_density * f[3],
        atomic_mass: d.atomic_mass * f[4],
        heat_capacity: d.heat_capacity * f[5],
        debye_temperature: d.debye_temperature * f[6],
        reference_temperature: d.reference_temperature * f[7],
        ..d
    };
    heating_report(&CollapseParams::default(), &CutoffSpec::white(), &w, 0.5 * f[8], 1e-4 * f[9])
        .unwrap()
        .gamma
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn heating_rate_stays_negligible_near_defaults(f in prop::array::uniform10(0.5f64..=1.5)) {
        let g = scaled_heating(&f);
        prop_assert!(g <= 1e-16, "gamma = {g:e} at factors {f:?}");
    }
}

#[test]
fn temperature_rise_is_linear_in_time_and_quadratic_in_current() {
    let w = WireModel::default();
    let base = temperature_rise(&w, 0.5, 1e-4);
    assert!((temperature_rise(&w, 0.5, 3e-4) / base - 3.0).abs() < 1e-12);
    assert!((temperature_rise(&w, 1.0, 1e-4) / base - 4.0).abs() < 1e-12);
}

#[test]
fn presets_reproduce_ion_counts() {
    for (name, n) in [("detection-2mA", 4.46e18), ("nand-13.8mA", 3.08e19), ("flash-500mA", 1.11e21)] {
        let got = preset(name).ions_displaced().unwrap();
        assert!((got / n - 1.0).abs() < 0.01, "{name}: {got:e}");
    }
}

proptest! {
    #[test]
    fn normalized_measures_lie_in_unit_interval(kind in colored(), x in log_uniform(1e-6, 1e6)) {
        let spec = CutoffSpec::new(kind, 1.0).unwrap();
        let i = i_norm(&spec, x).unwrap();
        let j = j_norm(&spec, x).unwrap();
        prop_assert!(i > 0.0 && i < 1.0 + 1e-12);
        prop_assert!(j > 0.0 && j < 1.0 + 1e-12);
        let t = x / 7e4;
        let s = CutoffSpec::new(kind, 7e4).unwrap();
        prop_assert!((j_tilde(&s, t).unwrap() * t * t / 2.0 / lambda_big(&s, t) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn lorentzian_measures_decrease_to_zero() {
    let l = CutoffSpec::lorentzian(1.0);
    let xs = log_grid(1e-8, 1e8, 400).unwrap();
    for m in [i_norm, j_norm] {
        let v: Vec<f64> = xs.iter().map(|&x| m(&l, x).unwrap()).collect();
        assert!(v.iter().all(|&y| y > 0.0 && y < 1.0 + 1e-15));
        assert!(v.windows(2).all(|p| p[1] < p[0]));
        assert!(v[0] > 1.0 - 1e-7);
        assert!(*v.last().unwrap() < 1e-7);
    }
}

#[test]
fn bound_curves_decrease_over_the_figure_range() {
    let p = CollapseParams::default();
    let cfg = SolverConfig::default();
    let omegas = log_grid(1e-3, 1e11, 141).unwrap();
    for name in ["nand-13.8mA", "flash-500mA"] {
        let c = collapse_time_curve(&p, CutoffKind::Lorentzian, &preset(name), &omegas, &cfg).unwrap();
        assert!(c.windows(2).all(|w| w[1] <= w[0]), "{name}");
    }
    let cfg = SolverConfig::default();
    for kind in CutoffKind::COLORED {
        let i = FluctuationMeasure::default();
        let x = csl_cutoff::bounds::fluctuation_crossing(&i, kind, &cfg).unwrap();
        let locus: Vec<f64> = omegas.iter().map(|w| x / w).collect();
        assert!(locus.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn mc_matches_fluctuation_measures() {
    let g = CutoffSpec::new(CutoffKind::GaussianExp, 2e4).unwrap();
    let t = 1e-4;
    let lam = estimate_lambda(&g, t, 10_000, 77).unwrap();
    let j_mc = lam.mean * 2.0 / (t * t);
    let j_se = lam.std_error * 2.0 / (t * t);
    assert!(((j_mc - j_tilde(&g, t).unwrap()) / j_se).abs() <= 3.0);
    let i = estimate_i(&g, t, 10_000, 78).unwrap();
    assert!(i.within_sigma(csl_cutoff::fluctuations::i_tilde(&g, t).unwrap(), 3.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimates_are_pure_functions_of_seed(seed in any::<u64>(), kind in colored()) {
        let spec = CutoffSpec::new(kind, 1e4).unwrap();
        prop_assert_eq!(estimate_lambda(&spec, 1e-4, 50, seed).unwrap(), estimate_lambda(&spec, 1e-4, 50, seed).unwrap());
        prop_assert_eq!(
            sphere_form_factor_mc(1e-7, 1e-7, 1000, seed).unwrap(),
            sphere_form_factor_mc(1e-7, 1e-7, 1000, seed).unwrap()
        );
    }
}
