use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selectorkit::robot::{
    analytic_subgradient, clf_value, control_law, disassembled_subgradients, export_svf, marginal_gradient,
    marginal_value, semiconcavity_fit, simulate, ClfConfig, Controller, ExportConfig, SimConfig,
};
use selectorkit::selector::{extract, EvalResult};

/// `V` off the `x₃` axis: the minimizing angle is `atan2(x₂, x₁)`.
fn v_closed_form(x: &[f64; 3]) -> f64 {
    let r = x[0].hypot(x[1]);
    let a = x[2].abs();
    x[0].powi(4) + x[1].powi(4) + a.powi(3) / (r + a.sqrt()).powi(2)
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-6;
    let mut checked = 0;
    while checked < 1000 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let t: f64 = rng.gen_range(0.0..TAU);
        let d = x[0] * t.cos() + x[1] * t.sin() + f64::sqrt(f64::abs(x[2]));
        if d.abs() < 0.1 || x[2].abs() < 0.01 {
            continue;
        }
        let g = marginal_gradient(&x, t);
        for k in 0..3 {
            let (mut p, mut m) = (x, x);
            p[k] += h;
            m[k] -= h;
            let fd = (marginal_value(&p, t, 1e-6) - marginal_value(&m, t, 1e-6)) / (2.0 * h);
            let rel = (g[k] - fd).abs() / g[k].abs().max(1.0);
            assert!(rel < 1e-5, "x = {x:?}, θ = {t}, axis {k}: {} vs {fd}", g[k]);
        }
        checked += 1;
    }
}

#[test]
fn x3_partial_vanishes_on_the_plane() {
    for t in [0.0, 1.0, 4.0] {
        assert_eq!(marginal_gradient(&[0.5, -1.0, 0.0], t), [0.5, -4.0, 0.0]);
    }
}

#[test]
fn semiconcavity_constant_is_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<_> = (0..200)
        .map(|_| {
            let x: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let y = [x[0] + 0.01, x[1] - 0.02, x[2] + 0.015];
            (x, y)
        })
        .collect();
    let c = semiconcavity_fit(&pairs, &ClfConfig::default());
    assert!(c.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clf_matches_its_closed_form(x in prop::array::uniform3(-2.0f64..2.0)) {
        prop_assume!(x[0].hypot(x[1]) > 1e-3);
        let cfg = ClfConfig::default();
        let v = clf_value(&x, &cfg).v;
        let exact = v_closed_form(&x);
        prop_assert!(v > 0.0);
        prop_assert!(v >= exact - 1e-12 * (1.0 + exact));
        prop_assert!(v - exact <= 1e-9 * (1.0 + exact), "{} vs {}", v, exact);
    }

    #[test]
    fn clf_is_below_every_angle(x in prop::array::uniform3(-2.0f64..2.0), t in 0.0f64..TAU) {
        let v = clf_value(&x, &ClfConfig::default()).v;
        prop_assert!(v <= marginal_value(&x, t, 1e-6));
    }

    #[test]
    fn analytic_subgradient_is_the_envelope_gradient(x in prop::array::uniform3(-2.0f64..2.0)) {
        prop_assume!(x[0].hypot(x[1]) > 0.05 && x[2].abs() > 0.05);
        let g = analytic_subgradient(&x, &ClfConfig::default());
        let h = 1e-6;
        for k in 0..3 {
            let (mut p, mut m) = (x, x);
            p[k] += h;
            m[k] -= h;
            let fd = (v_closed_form(&p) - v_closed_form(&m)) / (2.0 * h);
            prop_assert!((g[k] - fd).abs() <= 1e-4 * g[k].abs().max(1.0), "axis {}: {} vs {}", k, g[k], fd);
        }
    }

    #[test]
    fn analytic_subgradient_is_disassembled(x in prop::array::uniform3(-2.0f64..2.0)) {
        let cfg = ClfConfig::default();
        let g = analytic_subgradient(&x, &cfg);
        let set = disassembled_subgradients(&x, &cfg);
        let near = set.iter().map(|p| (0..3).map(|k| (p[k] - g[k]).powi(2)).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min);
        prop_assert!(near <= 1e-3 * (1.0 + g.iter().map(|v| v.abs()).sum::<f64>()), "{}", near);
    }

    #[test]
    fn analytic_control_decreases_v(x in prop::array::uniform3(-2.0f64..2.0)) {
        prop_assume!(x[0].hypot(x[1]) > 0.05 && x[2].abs() > 0.05);
        let cfg = ClfConfig::default();
        let z = analytic_subgradient(&x, &cfg);
        let u = control_law(&z, &x);
        // dV/dt = ⟨ζ, g₁⟩u₁ + ⟨ζ, g₂⟩u₂ = −|u|²
        let f = [u[0], u[1], -x[1] * u[0] + x[0] * u[1]];
        let dv: f64 = (0..3).map(|k| z[k] * f[k]).sum();
        prop_assert!((dv + u[0] * u[0] + u[1] * u[1]).abs() <= 1e-9 * (1.0 + dv.abs()));
    }
}

#[test]
fn analytic_run_decreases_v() {
    let rec = simulate(&Controller::Analytic, &SimConfig::default());
    assert!(!rec.truncated);
    assert_eq!(rec.samples.len(), 1001);
    assert!(rec.max_v_increase(0.5) <= 1e-3);
    assert!(rec.samples.last().unwrap().v < rec.samples[0].v / 10.0);
}

fn diameter(set: &[[f64; 3]]) -> f64 {
    let mut d: f64 = 0.0;
    for a in set {
        for b in set {
            d = d.max((0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt());
        }
    }
    d
}

#[test]
fn exported_selector_tracks_the_analytic_subgradient() {
    let cfg = ExportConfig {
        step: 0.25,
        ..ExportConfig::default()
    };
    let (svf, report) = export_svf(&cfg).unwrap();
    assert_eq!(report.cells, 16 * 16 * 16);
    assert!(report.tau <= 1.0 / 32.0, "{report:?}");
    let chain = extract(&svf, 4, &1e-3).unwrap();
    let ev = chain.evaluator(&1e-3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for _ in 0..500 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        if diameter(&disassembled_subgradients(&x, &cfg.clf)) > 0.05 {
            continue;
        }
        let EvalResult::Value(z) = ev.eval(&x) else { continue };
        let a = analytic_subgradient(&x, &cfg.clf);
        for k in 0..3 {
            let tol = 2.0 / 16.0 * report.range_width[k] / report.scale;
            assert!((z[k] - a[k]).abs() <= tol, "x = {x:?}, axis {k}: {} vs {}", z[k], a[k]);
        }
        compared += 1;
    }
    assert!(compared > 100, "{compared}");
}
