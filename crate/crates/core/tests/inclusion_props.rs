use proptest::prelude::*;
use selectorkit::inclusion::{
    filippov_iterate, projection_selector, xi_series, AffineBoxField, Curve, DiProblem, IterConfig, NetField, SvfField, TimeFn,
};
use selectorkit::setalg::BasicSet;
use selectorkit::svf::{build_sampled, GridCell, Net, SampledSpec};

fn decay_field(w: f64) -> AffineBoxField {
    AffineBoxField {
        a: vec![vec![-1.0]],
        b: vec![0.0],
        w,
        points: 41,
    }
}

fn decay_problem(x0: f64, w: f64) -> DiProblem<AffineBoxField> {
    decay_with(decay_field(w), x0)
}

/// `g = e^{-t}` with `κ ≡ 1`, `p ≡ 0` on `[0, 1]`.
fn decay_with<F: NetField>(field: F, x0: f64) -> DiProblem<F> {
    DiProblem {
        field,
        x0: vec![x0],
        g: Curve::Exponential {
            start: vec![1.0],
            rate: -1.0,
        },
        kappa: TimeFn::constant(1.0),
        p: TimeFn::constant(0.0),
        beta: 1.0,
        horizon: 1.0,
    }
}

fn cfg() -> IterConfig {
    IterConfig {
        step: 1.0 / 128.0,
        max_iter: 80,
        tol: 1e-12,
    }
}

#[test]
fn zero_defect_collapses_onto_reference() {
    let traj = filippov_iterate(&decay_problem(1.0, 0.1), &cfg()).unwrap();
    assert!(traj.converged && traj.certified, "{:?}", traj.residuals);
    for i in 0..traj.times.len() {
        assert_eq!(traj.xi[i], 0.0);
        let gap = (traj.states[i][0] - (-traj.times[i]).exp()).abs();
        assert!(gap <= traj.slack[i]);
        // projection of ġ = −g onto the interval is −x up to trapezoid error
        assert!(gap < 1e-4, "{gap}");
    }
}

#[test]
fn offset_start_stays_in_the_gronwall_tube() {
    let traj = filippov_iterate(&decay_problem(1.2, 0.1), &cfg()).unwrap();
    assert!(traj.converged && traj.certified);
    for i in 0..traj.times.len() {
        let t = traj.times[i];
        assert!((traj.xi[i] - 0.2 * t.exp()).abs() < 1e-12);
        let gap = (traj.states[i][0] - (-t).exp()).abs();
        assert!(gap <= 0.2 * t.exp() + traj.slack[i]);
    }
}

#[test]
fn singleton_field_is_picard_iteration() {
    let prob = decay_problem(1.0, 0.0);
    let traj = filippov_iterate(&prob, &cfg()).unwrap();
    assert!(traj.converged);
    for (t, x) in traj.times.iter().zip(&traj.states) {
        assert!((x[0] - (-t).exp()).abs() < 1e-5);
    }
}

#[test]
fn residuals_contract_after_the_second_iteration() {
    for x0 in [0.6, 1.0, 1.4] {
        let traj = filippov_iterate(&decay_problem(x0, 0.1), &cfg()).unwrap();
        for w in traj.residuals.windows(2).skip(1) {
            assert!(w[1] <= w[0], "{:?}", traj.residuals);
        }
    }
}

#[test]
fn finite_differences_stay_near_the_field() {
    let traj = filippov_iterate(&decay_problem(1.3, 0.1), &cfg()).unwrap();
    let h = cfg().step;
    let tau = decay_field(0.1).radius();
    for i in 1..traj.times.len() - 1 {
        let fd = (traj.states[i + 1][0] - traj.states[i][0]) / h;
        let x = traj.states[i][0];
        let dist = ((fd + x).abs() - 0.1).max(0.0);
        let grid = (traj.velocities[i + 1][0] - traj.velocities[i][0]).abs();
        assert!(dist <= tau + grid + 1e-12, "t = {}: {dist}", traj.times[i]);
    }
}

#[test]
fn sampled_field_over_time_and_state() {
    let step = 1.0 / 64.0;
    let spec = SampledSpec {
        domain: BasicSet::closed_box(&[0.0, 0.0], &[1.0, 2.0]).unwrap(),
        step,
        range: Some(BasicSet::closed_box(&[-2.5], &[1.5]).unwrap()),
        scale: 1.0 / 4.0,
    };
    let pts = 33;
    // net spacing plus the drift of −x over half a cell diagonal
    let radius = 0.1 / (pts - 1) as f64 + step * 2f64.sqrt() / 2.0;
    let svf = build_sampled(spec, |c: &GridCell<f64>| {
        let x = c.center[1];
        Some(Net {
            points: (0..pts).map(|i| vec![-x - 0.1 + 0.2 * i as f64 / (pts - 1) as f64]).collect(),
            radius,
        })
    })
    .unwrap();
    let field = SvfField::new(svf).unwrap();
    let prob = decay_with(field, 1.2);
    let traj = filippov_iterate(&prob, &cfg()).unwrap();
    assert!(traj.converged && traj.certified, "{}", traj.max_violation);
}

proptest! {
    #[test]
    fn xi_is_monotone(delta in 0.0f64..2.0, k0 in 0.0f64..3.0, k1 in 0.0f64..3.0, p0 in 0.0f64..1.0) {
        let kappa = TimeFn::Table { knots: vec![(0.0, k0), (1.0, k1)] };
        let p = TimeFn::Linear { a: p0, b: 0.5 };
        let times: Vec<f64> = (0..=200).map(|i| i as f64 / 100.0).collect();
        let xi = xi_series(delta, &kappa, &p, &times);
        prop_assert_eq!(xi[0], delta);
        for w in xi.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn projection_is_nearest(pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..20),
                             target in prop::collection::vec(-5.0f64..5.0, 2)) {
        let best = projection_selector(&pts, &target).unwrap();
        let d = |p: &[f64]| (p[0] - target[0]).powi(2) + (p[1] - target[1]).powi(2);
        let first = pts.iter().position(|p| *p == best).unwrap();
        for (i, p) in pts.iter().enumerate() {
            prop_assert!(d(&best) <= d(p));
            if i < first {
                prop_assert!(d(p) > d(&best));
            }
        }
    }
}
