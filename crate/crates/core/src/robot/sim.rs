use serde::Serialize;

use crate::selector::{EvalResult, Evaluator};

use super::{analytic_subgradient, clf_value, control_law, dynamics, ClfConfig, RobotState};

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub x0: RobotState,
    pub horizon: f64,
    /// Zero-order-hold period of the control.
    pub dt_control: f64,
    /// Euler substeps per control period.
    pub substeps: usize,
    /// Leaving `[−half_width, half_width]³` ends the run.
    pub half_width: f64,
    pub clf: ClfConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            x0: [1.0, 1.0, 1.0],
            horizon: 10.0,
            dt_control: 0.01,
            substeps: 10,
            half_width: 2.0,
            clf: ClfConfig::default(),
        }
    }
}

/// Source of the subgradient fed to the control law.
pub enum Controller<'a> {
    Analytic,
    /// Holds the previous control wherever the selector is undefined. At
    /// the first step there is none, so the containing cell's value is used.
    Selector(&'a Evaluator<'a, f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSample {
    pub t: f64,
    pub x: RobotState,
    pub u: [f64; 2],
    pub v: f64,
    /// The selector was undefined at `x`.
    pub held: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRecord {
    pub samples: Vec<SimSample>,
    /// `Σ |u_k − u_{k−1}|` over control updates.
    pub total_variation: f64,
    /// The state left the working box before the horizon.
    pub truncated: bool,
    pub held_steps: usize,
}

fn sup_norm(x: &RobotState) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

impl SimRecord {
    pub fn final_state(&self) -> RobotState {
        self.samples.last().map_or([0.0; 3], |s| s.x)
    }

    pub fn final_norm(&self) -> f64 {
        sup_norm(&self.final_state())
    }

    /// Largest one-period increase of `V` among periods starting at
    /// `‖x‖∞ ≥ min_norm`; `−∞` if there are none.
    pub fn max_v_increase(&self, min_norm: f64) -> f64 {
        self.samples
            .windows(2)
            .filter(|w| sup_norm(&w[0].x) >= min_norm)
            .map(|w| w[1].v - w[0].v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Closed loop under a zero-order hold with Euler substeps.
pub fn simulate(ctrl: &Controller<'_>, cfg: &SimConfig) -> SimRecord {
    let periods = (cfg.horizon / cfg.dt_control).round() as usize;
    let h = cfg.dt_control / cfg.substeps as f64;
    let mut x = cfg.x0;
    let mut prev = [0.0; 2];
    let mut samples = Vec::with_capacity(periods + 1);
    let mut total_variation = 0.0;
    let mut held_steps = 0;
    let mut truncated = false;
    for k in 0..=periods {
        let t = k as f64 * cfg.dt_control;
        if sup_norm(&x) > cfg.half_width || x.iter().any(|v| !v.is_finite()) {
            truncated = true;
            break;
        }
        let (u, held) = match ctrl {
            Controller::Analytic => (control_law(&analytic_subgradient(&x, &cfg.clf), &x), false),
            Controller::Selector(ev) => match ev.eval(&x) {
                EvalResult::Value(z) => (control_law(&[z[0], z[1], z[2]], &x), false),
                EvalResult::Undefined(_) if k > 0 => (prev, true),
                EvalResult::Undefined(_) => match ev.cell_value(&x) {
                    Some(z) => (control_law(&[z[0], z[1], z[2]], &x), true),
                    None => (prev, true),
                },
            },
        };
        if k > 0 {
            total_variation += ((u[0] - prev[0]).powi(2) + (u[1] - prev[1]).powi(2)).sqrt();
        }
        held_steps += held as usize;
        samples.push(SimSample {
            t,
            x,
            u,
            v: clf_value(&x, &cfg.clf).v,
            held,
        });
        prev = u;
        if k == periods {
            break;
        }
        for _ in 0..cfg.substeps {
            let dx = dynamics(&x, &u);
            for i in 0..3 {
                x[i] += h * dx[i];
            }
        }
    }
    SimRecord {
        samples,
        total_variation,
        truncated,
        held_steps,
    }
}
