//! Nonholonomic integrator stabilized through disassembled subgradients of
//! the marginal function
//! `F(x, θ) = x₁⁴ + x₂⁴ + |x₃|³ / (x₁ cos θ + x₂ sin θ + √|x₃|)²`.

mod export;
mod sim;

pub use export::{export_svf, ExportConfig, ExportReport};
pub use sim::{simulate, Controller, SimConfig, SimRecord, SimSample};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub type RobotState = [f64; 3];

/// Tolerances of the `θ` minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClfConfig {
    /// Points of the uniform grid on `[0, 2π)`.
    pub theta_grid: usize,
    /// Golden-section iterations around the best grid point.
    pub refine_levels: usize,
    pub denom_floor: f64,
    /// Near-minimizer band is `argmin_tol · (1 + V)`.
    pub argmin_tol: f64,
}

impl Default for ClfConfig {
    fn default() -> Self {
        ClfConfig {
            theta_grid: 256,
            refine_levels: 40,
            denom_floor: 1e-6,
            argmin_tol: 1e-4,
        }
    }
}

impl ClfConfig {
    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.theta_grid as f64
    }
}

fn denom(x: &RobotState, theta: f64) -> f64 {
    x[0] * theta.cos() + x[1] * theta.sin() + x[2].abs().sqrt()
}

/// `F(x, θ)`, or `+∞` when the denominator is below `denom_floor` in
/// magnitude and `x₃ ≠ 0`.
pub fn marginal_value(x: &RobotState, theta: f64, denom_floor: f64) -> f64 {
    let base = x[0].powi(4) + x[1].powi(4);
    if x[2] == 0.0 {
        return base;
    }
    let d = denom(x, theta);
    if d.abs() < denom_floor {
        return f64::INFINITY;
    }
    base + x[2].abs().powi(3) / (d * d)
}

/// `∂F(x, θ)/∂x`. The `x₃` partial is
/// `sgn(x₃) (3x₃²/d² − |x₃|^{5/2}/d³)`, taken as 0 at `x₃ = 0`.
pub fn marginal_gradient(x: &RobotState, theta: f64) -> [f64; 3] {
    let a = x[2].abs();
    let mut g = [4.0 * x[0].powi(3), 4.0 * x[1].powi(3), 0.0];
    if a == 0.0 {
        return g;
    }
    let d = denom(x, theta);
    let (d2, d3) = (d * d, d * d * d);
    g[0] -= 2.0 * a.powi(3) * theta.cos() / d3;
    g[1] -= 2.0 * a.powi(3) * theta.sin() / d3;
    g[2] = x[2].signum() * (3.0 * a * a / d2 - a.powf(2.5) / d3);
    g
}

/// Value of the CLF with its near-minimizers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClfValue {
    pub v: f64,
    /// Refined minimizer, `None` at the origin.
    pub theta_star: Option<f64>,
    /// Grid angles within the band, plus `theta_star` when it beats them.
    pub minimizers: Vec<f64>,
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// `V(x) = min_θ F(x, θ)` by grid search and golden-section refinement.
pub fn clf_value(x: &RobotState, cfg: &ClfConfig) -> ClfValue {
    if x.iter().all(|v| *v == 0.0) {
        return ClfValue {
            v: 0.0,
            theta_star: None,
            minimizers: (0..cfg.theta_grid).map(|j| cfg.theta(j)).collect(),
        };
    }
    let f = |t: f64| marginal_value(x, t, cfg.denom_floor);
    let values: Vec<f64> = (0..cfg.theta_grid).map(|j| f(cfg.theta(j))).collect();
    let (best, grid_min) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j, v) } else { acc });
    let step = TAU / cfg.theta_grid as f64;
    let t0 = cfg.theta(best);
    let ts = golden_section(f, t0 - step, t0 + step, cfg.refine_levels).rem_euclid(TAU);
    let fs = f(ts);
    let (v, theta_star) = if fs < grid_min { (fs, ts) } else { (grid_min, t0) };
    let band = cfg.argmin_tol * (1.0 + v);
    let mut minimizers: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|(_, &val)| val <= v + band)
        .map(|(j, _)| cfg.theta(j))
        .collect();
    if fs < grid_min {
        minimizers.push(ts);
    }
    ClfValue {
        v,
        theta_star: Some(theta_star),
        minimizers,
    }
}

/// `{∂F(x, θ*)/∂x : θ* near-minimizer}`, duplicates removed. Empty when
/// every angle hits the denominator floor.
pub fn disassembled_subgradients(x: &RobotState, cfg: &ClfConfig) -> Vec<[f64; 3]> {
    let val = clf_value(x, cfg);
    if !val.v.is_finite() {
        return Vec::new();
    }
    if val.theta_star.is_none() {
        return vec![[0.0; 3]];
    }
    let mut out: Vec<[f64; 3]> = Vec::new();
    for t in val.minimizers {
        let g = marginal_gradient(x, t);
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Envelope gradient at the located minimizer off the `x₃` axis,
/// `∂F(x, 0)/∂x` on it.
pub fn analytic_subgradient(x: &RobotState, cfg: &ClfConfig) -> [f64; 3] {
    if x[0] * x[0] + x[1] * x[1] > cfg.denom_floor * cfg.denom_floor {
        match clf_value(x, cfg).theta_star {
            Some(t) => marginal_gradient(x, t),
            None => [0.0; 3],
        }
    } else {
        marginal_gradient(x, 0.0)
    }
}

/// `−(⟨ζ, g₁(x)⟩, ⟨ζ, g₂(x)⟩)` with `g₁ = (1, 0, −x₂)`, `g₂ = (0, 1, x₁)`.
pub fn control_law(zeta: &[f64; 3], x: &RobotState) -> [f64; 2] {
    [-(zeta[0] - zeta[2] * x[1]), -(zeta[1] + zeta[2] * x[0])]
}

/// Right-hand side of the integrator.
pub fn dynamics(x: &RobotState, u: &[f64; 2]) -> RobotState {
    [u[0], u[1], -x[1] * u[0] + x[0] * u[1]]
}

/// Largest ratio `(V(x) + V(y) − 2V((x+y)/2)) / |x − y|²` over the pairs.
pub fn semiconcavity_fit(pairs: &[(RobotState, RobotState)], cfg: &ClfConfig) -> f64 {
    pairs
        .iter()
        .map(|(x, y)| {
            let m = [(x[0] + y[0]) / 2.0, (x[1] + y[1]) / 2.0, (x[2] + y[2]) / 2.0];
            let gap = (0..3).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>();
            let num = clf_value(x, cfg).v + clf_value(y, cfg).v - 2.0 * clf_value(&m, cfg).v;
            if gap > 0.0 {
                num / gap
            } else {
                0.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
