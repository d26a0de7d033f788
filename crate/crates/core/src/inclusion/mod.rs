//! Filippov iteration for Lipschitz differential inclusions `ẋ ∈ F(t, x)`.
//!
//! Each iteration projects the previous derivative onto a finite net of
//! `F(t, x_k(t))` at every grid time and integrates the result with the
//! trapezoid rule. The distance of the limit from a reference curve `g` is
//! compared against the Grönwall-type bound
//! `ξ(t) = δ e^{∫κ} + ∫ e^{∫_τ^t κ} p(τ) dτ`.

pub mod json;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svf::{RepresentableSvf, ValueSet};

/// Scalar function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TimeFn {
    Constant { value: f64 },
    /// `a + b t`.
    Linear { a: f64, b: f64 },
    /// Piecewise linear through `(t, v)` knots, constant beyond the ends.
    Table { knots: Vec<(f64, f64)> },
}

impl TimeFn {
    pub fn constant(value: f64) -> Self {
        TimeFn::Constant { value }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFn::Constant { value } => *value,
            TimeFn::Linear { a, b } => a + b * t,
            TimeFn::Table { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                match (i, knots.len()) {
                    (_, 0) => 0.0,
                    (0, _) => knots[0].1,
                    (i, n) if i == n => knots[n - 1].1,
                    (i, _) => {
                        let ((t0, v0), (t1, v1)) = (knots[i - 1], knots[i]);
                        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                    }
                }
            }
        }
    }
}

/// Reference curve `g` with its derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Curve {
    Constant { point: Vec<f64> },
    /// `origin + velocity · t`.
    Linear { origin: Vec<f64>, velocity: Vec<f64> },
    /// `start · e^{rate t}`.
    Exponential { start: Vec<f64>, rate: f64 },
}

impl Curve {
    pub fn dim(&self) -> usize {
        match self {
            Curve::Constant { point } => point.len(),
            Curve::Linear { origin, .. } => origin.len(),
            Curve::Exponential { start, .. } => start.len(),
        }
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        match self {
            Curve::Constant { point } => point.clone(),
            Curve::Linear { origin, velocity } => origin.iter().zip(velocity).map(|(o, v)| o + v * t).collect(),
            Curve::Exponential { start, rate } => start.iter().map(|s| s * (rate * t).exp()).collect(),
        }
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        match self {
            Curve::Constant { point } => vec![0.0; point.len()],
            Curve::Linear { velocity, .. } => velocity.clone(),
            Curve::Exponential { start, rate } => start.iter().map(|s| s * rate * (rate * t).exp()).collect(),
        }
    }
}

/// Right-hand side `F(t, x)` known through a projection oracle.
pub trait NetField: Sync {
    fn state_dim(&self) -> usize;

    /// A point of the stored representation of `F(t, x)` nearest to
    /// `target`, in state units.
    fn project(&self, t: f64, x: &[f64], target: &[f64]) -> Result<Vec<f64>>;

    /// Every point of `F(t, x)` lies within this distance of the stored
    /// representation.
    fn radius(&self) -> f64;
}

/// `F(t, x) = A x + b + [−w, w]^d`, netted with `points` samples per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineBoxField {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub w: f64,
    pub points: usize,
}

impl AffineBoxField {
    pub fn check(&self) -> Result<()> {
        let d = self.b.len();
        if d == 0 || self.a.len() != d || self.a.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidProblem("matrix a must be d×d with d = len(b) > 0".into()));
        }
        if !(self.w >= 0.0) || self.points == 0 || (self.w > 0.0 && self.points < 2) {
            return Err(Error::InvalidProblem("need w ≥ 0 and at least two net points when w > 0".into()));
        }
        Ok(())
    }
}

impl NetField for AffineBoxField {
    fn state_dim(&self) -> usize {
        self.b.len()
    }

    fn project(&self, t: f64, x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
        let net = self.net(t, x);
        Ok(projection_selector(&net, target).expect("nets are nonempty"))
    }

    fn radius(&self) -> f64 {
        if self.w == 0.0 {
            0.0
        } else {
            self.w / (self.points - 1) as f64 * (self.b.len() as f64).sqrt()
        }
    }
}

impl AffineBoxField {
    /// The `points^d` net of `F(t, x)`.
    pub fn net(&self, _t: f64, x: &[f64]) -> Vec<Vec<f64>> {
        let c: Vec<f64> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + bi)
            .collect();
        if self.w == 0.0 {
            return vec![c];
        }
        let m = self.points;
        let d = c.len();
        let offsets: Vec<f64> = (0..m).map(|i| -self.w + 2.0 * self.w * i as f64 / (m - 1) as f64).collect();
        let total = m.pow(d as u32);
        (0..total)
            .map(|mut f| {
                let mut p = c.clone();
                for k in (0..d).rev() {
                    p[k] += offsets[f % m];
                    f /= m;
                }
                p
            })
            .collect()
    }
}

/// Sampled or cellwise map over `(t, x)` with values in state units.
pub struct SvfField {
    svf: RepresentableSvf<f64>,
    radius: f64,
}

impl SvfField {
    pub fn new(svf: RepresentableSvf<f64>) -> Result<Self> {
        if svf.dim() != svf.range_dim() + 1 {
            return Err(Error::InvalidProblem(format!(
                "field over (t, x) needs domain dimension {} for range dimension {}",
                svf.range_dim() + 1,
                svf.range_dim()
            )));
        }
        let radius = svf.slack() * svf.range().max_shrink();
        Ok(SvfField { svf, radius })
    }

    pub fn svf(&self) -> &RepresentableSvf<f64> {
        &self.svf
    }
}

impl NetField for SvfField {
    fn state_dim(&self) -> usize {
        self.svf.range_dim()
    }

    fn project(&self, t: f64, x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
        let mut p = Vec::with_capacity(x.len() + 1);
        p.push(t);
        p.extend_from_slice(x);
        let c = self
            .svf
            .locate(&p)
            .ok_or_else(|| Error::InvalidProblem(format!("(t, x) = {p:?} leaves the field domain")))?;
        let v = self
            .svf
            .values(c)
            .ok_or_else(|| Error::InvalidProblem(format!("(t, x) = {p:?} lies in an excluded cell")))?;
        let range = self.svf.range();
        let r = range.normalize(target);
        let best = match v {
            ValueSet::Net(points) => projection_selector(points, &r),
            ValueSet::Exact(set) => set
                .parts()
                .iter()
                .filter_map(|b| b.closure().axes().map(|a| a.iter().zip(&r).map(|(iv, y)| y.clamp(iv.lo, iv.hi)).collect::<Vec<f64>>()))
                .min_by(|a, b| dist2(a, &r).total_cmp(&dist2(b, &r))),
        };
        Ok(range.denormalize(&best.expect("value sets are nonempty")))
    }

    fn radius(&self) -> f64 {
        self.radius
    }
}

/// Nearest net point to `target`; ties go to the lowest index.
pub fn projection_selector(net: &[Vec<f64>], target: &[f64]) -> Option<Vec<f64>> {
    let mut best: Option<(f64, &Vec<f64>)> = None;
    for p in net {
        let d = dist2(p, target);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, p));
        }
    }
    best.map(|(_, p)| p.clone())
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn norm(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// `ξ` on the grid `times` (starting at 0) by composite trapezoid rule.
pub fn xi_series(delta: f64, kappa: &TimeFn, p: &TimeFn, times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    // running K(t) = ∫κ and I(t) = ∫ e^{-K} p, so ξ = e^{K} (δ + I)
    let (mut big_k, mut integral): (f64, f64) = (0.0, 0.0);
    let mut prev_t = 0.0;
    let mut prev_g = (-big_k).exp() * p.eval(0.0);
    for &t in times {
        let h = t - prev_t;
        if h > 0.0 {
            big_k += 0.5 * h * (kappa.eval(prev_t) + kappa.eval(t));
            let g = (-big_k).exp() * p.eval(t);
            integral += 0.5 * h * (prev_g + g);
            prev_g = g;
            prev_t = t;
        }
        out.push(big_k.exp() * (delta + integral));
    }
    out
}

/// `ξ(t)` with trapezoid step `h`.
pub fn xi_bound(delta: f64, kappa: &TimeFn, p: &TimeFn, t: f64, h: f64) -> f64 {
    if t <= 0.0 {
        return delta;
    }
    let n = (t / h).ceil().max(1.0) as usize;
    let times: Vec<f64> = (1..=n).map(|i| (i as f64 * h).min(t)).collect();
    *xi_series(delta, kappa, p, &times).last().expect("at least one step")
}

/// Inclusion problem on `[0, horizon]`.
pub struct DiProblem<F> {
    pub field: F,
    pub x0: Vec<f64>,
    pub g: Curve,
    pub kappa: TimeFn,
    pub p: TimeFn,
    /// Tube radius around `g`.
    pub beta: f64,
    pub horizon: f64,
}

impl<F: NetField> DiProblem<F> {
    pub fn delta(&self) -> f64 {
        norm(&self.x0, &self.g.at(0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.field.state_dim();
        if self.x0.len() != d || self.g.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if self.x0.len() != d { self.x0.len() } else { self.g.dim() },
            });
        }
        if !(self.horizon > 0.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidProblem("horizon and tube radius must be positive".into()));
        }
        if self.delta() > self.beta {
            return Err(Error::InvalidProblem(format!(
                "|x0 − g(0)| = {} exceeds the tube radius {}",
                self.delta(),
                self.beta
            )));
        }
        Ok(())
    }
}

/// Iteration controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterConfig {
    pub step: f64,
    pub max_iter: usize,
    pub tol: f64,
}

/// Solution on the time grid with its certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Selector values `v(t_i)`; the states integrate them by trapezoids.
    pub velocities: Vec<Vec<f64>>,
    pub xi: Vec<f64>,
    /// Accumulated net, residual and quadrature error added to `ξ`.
    pub slack: Vec<f64>,
    /// `sup_t |x_{k+1} − x_k|` per iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Largest `|x − g| − ξ − slack` over the grid; nonpositive when the
    /// bound holds.
    pub max_violation: f64,
    /// Whether the trajectory stays where `ξ ≤ β`, inside the tube.
    pub tube_ok: bool,
    pub certified: bool,
}

impl DiTrajectory {
    pub fn residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::INFINITY)
    }

    /// Rows `t, x…, v…, ξ`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.times.len())
            .map(|i| {
                let mut r = vec![self.times[i]];
                r.extend(&self.states[i]);
                r.extend(&self.velocities[i]);
                r.push(self.xi[i]);
                r
            })
            .collect()
    }
}

fn integrate(x0: &[f64], v: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(v.len());
    let mut x = x0.to_vec();
    out.push(x.clone());
    for w in v.windows(2) {
        for k in 0..x.len() {
            x[k] += 0.5 * h * (w[0][k] + w[1][k]);
        }
        out.push(x.clone());
    }
    out
}

/// Runs the Filippov iteration and checks the `ξ` bound at every grid time.
pub fn filippov_iterate<F: NetField>(prob: &DiProblem<F>, cfg: &IterConfig) -> Result<DiTrajectory> {
    prob.validate()?;
    let steps = (prob.horizon / cfg.step).round();
    if !(cfg.step > 0.0) || steps < 1.0 || ((steps * cfg.step) - prob.horizon).abs() > 1e-9 * prob.horizon {
        return Err(Error::InvalidArgument(format!(
            "step {} does not divide the horizon {}",
            cfg.step, prob.horizon
        )));
    }
    let n = steps as usize;
    let h = prob.horizon / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let shift: Vec<f64> = prob.x0.iter().zip(prob.g.at(0.0)).map(|(a, b)| a - b).collect();
    let mut states: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| prob.g.at(t).iter().zip(&shift).map(|(g, s)| g + s).collect())
        .collect();
    let mut targets: Vec<Vec<f64>> = times.iter().map(|&t| prob.g.derivative(t)).collect();
    let mut residuals = Vec::new();
    let mut velocities = targets.clone();
    let mut converged = false;
    for _ in 0..cfg.max_iter.max(1) {
        velocities = times
            .par_iter()
            .zip(states.par_iter().zip(targets.par_iter()))
            .map(|(&t, (x, target))| {
                prob.field.project(t, x, target)
            })
            .collect::<Result<Vec<_>>>()?;
        let next = integrate(&prob.x0, &velocities, h);
        let res = next.iter().zip(&states).map(|(a, b)| norm(a, b)).fold(0.0, f64::max);
        residuals.push(res);
        states = next;
        targets = velocities.clone();
        if res < cfg.tol {
            converged = true;
            break;
        }
    }

    let delta = prob.delta();
    let xi = xi_series(delta, &prob.kappa, &prob.p, &times);
    let tau = prob.field.radius();
    let r = residuals.last().copied().unwrap_or(0.0);
    let mut slack = Vec::with_capacity(times.len());
    let mut s = 0.0;
    slack.push(s);
    for i in 0..n {
        let kap = prob.kappa.eval(times[i]).max(prob.kappa.eval(times[i + 1]));
        let jump = norm(&velocities[i + 1], &velocities[i]);
        s = s * (kap * h).exp() + h * (tau + kap * r + jump);
        slack.push(s);
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut tube_ok = true;
    for i in 0..=n {
        let gap = norm(&states[i], &prob.g.at(times[i]));
        max_violation = max_violation.max(gap - xi[i] - slack[i]);
        if xi[i] <= prob.beta && gap > prob.beta + slack[i] {
            tube_ok = false;
        }
    }
    Ok(DiTrajectory {
        certified: converged && max_violation <= 0.0 && tube_ok,
        times,
        states,
        velocities,
        xi,
        slack,
        residuals,
        converged,
        max_violation,
        tube_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let f = AffineBoxField {
            a: vec![vec![1.0]],
            b: vec![0.0],
            w: 1.0,
            points: 3,
        };
        f.check().unwrap();
        let net = f.net(0.0, &[0.0]);
        assert_eq!(net, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        assert_eq!(projection_selector(&net, &[2.0]), Some(vec![1.0]));
        assert_eq!(projection_selector(&net, &[0.5]), Some(vec![0.0]));
        assert_eq!(projection_selector(&[vec![3.0]], &[-7.0]), Some(vec![3.0]));
        assert_eq!(projection_selector(&[], &[0.0]), None);
    }

    #[test]
    fn xi_closed_forms() {
        let l = 0.7;
        let kappa = TimeFn::constant(l);
        let zero = TimeFn::constant(0.0);
        assert_eq!(xi_bound(0.3, &kappa, &zero, 0.0, 0.01), 0.3);
        for t in [0.25, 1.0, 2.0] {
            let v = xi_bound(0.5, &kappa, &zero, t, 0.01);
            assert!((v - 0.5 * (l * t).exp()).abs() < 1e-12);
            let p0 = 0.2;
            let w = xi_bound(0.0, &kappa, &TimeFn::constant(p0), t, 0.001);
            let exact = p0 * ((l * t).exp() - 1.0) / l;
            assert!((w - exact).abs() < 1e-6 * exact.max(1.0), "{w} vs {exact}");
        }
    }

    #[test]
    fn time_fn_table() {
        let f = TimeFn::Table {
            knots: vec![(0.0, 1.0), (1.0, 3.0)],
        };
        assert_eq!(f.eval(-1.0), 1.0);
        assert_eq!(f.eval(0.5), 2.0);
        assert_eq!(f.eval(4.0), 3.0);
    }
}
