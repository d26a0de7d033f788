use serde::Serialize;

use crate::scalar::Scalar;
use crate::svf::sq_dist;

use super::SelectorChain;

/// Disagreement between two levels of a chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyEntry {
    pub k: u32,
    pub m: u32,
    /// `2^-(k-2)`.
    pub threshold: f64,
    pub max_diff: f64,
    /// Measure of `{x : |f_k − f_m| ≥ threshold}` plus the cells where only
    /// one of the two maps is defined.
    pub bad_measure: f64,
    /// Sum of the two steps' witness budgets.
    pub allowed: f64,
    pub passes: bool,
}

/// Pairwise Cauchy-in-measure check for all `2 ≤ k < m ≤ n`.
pub fn cauchy_report<T: Scalar>(chain: &SelectorChain<T>) -> Vec<CauchyEntry> {
    let svf = chain.svf();
    let measures: Vec<f64> = (0..svf.cell_count()).map(|c| svf.cell(c).measure().as_f64()).collect();
    let mut out = Vec::new();
    for k in 2..chain.n() {
        for m in k + 1..=chain.n() {
            let (a, b) = (chain.step(k), chain.step(m));
            let threshold = 0.5f64.powi(k as i32 - 2);
            let (mut max_diff, mut bad): (f64, f64) = (0.0, 0.0);
            for (c, mc) in measures.iter().enumerate() {
                match (a.value::<T>(c), b.value::<T>(c)) {
                    (Some(u), Some(v)) => {
                        let d = sq_dist(&u, &v).as_f64().sqrt();
                        max_diff = max_diff.max(d);
                        if d >= threshold {
                            bad += mc;
                        }
                    }
                    (None, None) => {}
                    _ => bad += mc,
                }
            }
            let allowed = a.certificate().witness_budget + b.certificate().witness_budget;
            out.push(CauchyEntry {
                k,
                m,
                threshold,
                max_diff,
                bad_measure: bad,
                allowed,
                passes: bad <= allowed,
            });
        }
    }
    out
}

/// Outcome of validating a piecewise-constant extension of `f_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakContinuityReport {
    /// `2^-(n-1)`.
    pub eps: f64,
    pub slack: f64,
    /// Largest distance from a grid point to the probe it copies.
    pub max_spacing: f64,
    pub grid_points: usize,
    pub bad_points: usize,
    /// Bad grid points times the grid cell volume.
    pub bad_measure: f64,
    pub max_error: f64,
    pub passes: bool,
}

/// Extends `f_n` from the ordered `probes` piecewise constantly and checks
/// `|f̂ − F| < 2^-(n-1) + τ` at the centres of a `res^d` grid over the domain.
///
/// In one dimension a point takes the value of the last probe at or below
/// it (the first probe for points left of all probes); in higher
/// dimensions it takes the nearest probe. Probes outside `dom(f_n)` are
/// skipped; grid points outside `dom F` are not counted.
pub fn weak_continuity_pass<T: Scalar>(
    chain: &SelectorChain<T>,
    probes: &[Vec<T>],
    res: usize,
) -> WeakContinuityReport {
    let svf = chain.svf();
    let n = chain.n();
    let eps = 0.5f64.powi(n as i32 - 1);
    let slack = svf.slack().as_f64();
    let mut known: Vec<(Vec<f64>, Vec<T>)> = probes
        .iter()
        .filter_map(|p| chain.value_at(n, p).map(|v| (p.iter().map(Scalar::as_f64).collect(), v)))
        .collect();
    let dim = svf.dim();
    if dim == 1 {
        known.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
    }
    let axes = svf.domain().axes().expect("domain boxes are nonempty");
    let lo: Vec<f64> = axes.iter().map(|a| a.lo.as_f64()).collect();
    let size: Vec<f64> = axes.iter().map(|a| a.length().as_f64() / res as f64).collect();
    let cell_volume: f64 = size.iter().product();
    let total = res.pow(dim as u32);

    let mut report = WeakContinuityReport {
        eps,
        slack,
        max_spacing: 0.0,
        grid_points: 0,
        bad_points: 0,
        bad_measure: 0.0,
        max_error: 0.0,
        passes: false,
    };
    if known.is_empty() || res == 0 {
        return report;
    }
    for mut f in 0..total {
        let mut x = vec![0.0; dim];
        for k in (0..dim).rev() {
            x[k] = lo[k] + (f % res) as f64 * size[k] + size[k] / 2.0;
            f /= res;
        }
        let Some(xt) = x.iter().map(|&v| T::from_f64_exact(v)).collect::<Option<Vec<T>>>() else {
            continue;
        };
        let Some(cell) = svf.locate(&xt) else { continue };
        let Some(values) = svf.values(cell) else { continue };
        let src = if dim == 1 {
            let i = known.partition_point(|p| p.0[0] <= x[0]);
            &known[i.saturating_sub(1)]
        } else {
            known
                .iter()
                .min_by(|a, b| dist_f64(&a.0, &x).total_cmp(&dist_f64(&b.0, &x)))
                .expect("probes are nonempty")
        };
        report.max_spacing = report.max_spacing.max(dist_f64(&src.0, &x));
        let err = values.dist(&src.1);
        report.grid_points += 1;
        report.max_error = report.max_error.max(err);
        if err >= eps + slack {
            report.bad_points += 1;
        }
    }
    report.bad_measure = report.bad_points as f64 * cell_volume;
    report.passes = report.bad_measure < eps;
    report
}

fn dist_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// One sample of a section through `f_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionRow {
    pub x: Vec<f64>,
    /// Value in original range coordinates, `None` outside `dom(f_n)`.
    pub value: Option<Vec<f64>>,
}

/// Samples `f_n` on `res + 1` points per free axis, holding the axes with
/// `Some` in `fixed` at the given coordinate. Witnesses are ignored.
pub fn section<T: Scalar>(chain: &SelectorChain<T>, fixed: &[Option<f64>], res: usize) -> Vec<SectionRow> {
    let svf = chain.svf();
    let axes = svf.domain().axes().expect("domain boxes are nonempty");
    let free: Vec<usize> = (0..svf.dim()).filter(|&k| fixed.get(k).copied().flatten().is_none()).collect();
    let per = res + 1;
    let total = per.pow(free.len() as u32);
    let mut rows = Vec::with_capacity(total);
    for mut f in 0..total {
        let mut x: Vec<f64> = (0..svf.dim()).map(|k| fixed.get(k).copied().flatten().unwrap_or(0.0)).collect();
        for &k in free.iter().rev() {
            let (a, b) = (axes[k].lo.as_f64(), axes[k].hi.as_f64());
            let i = f % per;
            f /= per;
            x[k] = match i {
                _ if res == 0 => a,
                i if i == res => b,
                i => a + (b - a) * i as f64 / res as f64,
            };
        }
        let value = x
            .iter()
            .map(|&v| T::from_f64_exact(v))
            .collect::<Option<Vec<T>>>()
            .and_then(|xt| chain.value_at(chain.n(), &xt))
            .map(|r| svf.range().denormalize(&r).iter().map(Scalar::as_f64).collect());
        rows.push(SectionRow { x, value });
    }
    rows
}
