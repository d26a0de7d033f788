use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::setalg::BasicSet;
use crate::svf::{build_sampled_normalized, half_ball_scale, GridCell, Net, RangeMap, RepresentableSvf, SampledSpec};

use super::{disassembled_subgradients, ClfConfig, RobotState};

#[derive(Clone, Debug, PartialEq)]
pub struct ExportConfig {
    /// The domain is `[−half_width, half_width]³`.
    pub half_width: f64,
    /// Grid step; `2·half_width/step` must be a whole number.
    pub step: f64,
    /// Net thinning distance in normalized range units.
    pub thin: f64,
    pub clf: ClfConfig,
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig {
            half_width: 2.0,
            step: 0.125,
            thin: 1.0 / 256.0,
            clf: ClfConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExportReport {
    pub cells: usize,
    pub max_net_points: usize,
    /// Largest per-cell covering radius in normalized range units.
    pub tau: f64,
    pub range_lo: Vec<f64>,
    pub range_width: Vec<f64>,
    pub scale: f64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Samples the disassembled subgradients on a grid over the working box.
///
/// Each cell's net collects the subgradients at its corners, edge and face
/// midpoints and center, thinned so that kept points are `thin` apart in
/// normalized units. Its radius is the larger of `thin` and the normalized
/// distance from the subgradients at the eight points halfway between center
/// and corners to that net.
pub fn export_svf(cfg: &ExportConfig) -> Result<(RepresentableSvf<f64>, ExportReport)> {
    let w = cfg.half_width;
    let cells_per_axis = (2.0 * w / cfg.step).round() as usize;
    let m = 2 * cells_per_axis + 1;
    let half = cfg.step / 2.0;
    let coord = |i: usize| -w + half * i as f64;
    let lattice: Vec<Vec<[f64; 3]>> = (0..m * m * m)
        .into_par_iter()
        .map(|f| {
            let x = [coord(f / (m * m)), coord(f / m % m), coord(f % m)];
            disassembled_subgradients(&x, &cfg.clf)
        })
        .collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for g in lattice.iter().flatten() {
        for k in 0..3 {
            lo[k] = lo[k].min(g[k]);
            hi[k] = hi[k].max(g[k]);
        }
    }
    let range_box = BasicSet::closed_box(&lo, &hi)?;
    let map = RangeMap::from_box(&range_box, half_ball_scale(3))?;
    let spec = SampledSpec {
        domain: BasicSet::closed_box(&[-w; 3], &[w; 3])?,
        step: cfg.step,
        range: Some(range_box),
        scale: half_ball_scale(3),
    };
    let thin2 = cfg.thin * cfg.thin;
    let sampler = |c: &GridCell<f64>| {
        let base: Vec<usize> = c.center.iter().map(|v| ((v + w) / half).round() as usize - 1).collect();
        let mut kept: Vec<Vec<f64>> = Vec::new();
        let mut normed: Vec<Vec<f64>> = Vec::new();
        let mut thinned = false;
        for di in 0..27 {
            let (a, b, k) = (base[0] + di / 9, base[1] + di / 3 % 3, base[2] + di % 3);
            for g in &lattice[(a * m + b) * m + k] {
                let r = map.normalize(g);
                match normed.iter().map(|p| dist2(p, &r)).fold(f64::INFINITY, f64::min) {
                    0.0 => {}
                    d if d < thin2 => thinned = true,
                    _ => {
                        kept.push(g.to_vec());
                        normed.push(r);
                    }
                }
            }
        }
        let q = cfg.step / 4.0;
        let mut radius: f64 = if thinned { cfg.thin } else { 0.0 };
        for corner in 0..8 {
            let s = |bit: usize| if corner >> bit & 1 == 1 { q } else { -q };
            let y: RobotState = [c.center[0] + s(2), c.center[1] + s(1), c.center[2] + s(0)];
            for g in disassembled_subgradients(&y, &cfg.clf) {
                let r = map.normalize(&g);
                let near = normed.iter().map(|p| dist2(p, &r)).fold(f64::INFINITY, f64::min);
                radius = radius.max(near.sqrt());
            }
        }
        Some(Net { points: kept, radius })
    };
    let svf = build_sampled_normalized(spec, sampler)?;
    let max_net_points = (0..svf.cell_count())
        .filter_map(|i| svf.values(i))
        .map(|v| v.points().len())
        .max()
        .unwrap_or(0);
    let range = svf.range();
    let report = ExportReport {
        cells: svf.cell_count(),
        max_net_points,
        tau: *svf.slack(),
        range_lo: range.lo().to_vec(),
        range_width: range.width().to_vec(),
        scale: *range.scale(),
    };
    Ok((svf, report))
}
