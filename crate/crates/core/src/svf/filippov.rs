use crate::error::Result;
use crate::setalg::BasicSet;

use super::build::{build_sampled, GridCell, Net, SampledSpec};
use super::RepresentableSvf;

#[derive(Clone, Debug, PartialEq)]
pub struct FilippovSpec {
    pub domain: BasicSet<f64>,
    pub step: f64,
    pub range: Option<BasicSet<f64>>,
    pub scale: f64,
    /// Number of sample points on the segment of a straddling cell.
    pub hull_steps: usize,
}

fn corners(cell: &BasicSet<f64>) -> Vec<Vec<f64>> {
    let a = cell.axes().expect("grid cells are nonempty");
    let mut out = vec![vec![]];
    for iv in a {
        out = out
            .into_iter()
            .flat_map(|p| {
                [iv.lo, iv.hi].into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Sampled map equal to `f1` where `sigma < 0`, to `f2` where `sigma > 0`,
/// and to the segment between them on cells whose corners do not share a
/// strict sign.
pub fn filippov_regularize<F1, F2, S>(
    spec: FilippovSpec,
    f1: F1,
    f2: F2,
    sigma: S,
) -> Result<RepresentableSvf<f64>>
where
    F1: Fn(&[f64]) -> Vec<f64> + Sync,
    F2: Fn(&[f64]) -> Vec<f64> + Sync,
    S: Fn(&[f64]) -> f64 + Sync,
{
    let steps = spec.hull_steps.max(2);
    let sampler = |c: &GridCell<f64>| {
        let signs: Vec<f64> = corners(&c.cell).iter().map(|p| sigma(p)).collect();
        let a = f1(&c.center);
        let b = f2(&c.center);
        let net = if signs.iter().all(|s| *s < 0.0) {
            Net { points: vec![a], radius: 0.0 }
        } else if signs.iter().all(|s| *s > 0.0) {
            Net { points: vec![b], radius: 0.0 }
        } else {
            let len = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            if len == 0.0 {
                Net { points: vec![a], radius: 0.0 }
            } else {
                let points = (0..steps)
                    .map(|j| {
                        let t = j as f64 / (steps - 1) as f64;
                        a.iter().zip(&b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
                    })
                    .collect();
                Net {
                    points,
                    radius: len / steps as f64,
                }
            }
        };
        Some(net)
    };
    build_sampled(
        SampledSpec {
            domain: spec.domain,
            step: spec.step,
            range: spec.range,
            scale: spec.scale,
        },
        sampler,
    )
}
