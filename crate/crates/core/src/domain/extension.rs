use crate::error::{Error, Result};
use crate::scalar::{cmp_scalar, Scalar};
use crate::setalg::{arrangement, BasicSet, GeneralizedSet};

use super::piecewise::PiecewiseConstantMap;
use super::representable::boundary_margin;
use super::witness::BudgetRule;

#[derive(Clone, Debug)]
struct Ramp {
    a: f64,
    b: f64,
    va: Vec<f64>,
    vb: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Kind {
    Constant(Vec<f64>),
    /// Linear interpolation across each witness component (one dimension).
    Ramp(Vec<Ramp>),
    /// Normalized tent weights `max(0, 1 - d∞(x, Q_n)/δ)`.
    Blend { delta: f64 },
}

/// Continuous map agreeing with a piecewise-constant map outside a small
/// exceptional set.
#[derive(Clone, Debug)]
pub struct ContinuousExtension {
    pieces: Vec<(Vec<BasicSet<f64>>, Vec<f64>)>,
    kind: Kind,
    lipschitz: f64,
}

impl ContinuousExtension {
    /// Lipschitz bound used by the continuity checks.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn lookup(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.pieces
            .iter()
            .find(|(parts, _)| parts.iter().any(|p| p.contains(x)))
            .map(|(_, v)| v.clone())
    }

    pub fn eval(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Constant(v) => Some(v.clone()),
            Kind::Ramp(ramps) => {
                if let Some(r) = ramps.iter().find(|r| r.a < x[0] && x[0] < r.b) {
                    let s = (x[0] - r.a) / (r.b - r.a);
                    return Some(r.va.iter().zip(&r.vb).map(|(a, b)| a + s * (b - a)).collect());
                }
                self.lookup(x)
            }
            Kind::Blend { delta } => {
                let beta = self.pieces.first()?.1.len();
                let mut acc = vec![0.0; beta];
                let mut total = 0.0;
                for (parts, v) in &self.pieces {
                    let dist = parts
                        .iter()
                        .filter_map(|p| p.cheb_dist(x))
                        .fold(f64::INFINITY, f64::min);
                    let w = (1.0 - dist / delta).max(0.0);
                    if w > 0.0 {
                        total += w;
                        for (a, vi) in acc.iter_mut().zip(v) {
                            *a += w * vi;
                        }
                    }
                }
                (total > 0.0).then(|| acc.into_iter().map(|a| a / total).collect())
            }
        }
    }
}

pub struct Extension<T> {
    pub g: ContinuousExtension,
    /// Exceptional set `J` outside which `g = f`.
    pub exception: GeneralizedSet<T>,
    /// Largest number of pieces whose δ-boxes meet one cell of the cover.
    pub adjacency: usize,
}

fn value_spread(values: &[&Vec<f64>]) -> f64 {
    let mut s: f64 = 0.0;
    for a in values {
        for b in values {
            for (x, y) in a.iter().zip(b.iter()) {
                s = s.max((x - y).abs());
            }
        }
    }
    s
}

/// Builds `g` and `J` with `‖J‖ ≤ eps` and `g = f` on the ambient box minus `J`.
pub fn continuous_extension<T: Scalar>(
    f: &PiecewiseConstantMap<T>,
    eps: &T,
    rule: BudgetRule,
) -> Result<Extension<T>> {
    let dim = f.dim();
    let pieces: Vec<(Vec<BasicSet<f64>>, Vec<f64>)> = f
        .pieces()
        .iter()
        .map(|p| {
            (
                p.set.parts().iter().map(BasicSet::to_f64).collect(),
                p.value.iter().map(Scalar::as_f64).collect(),
            )
        })
        .collect();
    let values: Vec<&Vec<f64>> = pieces.iter().map(|(_, v)| v).collect();
    let spread = value_spread(&values);
    let carrier = f.carrier().union();
    let covers_ambient = arrangement::uncovered_part(f.ambient(), &[], carrier.parts()).is_none();
    if spread == 0.0 && covers_ambient && !values.is_empty() {
        return Ok(Extension {
            g: ContinuousExtension {
                kind: Kind::Constant(values[0].clone()),
                pieces,
                lipschitz: 0.0,
            },
            exception: GeneralizedSet::empty(dim),
            adjacency: 1,
        });
    }
    let domain = f.domain(rule)?;
    let m = domain.witness_set(eps)?;
    if dim == 1 {
        let ramps = ramps_1d(f, &m)?;
        let lipschitz = ramps
            .iter()
            .map(|r| {
                let jump = r.va.iter().zip(&r.vb).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                jump / (r.b - r.a)
            })
            .fold(0.0, f64::max);
        return Ok(Extension {
            g: ContinuousExtension {
                pieces,
                kind: Kind::Ramp(ramps),
                lipschitz,
            },
            exception: m,
            adjacency: 2,
        });
    }
    let margin = boundary_margin(&domain.boundary_pieces(), &m)
        .ok_or_else(|| Error::NonRepresentable("boundary is not well contained in the witness".into()))?;
    let delta = margin.as_f64() / 2.0;
    let half = T::from_f64_exact(delta / 2.0).unwrap_or_else(|| margin.half().half());
    let groups: Vec<Vec<BasicSet<T>>> = f
        .pieces()
        .iter()
        .map(|p| p.set.parts().iter().map(|q| q.inflate_open(&half)).collect())
        .collect();
    let (adjacency, bare) = arrangement::cover_degree(f.ambient(), &groups);
    if let Some(cell) = bare {
        return Err(Error::NotExtendable(format!("{:?}", cell.to_f64())));
    }
    // each tent is 1/δ-Lipschitz and the weights sum to at least 1/2
    let lipschitz = 2.0 * adjacency as f64 * spread / delta;
    Ok(Extension {
        g: ContinuousExtension {
            pieces,
            kind: Kind::Blend { delta },
            lipschitz,
        },
        exception: m,
        adjacency,
    })
}

fn ramps_1d<T: Scalar>(f: &PiecewiseConstantMap<T>, m: &GeneralizedSet<T>) -> Result<Vec<Ramp>> {
    let mut comps: Vec<(T, T)> = m
        .parts()
        .iter()
        .filter_map(|p| p.axes().map(|a| (a[0].lo.clone(), a[0].hi.clone())))
        .collect();
    comps.sort_by(|a, b| cmp_scalar(&a.0, &b.0));
    let mut merged: Vec<(T, T)> = Vec::new();
    for (lo, hi) in comps {
        match merged.last_mut() {
            Some(last) if lo < last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    let mut ramps = Vec::new();
    for (a, b) in merged {
        let va = f.eval(std::slice::from_ref(&a)).map(|v| v.iter().map(Scalar::as_f64).collect::<Vec<_>>());
        let vb = f.eval(std::slice::from_ref(&b)).map(|v| v.iter().map(Scalar::as_f64).collect::<Vec<_>>());
        for (end, v) in [(&a, &va), (&b, &vb)] {
            if v.is_none() && f.ambient().contains(std::slice::from_ref(end)) {
                return Err(Error::NonRepresentable(format!(
                    "map undefined at witness endpoint {} inside the ambient box",
                    end.as_f64()
                )));
            }
        }
        let (va, vb) = match (va, vb) {
            (Some(x), Some(y)) => (x, y),
            (Some(x), None) => (x.clone(), x),
            (None, Some(y)) => (y.clone(), y),
            (None, None) => continue,
        };
        ramps.push(Ramp {
            a: a.as_f64(),
            b: b.as_f64(),
            va,
            vb,
        });
    }
    Ok(ramps)
}
