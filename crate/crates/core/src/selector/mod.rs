//! Measurable selector extraction by successive mesh refinement.
//!
//! Step `k` picks, on every cell of `dom(f_{k-1})`, the first point `r` of the
//! regular `2^-(k+1)` mesh (lexicographic order) with
//! `|r − F(x)| < 2^-k + τ` and `|r − f_{k-1}(x)| < 2^-(k-1)`. Because the
//! maps are constant on cells, the sets `C_i`, `D_i`, `A_i` of a step are
//! unions of cells and the countable reduction of `{A_i}` assigns each cell
//! to the lowest passing index. That is exactly the first hit of the search.
//!
//! The `D` test only admits mesh indices within three steps of the doubled
//! previous index on every axis, so the search scans a `7^β` window.

mod diagnostics;
mod eval;
pub mod json;
mod mesh;

pub use diagnostics::{cauchy_report, section, weak_continuity_pass, CauchyEntry, SectionRow, WeakContinuityReport};
pub use eval::{EvalResult, Evaluator, Undefined};
pub use mesh::{mesh_point, regular_mesh};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Piece, PiecewiseConstantMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::GeneralizedSet;
use crate::svf::RepresentableSvf;

/// Mesh index of a value: point `j · 2^-(k+1)` at level `k`.
pub type MeshIndex = Vec<u32>;

/// Per-step guarantees, checked while the step is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCertificate {
    pub level: u32,
    pub pitch: f64,
    /// `2^-k + τ`: strict bound on `|f_k − F|` over `dom(f_k)`.
    pub certified_error: f64,
    /// `2^-(k-1)`: strict bound on `|f_k − f_{k-1}|`; absent at level 1.
    pub step_bound: Option<f64>,
    /// Share `ε_dom · 2^-(n-k+1)` of the domain-loss budget.
    pub witness_budget: f64,
    pub observed_max_error: f64,
    pub observed_max_step: f64,
    pub pieces: usize,
    pub dom_cells: usize,
    pub dom_monotone: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    level: u32,
    assignment: Vec<Option<MeshIndex>>,
    certificate: StepCertificate,
}

impl ChainStep {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Mesh index per cell, `None` outside `dom(f_k)`.
    pub fn assignment(&self) -> &[Option<MeshIndex>] {
        &self.assignment
    }

    pub fn certificate(&self) -> &StepCertificate {
        &self.certificate
    }

    /// Normalized value on cell `c`.
    pub fn value<T: Scalar>(&self, c: usize) -> Option<Vec<T>> {
        self.assignment[c].as_ref().map(|j| mesh_point(self.level, j))
    }

    /// Distinct mesh indices in use, in mesh order, with their cells.
    pub fn groups(&self) -> Vec<(MeshIndex, Vec<usize>)> {
        let mut order: Vec<(&MeshIndex, usize)> = self
            .assignment
            .iter()
            .enumerate()
            .filter_map(|(c, j)| j.as_ref().map(|j| (j, c)))
            .collect();
        order.sort();
        let mut out: Vec<(MeshIndex, Vec<usize>)> = Vec::new();
        for (j, c) in order {
            match out.last_mut() {
                Some((k, cells)) if k == j => cells.push(c),
                _ => out.push((j.clone(), vec![c])),
            }
        }
        out
    }
}

/// The chain `f_1, …, f_n` with the map it was extracted from.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectorChain<T> {
    svf: RepresentableSvf<T>,
    n: u32,
    eps_dom: T,
    steps: Vec<ChainStep>,
}

impl<T: Scalar> SelectorChain<T> {
    pub fn svf(&self) -> &RepresentableSvf<T> {
        &self.svf
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn eps_dom(&self) -> &T {
        &self.eps_dom
    }

    /// Steps for levels `1..=n`.
    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn step(&self, level: u32) -> &ChainStep {
        &self.steps[level as usize - 1]
    }

    pub fn last(&self) -> &ChainStep {
        self.steps.last().expect("a chain has at least one step")
    }

    /// `f_k` as a piecewise-constant map on unions of cells, values in
    /// normalized coordinates.
    pub fn pieces(&self, level: u32) -> PiecewiseConstantMap<T> {
        let step = self.step(level);
        let pieces = step
            .groups()
            .into_iter()
            .map(|(j, cells)| Piece {
                set: GeneralizedSet::new(self.svf.dim(), cells.iter().map(|&c| self.svf.cell(c)).collect())
                    .expect("cells share the domain dimension"),
                value: mesh_point(level, &j),
            })
            .collect();
        PiecewiseConstantMap::new(pieces, self.svf.domain().clone()).expect("pieces share the domain dimension")
    }

    /// `f_k(x)` in normalized coordinates, ignoring witnesses.
    pub fn value_at(&self, level: u32, x: &[T]) -> Option<Vec<T>> {
        let c = self.svf.locate(x)?;
        self.step(level).value(c)
    }

    pub(crate) fn from_parts(svf: RepresentableSvf<T>, n: u32, eps_dom: T, steps: Vec<ChainStep>) -> Self {
        SelectorChain { svf, n, eps_dom, steps }
    }
}

fn window(prev: &[u32], max: u32) -> (Vec<u32>, Vec<u32>) {
    let lo = prev.iter().map(|&p| (2 * p).saturating_sub(3)).collect();
    let hi = prev.iter().map(|&p| (2 * p + 3).min(max)).collect();
    (lo, hi)
}

/// First mesh index at `level` passing both tests on a cell, if any.
fn search<T: Scalar>(
    values: &crate::svf::ValueSet<T>,
    prev: &[u32],
    level: u32,
    bound2: &T,
) -> Option<(MeshIndex, T)> {
    let (lo, hi) = window(prev, 1u32 << (level + 1));
    let mut j = lo.clone();
    loop {
        let d2: i64 = j
            .iter()
            .zip(prev)
            .map(|(&a, &p)| {
                let t = a as i64 - 2 * p as i64;
                t * t
            })
            .sum();
        if d2 < 16 {
            let r: Vec<T> = mesh_point(level, &j);
            let e2 = values.dist2(&r).expect("value sets are nonempty");
            if e2 < *bound2 {
                return Some((j, e2));
            }
        }
        let mut k = j.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if j[k] < hi[k] {
                j[k] += 1;
                break;
            }
            j[k] = lo[k];
        }
    }
}

fn step_change(prev: &[u32], cur: &[u32], level: u32) -> f64 {
    let pitch = 0.5f64.powi(level as i32 + 1);
    prev.iter()
        .zip(cur)
        .map(|(&p, &c)| {
            let t = (c as f64 - 2.0 * p as f64) * pitch;
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

/// Runs the extraction to level `n` with total domain-loss budget `eps_dom`.
pub fn extract<T: Scalar>(f: &RepresentableSvf<T>, n: u32, eps_dom: &T) -> Result<SelectorChain<T>> {
    if !(2..=24).contains(&n) {
        return Err(Error::InvalidArgument(format!("level n = {n} must lie in 2..=24")));
    }
    if *eps_dom <= T::zero() {
        return Err(Error::NonPositiveBudget);
    }
    let slack = f.slack().clone();
    let allowed = T::pow2(-(n as i64) - 1);
    if slack > allowed {
        return Err(Error::PrecisionUnattainable {
            tau: slack.as_f64(),
            allowed: allowed.as_f64(),
        });
    }
    let beta = f.range_dim();
    let budget = |k: u32| eps_dom.as_f64() * 0.5f64.powi((n - k + 1) as i32);
    let cells = f.cell_count();

    // f_1 ≡ 0 needs every value set to meet the open ball B(0, 1/2)
    let base_bound = T::pow2(-1) + slack.clone();
    let base_bound2 = base_bound.clone() * base_bound;
    let zero = vec![T::zero(); beta];
    let mut first = Vec::with_capacity(cells);
    let mut max_err: f64 = 0.0;
    for c in 0..cells {
        match f.values(c) {
            None => first.push(None),
            Some(v) => {
                let e2 = v.dist2(&zero).expect("value sets are nonempty");
                if e2 >= base_bound2 {
                    return Err(Error::MeshGuarantee {
                        level: 1,
                        cell: c,
                        region: format!("{:?}; F(x) misses the ball B(0, 1/2)", f.cell(c).to_f64()),
                    });
                }
                max_err = max_err.max(e2.as_f64().sqrt());
                first.push(Some(vec![0u32; beta]));
            }
        }
    }
    let dom0 = first.iter().filter(|a| a.is_some()).count();
    let mut steps = vec![ChainStep {
        level: 1,
        certificate: StepCertificate {
            level: 1,
            pitch: 0.25,
            certified_error: 0.5 + slack.as_f64(),
            step_bound: None,
            witness_budget: budget(1),
            observed_max_error: max_err,
            observed_max_step: 0.0,
            pieces: usize::from(dom0 > 0),
            dom_cells: dom0,
            dom_monotone: true,
        },
        assignment: first,
    }];

    for k in 2..=n {
        let prev = &steps.last().expect("level 1 exists").assignment;
        let bound = T::pow2(-(k as i64)) + slack.clone();
        let bound2 = bound.clone() * bound;
        let found: Vec<Result<Option<(MeshIndex, f64)>>> = (0..cells)
            .into_par_iter()
            .map(|c| {
                let Some(p) = &prev[c] else { return Ok(None) };
                let values = f.values(c).expect("domain cells carry values");
                match search(values, p, k, &bound2) {
                    Some((j, e2)) => Ok(Some((j, e2.as_f64().sqrt()))),
                    None => Err(Error::MeshGuarantee {
                        level: k,
                        cell: c,
                        region: format!("{:?}", f.cell(c).to_f64()),
                    }),
                }
            })
            .collect();
        let mut assignment = Vec::with_capacity(cells);
        let (mut max_err, mut max_step): (f64, f64) = (0.0, 0.0);
        for (c, r) in found.into_iter().enumerate() {
            match r? {
                None => assignment.push(None),
                Some((j, e)) => {
                    max_err = max_err.max(e);
                    max_step = max_step.max(step_change(prev[c].as_ref().expect("assigned before"), &j, k));
                    assignment.push(Some(j));
                }
            }
        }
        let dom_monotone = assignment
            .iter()
            .zip(prev)
            .all(|(a, p)| a.is_none() || p.is_some());
        let mut step = ChainStep {
            level: k,
            assignment,
            certificate: StepCertificate {
                level: k,
                pitch: 0.5f64.powi(k as i32 + 1),
                certified_error: 0.5f64.powi(k as i32) + slack.as_f64(),
                step_bound: Some(0.5f64.powi(k as i32 - 1)),
                witness_budget: budget(k),
                observed_max_error: max_err,
                observed_max_step: max_step,
                pieces: 0,
                dom_cells: 0,
                dom_monotone,
            },
        };
        step.certificate.pieces = step.groups().len();
        step.certificate.dom_cells = step.assignment.iter().filter(|a| a.is_some()).count();
        steps.push(step);
    }
    Ok(SelectorChain {
        svf: f.clone(),
        n,
        eps_dom: eps_dom.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::svf::build_cellwise;

    fn desk() -> RepresentableSvf<Dyadic> {
        build_cellwise(crate::svf::desk_for_tests()).unwrap()
    }

    #[test]
    fn desk_chain_values() {
        let chain = extract(&desk(), 5, &Dyadic::pow2(-4)).unwrap();
        let expect = ["0", "1/8", "3/16", "7/32", "15/64"];
        for (k, e) in (1..=5).zip(expect) {
            let step = chain.step(k);
            for c in 0..2 {
                assert_eq!(step.value::<Dyadic>(c), Some(vec![e.parse().unwrap()]), "level {k}");
            }
            assert_eq!(step.certificate().pieces, 1);
        }
        assert!(chain.steps().iter().all(|s| s.certificate().observed_max_error < s.certificate().certified_error));
    }

    #[test]
    fn window_search_order_is_mesh_order() {
        let (lo, hi) = window(&[0, 5], 16);
        assert_eq!(lo, vec![0, 7]);
        assert_eq!(hi, vec![3, 13]);
    }

    #[test]
    fn refuses_bad_arguments() {
        assert!(matches!(extract(&desk(), 1, &Dyadic::pow2(-4)), Err(Error::InvalidArgument(_))));
        assert!(matches!(extract(&desk(), 3, &Dyadic::from_int(0)), Err(Error::NonPositiveBudget)));
    }
}
