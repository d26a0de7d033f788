//! Set-valued maps with computable distance.
//!
//! Two tiers share one descriptor. The cellwise tier tiles the domain box
//! with basic sets, each carrying an exact closed value set. The sampled tier
//! tiles it with a regular grid and stores a finite net per cell, together
//! with a declared net radius τ that every consumer adds as slack.
//!
//! Values are stored in normalized range coordinates (see [`RangeMap`]);
//! every range point passed to or returned from this module is normalized.

mod build;
mod filippov;
pub mod json;
pub mod range;
mod sublevel;

#[cfg(test)]
pub(crate) use build::tests::desk as desk_for_tests;
pub use build::{build_cellwise, build_sampled, build_sampled_normalized, CellwiseSpec, GridCell, Net, SampledSpec};
pub use filippov::{filippov_regularize, FilippovSpec};
pub use range::{half_ball_scale, RangeMap};
pub use sublevel::{sublevel_domains, SublevelFamily};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::{BasicSet, GeneralizedSet, Interval};

/// Value set of one cell.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueSet<T> {
    /// Closed generalized set.
    Exact(GeneralizedSet<T>),
    /// Finite net of the true value set.
    Net(Vec<Vec<T>>),
}

impl<T: Scalar> ValueSet<T> {
    pub fn is_empty(&self) -> bool {
        match self {
            ValueSet::Exact(s) => s.is_empty(),
            ValueSet::Net(p) => p.is_empty(),
        }
    }

    /// Squared Euclidean distance from `r`.
    pub fn dist2(&self, r: &[T]) -> Option<T> {
        match self {
            ValueSet::Exact(s) => s.dist2(r),
            ValueSet::Net(pts) => pts.iter().map(|p| sq_dist(p, r)).fold(None, |m, d| match m {
                Some(v) if v <= d => Some(v),
                _ => Some(d),
            }),
        }
    }

    pub fn dist(&self, r: &[T]) -> f64 {
        self.dist2(r).map_or(f64::INFINITY, |d| d.as_f64().sqrt())
    }

    /// Net points, or the parts' lower corners for exact sets.
    pub fn points(&self) -> Vec<Vec<T>> {
        match self {
            ValueSet::Exact(s) => s.parts().iter().filter_map(BasicSet::lo).collect(),
            ValueSet::Net(p) => p.clone(),
        }
    }
}

pub(crate) fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        let d = x.clone() - y.clone();
        acc + d.clone() * d
    })
}

/// Regular grid over a closed box. Cells are half-open `[lo, lo + h)` per
/// axis except the last cell on each axis, which is closed.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    lo: Vec<T>,
    step: T,
    counts: Vec<usize>,
}

impl<T: Scalar> Grid<T> {
    /// Grid of step `h` over `domain`; the box sides must be multiples of `h`.
    pub fn new(domain: &BasicSet<T>, step: T) -> Result<Self> {
        let axes = domain
            .axes()
            .ok_or_else(|| Error::InvalidSet("grid over an empty box".into()))?;
        if step <= T::zero() {
            return Err(Error::BadTiling("grid step must be positive".into()));
        }
        let mut counts = Vec::new();
        for a in axes {
            if !a.is_closed() || a.is_degenerate() {
                return Err(Error::BadTiling("grid domain must be a closed full box".into()));
            }
            let n = (a.length().as_f64() / step.as_f64()).round();
            if !(1.0..=1e7).contains(&n) || a.lo.clone() + step.clone() * T::from_int(n as i64) != a.hi {
                return Err(Error::BadTiling(format!(
                    "side {:?} is not a multiple of the step {:?}",
                    a.length(),
                    step
                )));
            }
            counts.push(n as usize);
        }
        Ok(Grid {
            lo: axes.iter().map(|a| a.lo.clone()).collect(),
            step,
            counts,
        })
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn step(&self) -> &T {
        &self.step
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (i, n)| acc * n + i)
    }

    pub fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0; self.counts.len()];
        for k in (0..self.counts.len()).rev() {
            idx[k] = f % self.counts[k];
            f /= self.counts[k];
        }
        idx
    }

    fn corner(&self, k: usize, i: usize) -> T {
        self.lo[k].clone() + self.step.clone() * T::from_int(i as i64)
    }

    pub fn cell(&self, f: usize) -> BasicSet<T> {
        let idx = self.unflat(f);
        let axes = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| Interval::new(self.corner(k, i), self.corner(k, i + 1), true, i + 1 == self.counts[k]))
            .collect();
        BasicSet::from_intervals(idx.len(), axes)
    }

    pub fn center(&self, f: usize) -> Vec<T> {
        self.unflat(f)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.corner(k, i) + self.step.half())
            .collect()
    }

    /// Cell containing `x`, if `x` lies in the grid box.
    pub fn locate(&self, x: &[T]) -> Option<usize> {
        if x.len() != self.counts.len() {
            return None;
        }
        let mut idx = Vec::with_capacity(x.len());
        for (k, v) in x.iter().enumerate() {
            let guess = ((v.clone() - self.lo[k].clone()).as_f64() / self.step.as_f64()).floor();
            if !guess.is_finite() || guess < -1.0 || guess > self.counts[k] as f64 + 1.0 {
                return None;
            }
            let mut i = guess.max(0.0) as usize;
            i = i.min(self.counts[k] - 1);
            // correct the float guess with exact comparisons
            while i > 0 && *v < self.corner(k, i) {
                i -= 1;
            }
            while i + 1 < self.counts[k] && *v >= self.corner(k, i + 1) {
                i += 1;
            }
            if *v < self.corner(k, i) || *v > self.corner(k, i + 1) {
                return None;
            }
            idx.push(i);
        }
        Some(self.flat(&idx))
    }
}

/// How the domain is cut into cells.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout<T> {
    Cells(Vec<BasicSet<T>>),
    Grid(Grid<T>),
}

/// Set-valued map with computable distance, constant on each cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentableSvf<T> {
    domain: BasicSet<T>,
    range: RangeMap<T>,
    layout: Layout<T>,
    /// `None` marks a cell excluded from the domain (sampled tier only).
    values: Vec<Option<ValueSet<T>>>,
    slack: T,
}

impl<T: Scalar> RepresentableSvf<T> {
    pub(crate) fn from_parts(
        domain: BasicSet<T>,
        range: RangeMap<T>,
        layout: Layout<T>,
        values: Vec<Option<ValueSet<T>>>,
        slack: T,
    ) -> Self {
        RepresentableSvf {
            domain,
            range,
            layout,
            values,
            slack,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn range_dim(&self) -> usize {
        self.range.dim()
    }

    pub fn domain(&self) -> &BasicSet<T> {
        &self.domain
    }

    pub fn range(&self) -> &RangeMap<T> {
        &self.range
    }

    pub fn layout(&self) -> &Layout<T> {
        &self.layout
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.layout, Layout::Grid(_))
    }

    /// Declared net radius τ in normalized units; zero for the cellwise tier.
    pub fn slack(&self) -> &T {
        &self.slack
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn cell(&self, i: usize) -> BasicSet<T> {
        match &self.layout {
            Layout::Cells(c) => c[i].clone(),
            Layout::Grid(g) => g.cell(i),
        }
    }

    /// Point used to decide sampled tests for cell `i`.
    pub fn cell_center(&self, i: usize) -> Vec<T> {
        match &self.layout {
            Layout::Cells(c) => {
                let a = c[i].axes().expect("cells are nonempty");
                a.iter().map(|iv| (iv.lo.clone() + iv.hi.clone()).half()).collect()
            }
            Layout::Grid(g) => g.center(i),
        }
    }

    pub fn values(&self, i: usize) -> Option<&ValueSet<T>> {
        self.values[i].as_ref()
    }

    /// Cells left out of the domain because their net came back empty.
    pub fn excluded(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].is_none()).collect()
    }

    pub fn locate(&self, x: &[T]) -> Option<usize> {
        if x.len() != self.dim() || !self.domain.contains(x) {
            return None;
        }
        match &self.layout {
            Layout::Cells(c) => c.iter().position(|b| b.contains(x)),
            Layout::Grid(g) => g.locate(x),
        }
    }

    /// Exact squared distance from the normalized range point `r` to the
    /// stored value set at `x`.
    pub fn distance2(&self, r: &[T], x: &[T]) -> Result<T> {
        if r.len() != self.range_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.range_dim(),
                found: r.len(),
            });
        }
        let i = self
            .locate(x)
            .ok_or_else(|| Error::InvalidSet(format!("point {:?} outside the SVF domain", x)))?;
        let v = self.values[i]
            .as_ref()
            .ok_or_else(|| Error::InvalidSet(format!("point {:?} lies in an excluded cell", x)))?;
        Ok(v.dist2(r).expect("value sets are nonempty"))
    }

    /// Distance from the normalized range point `r` to `F(x)`. Exact for the
    /// cellwise tier; within τ of the true distance for the sampled tier.
    pub fn distance(&self, r: &[T], x: &[T]) -> Result<f64> {
        self.distance2(r, x).map(|d| d.as_f64().sqrt())
    }
}
