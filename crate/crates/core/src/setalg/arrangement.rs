//! Coordinate-compressed cell arrangement of a finite family of boxes.
//!
//! Each axis with sorted breakpoints `c_0 < … < c_{m-1}` is split into
//! `2m + 1` elementary pieces: even indices are open gaps (the first and last
//! unbounded), odd indices are the breakpoints. Every box in the family is an
//! exact union of elementary cells, so union, subset and boundary questions
//! reduce to bookkeeping over cell indices.

use crate::scalar::{cmp_scalar, Scalar};

use super::basic::BasicSet;
use super::interval::Interval;

pub(crate) struct Arrangement<T> {
    coords: Vec<Vec<T>>,
    shape: Vec<usize>,
}

impl<T: Scalar> Arrangement<T> {
    pub(crate) fn new<'a>(dim: usize, sets: impl Iterator<Item = &'a BasicSet<T>>) -> Self {
        let mut coords: Vec<Vec<T>> = vec![Vec::new(); dim];
        for s in sets {
            if let Some(a) = s.axes() {
                for (c, i) in coords.iter_mut().zip(a) {
                    c.push(i.lo.clone());
                    c.push(i.hi.clone());
                }
            }
        }
        for c in &mut coords {
            c.sort_by(cmp_scalar);
            c.dedup();
        }
        let shape = coords.iter().map(|c| 2 * c.len() + 1).collect();
        Arrangement { coords, shape }
    }

    pub(crate) fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn point_index(&self, axis: usize, v: &T) -> usize {
        let c = &self.coords[axis];
        let k = c
            .binary_search_by(|p| cmp_scalar(p, v))
            .expect("breakpoint registered at construction");
        2 * k + 1
    }

    /// Inclusive index ranges per axis covered by `s`.
    pub(crate) fn span(&self, s: &BasicSet<T>) -> Option<Vec<(usize, usize)>> {
        let a = s.axes()?;
        Some(
            a.iter()
                .enumerate()
                .map(|(k, i)| {
                    let lo = self.point_index(k, &i.lo) + usize::from(!i.closed_lo);
                    let hi = self.point_index(k, &i.hi) - usize::from(!i.closed_hi);
                    (lo, hi)
                })
                .collect(),
        )
    }

    pub(crate) fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (i, n)| acc * n + i)
    }

    pub(crate) fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for k in (0..self.shape.len()).rev() {
            idx[k] = f % self.shape[k];
            f /= self.shape[k];
        }
        idx
    }

    pub(crate) fn for_each_in_span(&self, span: &[(usize, usize)], mut f: impl FnMut(usize, &[usize])) {
        if span.iter().any(|(lo, hi)| lo > hi) {
            return;
        }
        let mut idx: Vec<usize> = span.iter().map(|s| s.0).collect();
        loop {
            f(self.flat(&idx), &idx);
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if idx[k] < span[k].1 {
                    idx[k] += 1;
                    break;
                }
                idx[k] = span[k].0;
            }
        }
    }

    pub(crate) fn mark<'a>(&self, sets: impl Iterator<Item = &'a BasicSet<T>>) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for s in sets {
            if let Some(span) = self.span(s) {
                self.for_each_in_span(&span, |f, _| m[f] = true);
            }
        }
        m
    }

    /// Volume of a bounded full-dimensional cell, zero otherwise.
    pub(crate) fn volume(&self, idx: &[usize]) -> T {
        let mut v = T::one();
        for (k, &i) in idx.iter().enumerate() {
            if i % 2 == 1 || i == 0 || i == self.shape[k] - 1 {
                return T::zero();
            }
            let j = i / 2;
            v = v * (self.coords[k][j].clone() - self.coords[k][j - 1].clone());
        }
        v
    }

    /// Closure of a bounded cell.
    pub(crate) fn closed_cell(&self, idx: &[usize]) -> BasicSet<T> {
        let axes = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let c = &self.coords[k];
                if i % 2 == 1 {
                    Interval::point(c[i / 2].clone())
                } else {
                    Interval::closure(&Interval {
                        lo: c[i / 2 - 1].clone(),
                        hi: c[i / 2].clone(),
                        closed_lo: false,
                        closed_hi: false,
                    })
                }
            })
            .collect();
        BasicSet::Cuboid(axes)
    }

    /// Cell itself as a set with the flags it actually has.
    pub(crate) fn cell(&self, idx: &[usize]) -> BasicSet<T> {
        let mut axes = Vec::with_capacity(idx.len());
        for (k, &i) in idx.iter().enumerate() {
            let c = &self.coords[k];
            axes.push(if i % 2 == 1 {
                Interval::point(c[i / 2].clone())
            } else {
                Interval {
                    lo: c[i / 2 - 1].clone(),
                    hi: c[i / 2].clone(),
                    closed_lo: false,
                    closed_hi: false,
                }
            });
        }
        BasicSet::Cuboid(axes)
    }

    /// Cells whose closure contains this cell: the cell and its neighbours
    /// across every breakpoint coordinate.
    pub(crate) fn star(&self, idx: &[usize], mut f: impl FnMut(Option<usize>)) {
        let span: Vec<(isize, isize)> = idx
            .iter()
            .map(|&i| {
                let i = i as isize;
                if i % 2 == 1 {
                    (i - 1, i + 1)
                } else {
                    (i, i)
                }
            })
            .collect();
        let mut cur: Vec<isize> = span.iter().map(|s| s.0).collect();
        loop {
            let inside = cur
                .iter()
                .zip(&self.shape)
                .all(|(&c, &n)| c >= 0 && (c as usize) < n);
            if inside {
                let u: Vec<usize> = cur.iter().map(|&c| c as usize).collect();
                f(Some(self.flat(&u)));
            } else {
                f(None);
            }
            let mut k = cur.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if cur[k] < span[k].1 {
                    cur[k] += 1;
                    break;
                }
                cur[k] = span[k].0;
            }
        }
    }
}

/// Lebesgue measure of a finite union of boxes.
pub fn union_measure<T: Scalar>(parts: &[BasicSet<T>]) -> T {
    let Some(dim) = parts.first().map(BasicSet::dim) else {
        return T::zero();
    };
    let arr = Arrangement::new(dim, parts.iter());
    let m = arr.mark(parts.iter());
    let mut total = T::zero();
    for (f, covered) in m.iter().enumerate() {
        if *covered {
            total = total + arr.volume(&arr.unflat(f));
        }
    }
    total
}

/// Whether the union of `inner` lies inside the union of `outer`.
pub fn is_covered<T: Scalar>(inner: &[BasicSet<T>], outer: &[BasicSet<T>]) -> bool {
    let Some(dim) = inner.iter().chain(outer).map(BasicSet::dim).next() else {
        return true;
    };
    let arr = Arrangement::new(dim, inner.iter().chain(outer));
    let m = arr.mark(outer.iter());
    inner.iter().all(|s| {
        let mut ok = true;
        if let Some(span) = arr.span(s) {
            arr.for_each_in_span(&span, |f, _| ok &= m[f]);
        }
        ok
    })
}

/// A cell of `region \ removed` not covered by `by`, if any.
pub fn uncovered_part<T: Scalar>(
    region: &BasicSet<T>,
    removed: &[BasicSet<T>],
    by: &[BasicSet<T>],
) -> Option<BasicSet<T>> {
    let dim = region.dim();
    let arr = Arrangement::new(dim, std::iter::once(region).chain(removed).chain(by));
    let cut = arr.mark(removed.iter());
    let cov = arr.mark(by.iter());
    let span = arr.span(region)?;
    let mut bad = None;
    arr.for_each_in_span(&span, |f, idx| {
        if bad.is_none() && !cut[f] && !cov[f] {
            bad = Some(arr.cell(idx));
        }
    });
    bad
}

/// Largest number of groups meeting a cell of `region`, and a cell of
/// `region` met by no group, if any.
pub fn cover_degree<T: Scalar>(region: &BasicSet<T>, groups: &[Vec<BasicSet<T>>]) -> (usize, Option<BasicSet<T>>) {
    let dim = region.dim();
    let arr = Arrangement::new(dim, std::iter::once(region).chain(groups.iter().flatten()));
    let mut count = vec![0usize; arr.len()];
    for g in groups {
        let m = arr.mark(g.iter());
        for (c, hit) in count.iter_mut().zip(m) {
            *c += usize::from(hit);
        }
    }
    let (mut best, mut bare) = (0, None);
    if let Some(span) = arr.span(region) {
        arr.for_each_in_span(&span, |f, idx| {
            best = best.max(count[f]);
            if count[f] == 0 && bare.is_none() {
                bare = Some(arr.cell(idx));
            }
        });
    }
    (best, bare)
}

/// Topological boundary of a finite union of boxes, as closed cells.
pub fn union_boundary<T: Scalar>(parts: &[BasicSet<T>]) -> Vec<BasicSet<T>> {
    let Some(dim) = parts.first().map(BasicSet::dim) else {
        return vec![];
    };
    let arr = Arrangement::new(dim, parts.iter());
    let m = arr.mark(parts.iter());
    let mut out = Vec::new();
    for f in 0..arr.len() {
        let idx = arr.unflat(f);
        let (mut touches_in, mut touches_out) = (false, false);
        arr.star(&idx, |g| match g {
            Some(g) if m[g] => touches_in = true,
            _ => touches_out = true,
        });
        if touches_in && touches_out {
            out.push(arr.closed_cell(&idx));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b1(lo: f64, hi: f64, cl: bool, ch: bool) -> BasicSet<f64> {
        BasicSet::with_flags(&[lo], &[hi], &[cl], &[ch]).unwrap()
    }

    #[test]
    fn union_measure_merges_overlaps() {
        let parts = vec![b1(0.0, 0.75, true, true), b1(0.25, 1.0, false, true)];
        assert_eq!(union_measure(&parts), 1.0);
        let sq = |x: f64, y: f64| BasicSet::closed_box(&[x, y], &[x + 1.0, y + 1.0]).unwrap();
        assert_eq!(union_measure(&[sq(0.0, 0.0), sq(0.5, 0.5)]), 1.75);
    }

    #[test]
    fn coverage_sees_missing_points() {
        let outer = vec![b1(0.0, 0.5, true, false), b1(0.5, 1.0, false, true)];
        assert!(!is_covered(&[b1(0.0, 1.0, true, true)], &outer));
        assert!(is_covered(&[b1(0.0, 0.5, false, false)], &outer));
        let gap = uncovered_part(&b1(0.0, 1.0, true, true), &[], &outer).unwrap();
        assert_eq!(gap, BasicSet::singleton(&[0.5]));
    }

    #[test]
    fn boundary_of_touching_squares() {
        let a = BasicSet::closed_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let b = BasicSet::with_flags(&[1.0, 0.0], &[2.0, 1.0], &[false, true], &[true, true]).unwrap();
        let bd = union_boundary(&[a, b]);
        // the shared edge x = 1 is interior to the union
        assert!(bd.iter().all(|c| !(c.contains(&[1.0, 0.5]))));
        assert!(bd.iter().any(|c| c.contains(&[1.0, 0.0])));
        assert!(bd.iter().any(|c| c.contains(&[0.0, 0.5])));
    }
}
