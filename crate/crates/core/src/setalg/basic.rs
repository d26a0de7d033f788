use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{cmp_scalar, max_of, Scalar};

use super::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasicKind {
    Empty,
    Singleton,
    Box,
}

/// Empty set, point, or axis-aligned box with per-face closure flags.
/// Boxes may be flat along some axes; exact differences in two and three
/// dimensions produce such pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum BasicSet<T> {
    Empty(usize),
    Cuboid(Vec<Interval<T>>),
}

impl<T: Scalar> BasicSet<T> {
    pub fn empty(dim: usize) -> Self {
        BasicSet::Empty(dim)
    }

    pub fn singleton(p: &[T]) -> Self {
        BasicSet::Cuboid(p.iter().cloned().map(Interval::point).collect())
    }

    /// Collapses to `Empty` when any axis is empty.
    pub fn from_intervals(dim: usize, axes: Vec<Option<Interval<T>>>) -> Self {
        match axes.into_iter().collect::<Option<Vec<_>>>() {
            Some(v) if !v.is_empty() => BasicSet::Cuboid(v),
            _ => BasicSet::Empty(dim),
        }
    }

    pub fn with_flags(lo: &[T], hi: &[T], closed_lo: &[bool], closed_hi: &[bool]) -> Result<Self> {
        let d = lo.len();
        if hi.len() != d || closed_lo.len() != d || closed_hi.len() != d || d == 0 {
            return Err(Error::InvalidSet("corner and flag lengths differ".into()));
        }
        let axes = (0..d)
            .map(|i| Interval::new(lo[i].clone(), hi[i].clone(), closed_lo[i], closed_hi[i]))
            .collect();
        Ok(Self::from_intervals(d, axes))
    }

    pub fn closed_box(lo: &[T], hi: &[T]) -> Result<Self> {
        let t = vec![true; lo.len()];
        Self::with_flags(lo, hi, &t, &t)
    }

    pub fn open_box(lo: &[T], hi: &[T]) -> Result<Self> {
        let f = vec![false; lo.len()];
        Self::with_flags(lo, hi, &f, &f)
    }

    pub fn dim(&self) -> usize {
        match self {
            BasicSet::Empty(d) => *d,
            BasicSet::Cuboid(v) => v.len(),
        }
    }

    pub fn kind(&self) -> BasicKind {
        match self {
            BasicSet::Empty(_) => BasicKind::Empty,
            BasicSet::Cuboid(v) if v.iter().all(Interval::is_degenerate) => BasicKind::Singleton,
            BasicSet::Cuboid(_) => BasicKind::Box,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BasicSet::Empty(_))
    }

    pub fn axes(&self) -> Option<&[Interval<T>]> {
        match self {
            BasicSet::Empty(_) => None,
            BasicSet::Cuboid(v) => Some(v),
        }
    }

    pub fn lo(&self) -> Option<Vec<T>> {
        self.axes().map(|a| a.iter().map(|i| i.lo.clone()).collect())
    }

    pub fn hi(&self) -> Option<Vec<T>> {
        self.axes().map(|a| a.iter().map(|i| i.hi.clone()).collect())
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            BasicSet::Empty(_) => false,
            BasicSet::Cuboid(v) => v.len() == x.len() && v.iter().zip(x).all(|(i, xi)| i.contains(xi)),
        }
    }

    /// Lebesgue measure; zero for flat and empty sets.
    pub fn measure(&self) -> T {
        match self {
            BasicSet::Empty(_) => T::zero(),
            BasicSet::Cuboid(v) => v.iter().fold(T::one(), |acc, i| acc * i.length()),
        }
    }

    pub fn closure(&self) -> Self {
        match self {
            BasicSet::Empty(d) => BasicSet::Empty(*d),
            BasicSet::Cuboid(v) => BasicSet::Cuboid(v.iter().map(Interval::closure).collect()),
        }
    }

    pub fn intersect(&self, o: &Self) -> Self {
        match (self, o) {
            (BasicSet::Cuboid(a), BasicSet::Cuboid(b)) if a.len() == b.len() => {
                Self::from_intervals(a.len(), a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect())
            }
            _ => BasicSet::Empty(self.dim()),
        }
    }

    pub fn intersects(&self, o: &Self) -> bool {
        !self.intersect(o).is_empty()
    }

    /// Exact `self \ o` as pairwise disjoint pieces (at most two per axis).
    pub fn difference(&self, o: &Self) -> Vec<Self> {
        let (a, b) = match (self, o) {
            (BasicSet::Cuboid(a), BasicSet::Cuboid(b)) => (a, b),
            (BasicSet::Empty(_), _) => return vec![],
            (_, BasicSet::Empty(_)) => return vec![self.clone()],
        };
        if !self.intersects(o) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = a.clone();
        for i in 0..a.len() {
            for piece in [rest[i].below(&b[i]), rest[i].above(&b[i])].into_iter().flatten() {
                let mut axes = rest.clone();
                axes[i] = piece;
                out.push(BasicSet::Cuboid(axes));
            }
            rest[i] = rest[i].intersect(&b[i]).expect("axes overlap");
        }
        out
    }

    /// Whether `self` is contained in `o`.
    pub fn is_subset_of(&self, o: &Self) -> bool {
        match (self, o) {
            (BasicSet::Empty(_), _) => true,
            (_, BasicSet::Empty(_)) => false,
            (BasicSet::Cuboid(a), BasicSet::Cuboid(b)) => a.iter().zip(b).all(|(x, y)| {
                let lo_ok = x.lo > y.lo || (x.lo == y.lo && (y.closed_lo || !x.closed_lo));
                let hi_ok = x.hi < y.hi || (x.hi == y.hi && (y.closed_hi || !x.closed_hi));
                lo_ok && hi_ok
            }),
        }
    }

    /// Squared Euclidean distance from `x` to the closure.
    pub fn dist2(&self, x: &[T]) -> Option<T> {
        self.axes().map(|a| {
            a.iter().zip(x).fold(T::zero(), |acc, (i, xi)| {
                let g = i.gap(xi);
                acc + g.clone() * g
            })
        })
    }

    /// Chebyshev distance from `x` to the closure.
    pub fn cheb_dist(&self, x: &[T]) -> Option<T> {
        self.axes()
            .map(|a| a.iter().zip(x).fold(T::zero(), |acc, (i, xi)| max_of(&acc, &i.gap(xi))))
    }

    /// Closed faces of a full-dimensional box. A flat set has no interior,
    /// so it yields its own closure.
    pub fn faces(&self) -> Vec<Self> {
        let a = match self {
            BasicSet::Empty(_) => return vec![],
            BasicSet::Cuboid(a) => a,
        };
        let closed: Vec<Interval<T>> = a.iter().map(Interval::closure).collect();
        if a.iter().any(Interval::is_degenerate) {
            return vec![BasicSet::Cuboid(closed)];
        }
        let mut out = Vec::with_capacity(2 * a.len());
        for i in 0..a.len() {
            for end in [&a[i].lo, &a[i].hi] {
                let mut f = closed.clone();
                f[i] = Interval::point(end.clone());
                out.push(BasicSet::Cuboid(f));
            }
        }
        out
    }

    /// Open box `(lo - w, hi + w)` around the closure.
    pub fn inflate_open(&self, w: &T) -> Self {
        match self {
            BasicSet::Empty(d) => BasicSet::Empty(*d),
            BasicSet::Cuboid(a) => BasicSet::Cuboid(
                a.iter()
                    .map(|i| Interval {
                        lo: i.lo.clone() - w.clone(),
                        hi: i.hi.clone() + w.clone(),
                        closed_lo: false,
                        closed_hi: false,
                    })
                    .collect(),
            ),
        }
    }

    /// Largest `r` such that the closed `r`-inflation of `self` sits inside
    /// `outer`, or `None` if there is no positive margin.
    pub fn inner_margin(&self, outer: &Self) -> Option<T> {
        let (a, b) = (self.axes()?, outer.axes()?);
        let mut m: Option<T> = None;
        for (x, y) in a.iter().zip(b) {
            let lo = x.lo.clone() - y.lo.clone();
            let hi = y.hi.clone() - x.hi.clone();
            let r = if hi < lo { hi } else { lo };
            if r <= T::zero() {
                return None;
            }
            m = Some(match m {
                Some(v) if v < r => v,
                _ => r,
            });
        }
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BasicSet<U> {
        match self {
            BasicSet::Empty(d) => BasicSet::Empty(*d),
            BasicSet::Cuboid(a) => BasicSet::Cuboid(a.iter().map(|i| i.map(&f)).collect()),
        }
    }

    pub fn to_f64(&self) -> BasicSet<f64> {
        self.map(|v| v.as_f64())
    }
}

/// Total order used to sort and deduplicate sets.
pub fn cmp_basic<T: Scalar>(a: &BasicSet<T>, b: &BasicSet<T>) -> Ordering {
    match (a, b) {
        (BasicSet::Empty(_), BasicSet::Empty(_)) => Ordering::Equal,
        (BasicSet::Empty(_), _) => Ordering::Less,
        (_, BasicSet::Empty(_)) => Ordering::Greater,
        (BasicSet::Cuboid(x), BasicSet::Cuboid(y)) => {
            for (i, j) in x.iter().zip(y) {
                let o = cmp_scalar(&i.lo, &j.lo)
                    .then_with(|| cmp_scalar(&i.hi, &j.hi))
                    .then_with(|| i.closed_lo.cmp(&j.closed_lo))
                    .then_with(|| i.closed_hi.cmp(&j.closed_hi));
                if o != Ordering::Equal {
                    return o;
                }
            }
            x.len().cmp(&y.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn kinds() {
        assert_eq!(BasicSet::<f64>::empty(2).kind(), BasicKind::Empty);
        assert_eq!(BasicSet::singleton(&[1.0, 2.0]).kind(), BasicKind::Singleton);
        assert_eq!(BasicSet::open_box(&[0.0], &[1.0]).unwrap().kind(), BasicKind::Box);
        assert!(BasicSet::open_box(&[0.0], &[0.0]).unwrap().is_empty());
    }

    #[test]
    fn difference_in_one_dimension() {
        let a = BasicSet::closed_box(&[d("0")], &[d("1")]).unwrap();
        let b = BasicSet::open_box(&[d("1/4")], &[d("1/2")]).unwrap();
        let parts = a.difference(&b);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], BasicSet::closed_box(&[d("0")], &[d("1/4")]).unwrap());
        assert_eq!(parts[1], BasicSet::closed_box(&[d("1/2")], &[d("1")]).unwrap());
    }

    #[test]
    fn difference_in_two_dimensions_is_exact() {
        let a = BasicSet::closed_box(&[d("0"), d("0")], &[d("1"), d("1")]).unwrap();
        let b = BasicSet::open_box(&[d("1/4"), d("1/4")], &[d("3/4"), d("3/4")]).unwrap();
        let parts = a.difference(&b);
        assert_eq!(parts.len(), 4);
        let total = parts.iter().fold(Dyadic::from_int(0), |s, p| s + p.measure());
        assert_eq!(total, d("3/4"));
        for p in &parts {
            assert!(!p.intersects(&b));
            assert!(p.is_subset_of(&a));
        }
        for (i, p) in parts.iter().enumerate() {
            for q in &parts[i + 1..] {
                assert!(!p.intersects(q));
            }
        }
    }

    #[test]
    fn faces_of_a_square() {
        let a = BasicSet::open_box(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let f = a.faces();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|x| x.measure() == 0.0));
        assert!(f[0].contains(&[0.0, 2.0]));
    }

    #[test]
    fn margins_and_distances() {
        let a = BasicSet::singleton(&[0.5]);
        let b = BasicSet::open_box(&[0.25], &[1.0]).unwrap();
        assert_eq!(a.inner_margin(&b), Some(0.25));
        assert_eq!(b.dist2(&[2.0]), Some(1.0));
        assert_eq!(b.cheb_dist(&[0.5]), Some(0.0));
    }
}
