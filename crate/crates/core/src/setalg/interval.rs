use serde::{Deserialize, Serialize};

use crate::scalar::{cmp_scalar, Scalar};

/// Bounded interval with independent closure flags. Never empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub closed_lo: bool,
    pub closed_hi: bool,
}

impl<T: Scalar> Interval<T> {
    /// `None` when the flags and endpoints describe the empty set.
    pub fn new(lo: T, hi: T, closed_lo: bool, closed_hi: bool) -> Option<Self> {
        let nonempty = lo < hi || (lo == hi && closed_lo && closed_hi);
        nonempty.then_some(Interval {
            lo,
            hi,
            closed_lo,
            closed_hi,
        })
    }

    pub fn closed(lo: T, hi: T) -> Option<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: T, hi: T) -> Option<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn point(p: T) -> Self {
        Interval {
            lo: p.clone(),
            hi: p,
            closed_lo: true,
            closed_hi: true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_closed(&self) -> bool {
        self.closed_lo && self.closed_hi
    }

    pub fn length(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn contains(&self, x: &T) -> bool {
        let above = if self.closed_lo { *x >= self.lo } else { *x > self.lo };
        let below = if self.closed_hi { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    pub fn closure(&self) -> Self {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            closed_lo: true,
            closed_hi: true,
        }
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let (lo, closed_lo) = match cmp_scalar(&self.lo, &o.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.closed_lo),
            std::cmp::Ordering::Less => (o.lo.clone(), o.closed_lo),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.closed_lo && o.closed_lo),
        };
        let (hi, closed_hi) = match cmp_scalar(&self.hi, &o.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.closed_hi),
            std::cmp::Ordering::Greater => (o.hi.clone(), o.closed_hi),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.closed_hi && o.closed_hi),
        };
        Self::new(lo, hi, closed_lo, closed_hi)
    }

    /// Points of `self` lying before every point of `o`.
    pub fn below(&self, o: &Self) -> Option<Self> {
        let cut = Interval {
            lo: self.lo.clone(),
            hi: o.lo.clone(),
            closed_lo: self.closed_lo,
            closed_hi: !o.closed_lo,
        };
        if cut.hi < cut.lo {
            return None;
        }
        self.intersect(&cut)
    }

    /// Points of `self` lying after every point of `o`.
    pub fn above(&self, o: &Self) -> Option<Self> {
        let cut = Interval {
            lo: o.hi.clone(),
            hi: self.hi.clone(),
            closed_lo: !o.closed_hi,
            closed_hi: self.closed_hi,
        };
        if cut.hi < cut.lo {
            return None;
        }
        self.intersect(&cut)
    }

    /// Distance from `x` to the closure.
    pub fn gap(&self, x: &T) -> T {
        if *x < self.lo {
            self.lo.clone() - x.clone()
        } else if *x > self.hi {
            x.clone() - self.hi.clone()
        } else {
            T::zero()
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Interval<U> {
        Interval {
            lo: f(&self.lo),
            hi: f(&self.hi),
            closed_lo: self.closed_lo,
            closed_hi: self.closed_hi,
        }
    }
}
