use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::arrangement;
use super::basic::{cmp_basic, BasicSet};

/// Finite union of basic sets together with its endpoint set Γ, the union
/// of the closed faces of every part.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedSet<T> {
    dim: usize,
    parts: Vec<BasicSet<T>>,
    gamma: Vec<BasicSet<T>>,
}

impl<T: Scalar> GeneralizedSet<T> {
    /// Empty parts are dropped.
    pub fn new(dim: usize, parts: Vec<BasicSet<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet("dimension must be positive".into()));
        }
        if let Some(p) = parts.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let parts: Vec<_> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        let gamma = dedup(parts.iter().flat_map(BasicSet::faces).collect());
        Ok(GeneralizedSet { dim, parts, gamma })
    }

    pub fn empty(dim: usize) -> Self {
        GeneralizedSet {
            dim,
            parts: vec![],
            gamma: vec![],
        }
    }

    pub fn from_part(part: BasicSet<T>) -> Self {
        let dim = part.dim();
        Self::new(dim, vec![part]).expect("single part has a consistent dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[BasicSet<T>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<BasicSet<T>> {
        self.parts
    }

    /// Γ: deduplicated closed faces of the parts.
    pub fn gamma(&self) -> &[BasicSet<T>] {
        &self.gamma
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Overlap-blind measure: sum of part measures.
    pub fn measure(&self) -> T {
        self.parts.iter().fold(T::zero(), |s, p| s + p.measure())
    }

    /// Lebesgue measure of the union.
    pub fn union_measure(&self) -> T {
        arrangement::union_measure(&self.parts)
    }

    /// Topological boundary of the union as closed pieces.
    pub fn essential_boundary(&self) -> Vec<BasicSet<T>> {
        arrangement::union_boundary(&self.parts)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        arrangement::is_covered(&self.parts, &other.parts)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Self::new(self.dim, parts)
    }

    /// Pairwise intersection of parts.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    parts.push(c);
                }
            }
        }
        Self::new(self.dim, parts)
    }

    /// Squared distance to the closure, `None` for the empty set.
    pub fn dist2(&self, x: &[T]) -> Option<T> {
        self.parts.iter().filter_map(|p| p.dist2(x)).fold(None, |m, d| match m {
            Some(v) if v <= d => Some(v),
            _ => Some(d),
        })
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.parts
            .iter()
            .enumerate()
            .all(|(i, p)| self.parts[i + 1..].iter().all(|q| !p.intersects(q)))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GeneralizedSet<U> {
        GeneralizedSet {
            dim: self.dim,
            parts: self.parts.iter().map(|p| p.map(&f)).collect(),
            gamma: self.gamma.iter().map(|p| p.map(&f)).collect(),
        }
    }

    pub fn to_f64(&self) -> GeneralizedSet<f64> {
        self.map(|v| v.as_f64())
    }
}

pub(crate) fn dedup<T: Scalar>(mut v: Vec<BasicSet<T>>) -> Vec<BasicSet<T>> {
    v.sort_by(cmp_basic);
    v.dedup();
    v
}

/// Measure of a generalized set (overlap blind).
pub fn measure<T: Scalar>(s: &GeneralizedSet<T>) -> T {
    s.measure()
}

/// `a \ s` as disjoint pieces.
pub fn set_difference<T: Scalar>(a: &BasicSet<T>, s: &GeneralizedSet<T>) -> GeneralizedSet<T> {
    let pieces = subtract_all(vec![a.clone()], s.parts().iter());
    GeneralizedSet::new(a.dim(), pieces).expect("pieces share the dimension of a")
}

pub(crate) fn subtract_all<'a, T: Scalar>(
    mut pieces: Vec<BasicSet<T>>,
    cut: impl Iterator<Item = &'a BasicSet<T>>,
) -> Vec<BasicSet<T>> {
    for b in cut {
        if pieces.is_empty() {
            break;
        }
        pieces = pieces.iter().flat_map(|p| p.difference(b)).collect();
    }
    pieces
}

/// Euclidean distance from `x` to the closure of `s`; infinite for ∅.
pub fn dist_point_set<T: Scalar>(x: &[T], s: &GeneralizedSet<T>) -> f64 {
    s.dist2(x).map_or(f64::INFINITY, |d| d.as_f64().sqrt())
}
