use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::{BasicSet, GeneralizedSet, Pairing, SetSequence};

use super::representable::RepresentableDomain;
use super::witness::BudgetRule;

#[derive(Clone, Debug, PartialEq)]
pub struct Piece<T> {
    pub set: GeneralizedSet<T>,
    pub value: Vec<T>,
}

/// Map taking the constant value `r_i` on the piece `Q_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstantMap<T> {
    pieces: Vec<Piece<T>>,
    ambient: BasicSet<T>,
}

impl<T: Scalar> PiecewiseConstantMap<T> {
    pub fn new(pieces: Vec<Piece<T>>, ambient: BasicSet<T>) -> Result<Self> {
        let dim = ambient.dim();
        let beta = pieces.first().map_or(0, |p| p.value.len());
        for p in &pieces {
            if p.set.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.set.dim(),
                });
            }
            if p.value.len() != beta {
                return Err(Error::DimensionMismatch {
                    expected: beta,
                    found: p.value.len(),
                });
            }
        }
        Ok(PiecewiseConstantMap { pieces, ambient })
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn ambient(&self) -> &BasicSet<T> {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn eval(&self, x: &[T]) -> Option<&[T]> {
        self.pieces.iter().find(|p| p.set.contains(x)).map(|p| p.value.as_slice())
    }

    pub fn carrier(&self) -> SetSequence<T> {
        let items = self.pieces.iter().map(|p| p.set.clone()).collect();
        SetSequence::new(self.dim(), items, Pairing::RowMajor).expect("pieces share the dimension")
    }

    pub fn domain(&self, rule: BudgetRule) -> Result<RepresentableDomain<T>> {
        RepresentableDomain::new(self.carrier(), self.ambient.clone(), rule)
    }

    pub fn pieces_disjoint(&self) -> bool {
        let parts: Vec<&BasicSet<T>> = self.pieces.iter().flat_map(|p| p.set.parts()).collect();
        parts
            .iter()
            .enumerate()
            .all(|(i, a)| parts[i + 1..].iter().all(|b| !a.intersects(b)))
    }
}
