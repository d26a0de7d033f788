use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::{arrangement, countable_reduction, BasicSet, GeneralizedSet, SetSequence};

use super::witness::{BudgetRule, RepresentabilityWitness};

/// Outcome of checking the three representability clauses for one ε.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub eps: f64,
    pub measure: f64,
    pub within_budget: bool,
    /// Smallest margin by which an inflated boundary piece still fits in a
    /// witness part; `None` if some piece has no positive margin.
    pub margin: Option<f64>,
    pub complement_covered: bool,
    pub uncovered: Option<String>,
}

impl WitnessReport {
    pub fn passes(&self) -> bool {
        self.within_budget && self.margin.is_some() && self.complement_covered
    }
}

/// A set sequence inside a compact box, with a witness generator.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentableDomain<T> {
    carrier: SetSequence<T>,
    ambient: BasicSet<T>,
    witness: RepresentabilityWitness<T>,
}

impl<T: Scalar> RepresentableDomain<T> {
    pub fn new(carrier: SetSequence<T>, ambient: BasicSet<T>, rule: BudgetRule) -> Result<Self> {
        let witness = RepresentabilityWitness::for_sequence(&carrier, rule);
        Self::with_witness(carrier, ambient, witness)
    }

    pub fn with_witness(
        carrier: SetSequence<T>,
        ambient: BasicSet<T>,
        witness: RepresentabilityWitness<T>,
    ) -> Result<Self> {
        if ambient.is_empty() {
            return Err(Error::InvalidSet("ambient box is empty".into()));
        }
        if ambient.dim() != carrier.dim() {
            return Err(Error::DimensionMismatch {
                expected: ambient.dim(),
                found: carrier.dim(),
            });
        }
        Ok(RepresentableDomain {
            carrier,
            ambient,
            witness,
        })
    }

    pub fn carrier(&self) -> &SetSequence<T> {
        &self.carrier
    }

    pub fn ambient(&self) -> &BasicSet<T> {
        &self.ambient
    }

    pub fn witness(&self) -> &RepresentabilityWitness<T> {
        &self.witness
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn witness_set(&self, eps: &T) -> Result<GeneralizedSet<T>> {
        self.witness.generate(eps, self.dim())
    }

    /// Topological boundaries of the carrier items.
    pub fn boundary_pieces(&self) -> Vec<BasicSet<T>> {
        let mut out: Vec<BasicSet<T>> = self
            .carrier
            .items()
            .iter()
            .flat_map(|s| s.essential_boundary())
            .collect();
        out.sort_by(crate::setalg::cmp_basic);
        out.dedup();
        out
    }

    pub fn verify(&self, eps: &T) -> Result<WitnessReport> {
        let m = self.witness_set(eps)?;
        let measure = m.measure();
        let margin = boundary_margin(&self.boundary_pieces(), &m);
        let carrier = self.carrier.union();
        let uncovered = arrangement::uncovered_part(&self.ambient, m.parts(), carrier.parts());
        Ok(WitnessReport {
            eps: eps.as_f64(),
            measure: measure.as_f64(),
            within_budget: measure <= *eps,
            margin: margin.map(|v| v.as_f64()),
            complement_covered: uncovered.is_none(),
            uncovered: uncovered.map(|b| format!("{:?}", b.to_f64())),
        })
    }

    /// The countable reduction keeps the witness.
    pub fn reduced(&self) -> Self {
        RepresentableDomain {
            carrier: countable_reduction(&self.carrier),
            ambient: self.ambient.clone(),
            witness: self.witness.clone(),
        }
    }

    /// `X ∩ Y` with witness `M_X(ε/2) ∪ M_Y(ε/2)`.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut items = Vec::new();
        for a in self.carrier.items() {
            for b in other.carrier.items() {
                items.push(a.intersect(b)?);
            }
        }
        let carrier = SetSequence::new(self.dim(), items, self.carrier.pairing())?;
        let witness = RepresentabilityWitness::Union(Box::new(self.witness.clone()), Box::new(other.witness.clone()));
        Self::with_witness(carrier, self.ambient.clone(), witness)
    }

    /// Items `X_n ∩ Y_n`; representable when `X` lies inside the result.
    pub fn termwise_intersection(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let items = self
            .carrier
            .items()
            .iter()
            .zip(other.carrier.items())
            .map(|(a, b)| a.intersect(b))
            .collect::<Result<Vec<_>>>()?;
        let carrier = SetSequence::new(self.dim(), items, self.carrier.pairing())?;
        if !self.carrier.union().is_subset_of(&carrier.union()) {
            return Err(Error::NonRepresentable(
                "first domain is not contained in the term-wise intersection".into(),
            ));
        }
        let witness = RepresentabilityWitness::Union(Box::new(self.witness.clone()), Box::new(other.witness.clone()));
        Self::with_witness(carrier, self.ambient.clone(), witness)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.ambient != other.ambient {
            return Err(Error::InvalidSet("domains live in different ambient boxes".into()));
        }
        Ok(())
    }
}

/// Minimum over pieces of the best margin inside a single witness part.
pub fn boundary_margin<T: Scalar>(pieces: &[BasicSet<T>], m: &GeneralizedSet<T>) -> Option<T> {
    let mut worst: Option<T> = None;
    for p in pieces {
        let best = m
            .parts()
            .iter()
            .filter_map(|q| p.inner_margin(q))
            .fold(None::<T>, |b, r| match b {
                Some(v) if v >= r => Some(v),
                _ => Some(r),
            })?;
        worst = Some(match worst {
            Some(w) if w <= best => w,
            _ => best,
        });
    }
    Some(worst.unwrap_or_else(T::one))
}

/// Countable reduction of a witness set into disjoint parts.
pub fn disjointify_witness<T: Scalar>(m: &GeneralizedSet<T>) -> GeneralizedSet<T> {
    let seq = SetSequence::new(m.dim(), vec![m.clone()], Default::default()).expect("one item");
    countable_reduction(&seq).items()[0].clone()
}
