//! Representable domains, their witnesses, piecewise-constant maps and
//! continuous extensions.

mod extension;
mod piecewise;
mod representable;
mod witness;

pub use extension::{continuous_extension, ContinuousExtension, Extension};
pub use piecewise::{Piece, PiecewiseConstantMap};
pub use representable::{boundary_margin, disjointify_witness, RepresentableDomain, WitnessReport};
pub use witness::{make_witness, witness_from_faces, BudgetRule, RepresentabilityWitness};
