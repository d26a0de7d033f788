//! Exact algebra of finite unions of boxes with closure flags.

pub mod arrangement;
mod basic;
mod generalized;
mod interval;
pub mod json;
mod sequence;

pub use basic::{cmp_basic, BasicKind, BasicSet};
pub use generalized::{dist_point_set, measure, set_difference, GeneralizedSet};
pub use interval::Interval;
pub use sequence::{
    cantor_pair, cantor_unpair, countable_reduction, reduction_report, Pairing, ReductionReport, SetSequence,
};
