//! Exact set algebra, representable domains, set-valued maps and selector
//! extraction, with a differential inclusion solver and a nonholonomic
//! robot demonstration built on top.
//!
//! Geometry is generic over [`Scalar`]: [`Dyadic`] for exact work, `f64` and
//! `f32` for sampled work. The aliases below name the usual instantiations.

pub mod domain;
pub mod dyadic;
pub mod error;
pub mod inclusion;
pub mod robot;
pub mod scalar;
pub mod setalg;
pub mod selector;
pub mod svf;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ExactSet = setalg::GeneralizedSet<Dyadic>;
pub type ExactBasicSet = setalg::BasicSet<Dyadic>;
pub type ExactSequence = setalg::SetSequence<Dyadic>;
pub type Set64 = setalg::GeneralizedSet<f64>;
