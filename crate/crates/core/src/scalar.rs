//! Scalar abstraction shared by the exact and floating tiers.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::dyadic::Dyadic;

/// Ordered field-like scalar used for set endpoints and selector values.
///
/// `Dyadic` is exact; `f32`/`f64` round. Division is only offered as
/// [`Scalar::div_floor`], which never overshoots the true quotient, so budget
/// computations stay sound in every tier.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact.
    const EXACT: bool;

    fn as_f64(&self) -> f64;
    fn from_f64_exact(v: f64) -> Option<Self>;
    fn to_dyadic(&self) -> Dyadic;
    fn from_dyadic(d: &Dyadic) -> Self;
    fn half(&self) -> Self;
    fn div_floor(&self, rhs: &Self) -> Self;

    fn pow2(e: i64) -> Self {
        Self::from_dyadic(&Dyadic::pow2(e))
    }

    fn from_int(v: i64) -> Self {
        Self::from_dyadic(&Dyadic::from_int(v))
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Larger of two values, preferring `a` on ties.
pub fn max_of<T: Scalar>(a: &T, b: &T) -> T {
    if b > a {
        b.clone()
    } else {
        a.clone()
    }
}

/// Smaller of two values, preferring `a` on ties.
pub fn min_of<T: Scalar>(a: &T, b: &T) -> T {
    if b < a {
        b.clone()
    } else {
        a.clone()
    }
}

/// Total order for sorting. Floats are assumed NaN free.
pub fn cmp_scalar<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}

impl Scalar for Dyadic {
    const EXACT: bool = true;

    fn as_f64(&self) -> f64 {
        self.to_f64()
    }
    fn from_f64_exact(v: f64) -> Option<Self> {
        Dyadic::from_f64(v)
    }
    fn to_dyadic(&self) -> Dyadic {
        self.clone()
    }
    fn from_dyadic(d: &Dyadic) -> Self {
        d.clone()
    }
    fn half(&self) -> Self {
        Dyadic::half(self)
    }
    fn div_floor(&self, rhs: &Self) -> Self {
        Dyadic::div_floor(self, rhs)
    }
}

macro_rules! float_scalar {
    ($t:ty, $from:ident) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn as_f64(&self) -> f64 {
                *self as f64
            }
            fn from_f64_exact(v: f64) -> Option<Self> {
                let r = v as $t;
                (r as f64 == v).then_some(r)
            }
            fn to_dyadic(&self) -> Dyadic {
                Dyadic::$from(*self).expect("finite scalar")
            }
            fn from_dyadic(d: &Dyadic) -> Self {
                d.to_f64() as $t
            }
            fn half(&self) -> Self {
                *self * 0.5
            }
            fn div_floor(&self, rhs: &Self) -> Self {
                let q = *self / *rhs;
                // one ulp toward -inf keeps q * rhs <= self for positive rhs
                if !q.is_finite() || q == 0.0 {
                    q
                } else if q > 0.0 {
                    <$t>::from_bits(q.to_bits() - 1)
                } else {
                    <$t>::from_bits(q.to_bits() + 1)
                }
            }
        }
    };
}

float_scalar!(f64, from_f64);
float_scalar!(f32, from_f32);
