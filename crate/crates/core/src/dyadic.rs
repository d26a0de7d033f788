//! Arbitrary precision dyadic rationals `m * 2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Significant bits kept by [`Dyadic::div_floor`].
const DIV_BITS: u64 = 64;

/// Exact dyadic rational. The mantissa is odd unless the value is zero, so
/// equal values have equal representations and `Hash`/`Eq` can be derived.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: impl Into<BigInt>, exp: i64) -> Self {
        Self::normalize(mant.into(), exp)
    }

    fn normalize(mut mant: BigInt, mut exp: i64) -> Self {
        match mant.trailing_zeros() {
            None => Dyadic {
                mant: BigInt::zero(),
                exp: 0,
            },
            Some(tz) => {
                if tz > 0 {
                    mant >>= tz;
                    exp += tz as i64;
                }
                Dyadic { mant, exp }
            }
        }
    }

    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn half(&self) -> Self {
        if self.mant.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp - 1,
        }
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let (m, e, s) = num_traits::float::FloatCore::integer_decode(v);
        Some(Self::new(BigInt::from(m) * BigInt::from(s), e as i64))
    }

    pub fn from_f32(v: f32) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let (m, e, s) = num_traits::float::FloatCore::integer_decode(v);
        Some(Self::new(BigInt::from(m) * BigInt::from(s), e as i64))
    }

    /// Nearest-ish float; exact whenever the value fits a double.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            let sh = bits - 60;
            ((&self.mant >> sh).to_f64().unwrap_or(0.0), self.exp + sh as i64)
        } else {
            (self.mant.to_f64().unwrap_or(0.0), self.exp)
        };
        ldexp(m, e)
    }

    /// Largest dyadic with at most about 64 significant bits that does not
    /// exceed `self / rhs`.
    pub fn div_floor(&self, rhs: &Self) -> Self {
        assert!(!rhs.mant.is_zero(), "division by zero");
        if self.mant.is_zero() {
            return Self::zero();
        }
        let (a, b) = if rhs.mant.is_negative() {
            (-self.clone(), -rhs.clone())
        } else {
            (self.clone(), rhs.clone())
        };
        let shift = (DIV_BITS + b.mant.bits()).saturating_sub(a.mant.bits());
        let q = (a.mant << shift).div_floor(&b.mant);
        Self::new(q, a.exp - b.exp - shift as i64)
    }

    /// Floor to an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            let d = BigInt::one() << ((-self.exp) as u64);
            self.mant.div_floor(&d)
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt) {
        let e = self.exp.min(other.exp);
        (
            &self.mant << ((self.exp - e) as u64),
            &other.mant << ((other.exp - e) as u64),
        )
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Self::pow2(0)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if self.exp == other.exp {
            return self.mant.cmp(&other.mant);
        }
        let (a, b) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.mant.is_zero() {
            return rhs.clone();
        }
        if rhs.mant.is_zero() {
            return self.clone();
        }
        let (a, b) = self.aligned(rhs);
        Dyadic::normalize(a + b, self.exp.min(rhs.exp))
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        if rhs.mant.is_zero() {
            return self.clone();
        }
        let (a, b) = self.aligned(rhs);
        Dyadic::normalize(a - b, self.exp.min(rhs.exp))
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.mant.is_zero() || rhs.mant.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &rhs.mant,
            exp: self.exp + rhs.exp,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp >= 0 {
            write!(f, "{}", &self.mant << (self.exp as u64))
        } else if self.exp >= -64 {
            write!(f, "{}/{}", self.mant, BigInt::one() << ((-self.exp) as u64))
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p`, `p/q` with `q` a power of two, `m*2^e`, and finite decimals
/// whose value is dyadic (`0.375` but not `0.3`).
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::NonDyadic(s.to_string());
        if let Some((m, e)) = s.split_once("*2^") {
            let m: BigInt = m.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(m, e));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(bad());
            }
            let tz = q.trailing_zeros().unwrap_or(0);
            if q != BigInt::one() << tz {
                return Err(bad());
            }
            return Ok(Dyadic::new(p, -(tz as i64)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let k = frac.len() as u32;
            let five = num_traits::pow(BigInt::from(5), k as usize);
            let (q, r) = n.div_rem(&five);
            if !r.is_zero() {
                return Err(bad());
            }
            let q = if neg { -q } else { q };
            return Ok(Dyadic::new(q, -(k as i64)));
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Dyadic::new(p, 0))
    }
}

/// Wire form `{"num": m, "exp2": e}` with value `m * 2^e`.
#[derive(Serialize, Deserialize)]
struct DyadicWire {
    num: serde_json::Number,
    exp2: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let num = match self.mant.to_i64() {
            Some(v) => serde_json::Number::from(v),
            None => {
                return Err(serde::ser::Error::custom(format!(
                    "mantissa of {self} does not fit 64 bits"
                )))
            }
        };
        DyadicWire {
            num,
            exp2: self.exp,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Wire(DyadicWire),
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Wire(w) => {
                let m = w
                    .num
                    .as_i64()
                    .ok_or_else(|| serde::de::Error::custom("num must be an integer"))?;
                Ok(Dyadic::new(m, w.exp2))
            }
            Repr::Int(v) => Ok(Dyadic::from_int(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
