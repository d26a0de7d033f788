//! JSON interchange. Endpoints travel as dyadic objects `{"num", "exp2"}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::basic::{BasicKind, BasicSet};
use super::generalized::GeneralizedSet;
use super::sequence::{Pairing, SetSequence};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartWire {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<Dyadic>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<Dyadic>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_lo: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_hi: Option<Vec<bool>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetWire {
    pub dim: usize,
    pub parts: Vec<PartWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceWire {
    pub dim: usize,
    #[serde(default)]
    pub pairing: Pairing,
    pub sets: Vec<SetWire>,
}

pub fn part_to_wire<T: Scalar>(b: &BasicSet<T>) -> PartWire {
    let dy = |v: Vec<T>| v.iter().map(Scalar::to_dyadic).collect::<Vec<_>>();
    match b.kind() {
        BasicKind::Empty => PartWire {
            kind: "empty".into(),
            dim: Some(b.dim()),
            lo: None,
            hi: None,
            closed_lo: None,
            closed_hi: None,
        },
        BasicKind::Singleton => PartWire {
            kind: "singleton".into(),
            dim: None,
            lo: b.lo().map(dy),
            hi: None,
            closed_lo: None,
            closed_hi: None,
        },
        BasicKind::Box => {
            let a = b.axes().expect("box has axes");
            PartWire {
                kind: "box".into(),
                dim: None,
                lo: b.lo().map(dy),
                hi: b.hi().map(dy),
                closed_lo: Some(a.iter().map(|i| i.closed_lo).collect()),
                closed_hi: Some(a.iter().map(|i| i.closed_hi).collect()),
            }
        }
    }
}

pub fn part_from_wire<T: Scalar>(w: &PartWire, dim: Option<usize>) -> Result<BasicSet<T>> {
    let conv = |v: &Vec<Dyadic>| v.iter().map(T::from_dyadic).collect::<Vec<T>>();
    let missing = |f: &str| Error::InvalidSet(format!("{} part without {f}", w.kind));
    let b = match w.kind.as_str() {
        "empty" => {
            let d = w.dim.or(dim).ok_or_else(|| missing("dim"))?;
            BasicSet::empty(d)
        }
        "singleton" => {
            let p = w.lo.as_ref().ok_or_else(|| missing("lo"))?;
            if let Some(h) = &w.hi {
                if h != p {
                    return Err(Error::InvalidSet("singleton with lo != hi".into()));
                }
            }
            BasicSet::singleton(&conv(p))
        }
        "box" | "open-box" | "closed-box" => {
            let lo = w.lo.as_ref().ok_or_else(|| missing("lo"))?;
            let hi = w.hi.as_ref().ok_or_else(|| missing("hi"))?;
            let default = w.kind == "closed-box";
            let n = lo.len();
            let cl = w.closed_lo.clone().unwrap_or_else(|| vec![default; n]);
            let ch = w.closed_hi.clone().unwrap_or_else(|| vec![default; n]);
            if lo.iter().zip(hi).any(|(a, b)| a > b) {
                return Err(Error::InvalidSet("box with lo > hi".into()));
            }
            BasicSet::with_flags(&conv(lo), &conv(hi), &cl, &ch)?
        }
        other => return Err(Error::InvalidSet(format!("unknown part kind {other:?}"))),
    };
    if let Some(d) = dim {
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
    }
    Ok(b)
}

pub fn set_to_wire<T: Scalar>(s: &GeneralizedSet<T>) -> SetWire {
    SetWire {
        dim: s.dim(),
        parts: s.parts().iter().map(part_to_wire).collect(),
    }
}

pub fn set_from_wire<T: Scalar>(w: &SetWire) -> Result<GeneralizedSet<T>> {
    let parts = w
        .parts
        .iter()
        .map(|p| part_from_wire(p, Some(w.dim)))
        .collect::<Result<Vec<_>>>()?;
    GeneralizedSet::new(w.dim, parts)
}

pub fn sequence_to_wire<T: Scalar>(s: &SetSequence<T>) -> SequenceWire {
    SequenceWire {
        dim: s.dim(),
        pairing: s.pairing(),
        sets: s.items().iter().map(set_to_wire).collect(),
    }
}

pub fn sequence_from_wire<T: Scalar>(w: &SequenceWire) -> Result<SetSequence<T>> {
    let items = w
        .sets
        .iter()
        .map(|s| {
            if s.dim != w.dim {
                return Err(Error::DimensionMismatch {
                    expected: w.dim,
                    found: s.dim,
                });
            }
            set_from_wire(s)
        })
        .collect::<Result<Vec<_>>>()?;
    SetSequence::new(w.dim, items, w.pairing)
}

impl<T: Scalar> Serialize for BasicSet<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        part_to_wire(self).serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for BasicSet<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = PartWire::deserialize(de)?;
        part_from_wire(&w, None).map_err(D::Error::custom)
    }
}

impl<T: Scalar> Serialize for GeneralizedSet<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        set_to_wire(self).serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for GeneralizedSet<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = SetWire::deserialize(de)?;
        set_from_wire(&w).map_err(D::Error::custom)
    }
}

impl<T: Scalar> Serialize for SetSequence<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        sequence_to_wire(self).serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for SetSequence<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = SequenceWire::deserialize(de)?;
        sequence_from_wire(&w).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_roundtrip() {
        let txt = r#"{"dim":1,"parts":[
            {"kind":"box","lo":["0"],"hi":["1/2"],"closed_lo":[true],"closed_hi":[false]},
            {"kind":"singleton","lo":[{"num":3,"exp2":-2}]},
            {"kind":"empty","dim":1}]}"#;
        let s: GeneralizedSet<Dyadic> = serde_json::from_str(txt).unwrap();
        assert_eq!(s.parts().len(), 2);
        let back: GeneralizedSet<Dyadic> = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_bad_input() {
        let non_dyadic = r#"{"dim":1,"parts":[{"kind":"box","lo":["0"],"hi":["1/3"]}]}"#;
        assert!(serde_json::from_str::<GeneralizedSet<Dyadic>>(non_dyadic).is_err());
        let wrong_dim = r#"{"dim":2,"parts":[{"kind":"singleton","lo":["0"]}]}"#;
        assert!(serde_json::from_str::<GeneralizedSet<Dyadic>>(wrong_dim).is_err());
        let inverted = r#"{"dim":1,"parts":[{"kind":"box","lo":["1"],"hi":["0"]}]}"#;
        assert!(serde_json::from_str::<GeneralizedSet<Dyadic>>(inverted).is_err());
    }
}
