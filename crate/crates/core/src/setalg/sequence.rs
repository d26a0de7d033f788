use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::basic::BasicSet;
use super::generalized::{subtract_all, GeneralizedSet};

/// Enumeration of the double index `(n, m)` of a set sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Item by item, parts in order.
    #[default]
    RowMajor,
    /// Cantor diagonals `(n + m)(n + m + 1)/2 + m`.
    Cantor,
}

pub fn cantor_pair(n: u64, m: u64) -> u64 {
    (n + m) * (n + m + 1) / 2 + m
}

pub fn cantor_unpair(k: u64) -> (u64, u64) {
    let w = (((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    // correct the float estimate
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= k {
        w += 1;
    }
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    let m = k - w * (w + 1) / 2;
    (w - m, m)
}

/// Sequence of generalized sets `I_n = ⋃_m I_nm`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetSequence<T> {
    dim: usize,
    items: Vec<GeneralizedSet<T>>,
    pairing: Pairing,
}

impl<T: Scalar> SetSequence<T> {
    pub fn new(dim: usize, items: Vec<GeneralizedSet<T>>, pairing: Pairing) -> Result<Self> {
        if let Some(s) = items.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        Ok(SetSequence { dim, items, pairing })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn items(&self) -> &[GeneralizedSet<T>] {
        &self.items
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn part(&self, n: usize, m: usize) -> Option<&BasicSet<T>> {
        self.items.get(n).and_then(|s| s.parts().get(m))
    }

    /// All parts as one generalized set.
    pub fn union(&self) -> GeneralizedSet<T> {
        let parts = self.items.iter().flat_map(|s| s.parts().iter().cloned()).collect();
        GeneralizedSet::new(self.dim, parts).expect("items share the dimension")
    }

    /// Index pairs in enumeration order.
    pub fn order(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .items
            .iter()
            .enumerate()
            .flat_map(|(n, s)| (0..s.parts().len()).map(move |m| (n, m)))
            .collect();
        if self.pairing == Pairing::Cantor {
            pairs.sort_by_key(|&(n, m)| cantor_pair(n as u64, m as u64));
        }
        pairs
    }

    /// Rank of `(n, m)` among the index pairs in use.
    pub fn flatten(&self, n: usize, m: usize) -> Option<usize> {
        self.part(n, m)?;
        self.order().iter().position(|&p| p == (n, m))
    }

    pub fn unflatten(&self, k: usize) -> Option<(usize, usize)> {
        self.order().get(k).copied()
    }

    pub fn overlap_blind_measure(&self) -> T {
        self.items.iter().fold(T::zero(), |s, i| s + i.measure())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SetSequence<U> {
        SetSequence {
            dim: self.dim,
            items: self.items.iter().map(|s| s.map(&f)).collect(),
            pairing: self.pairing,
        }
    }
}

/// Replaces every part by its difference with all parts enumerated before
/// it. The result has the same union and pairwise disjoint parts.
pub fn countable_reduction<T: Scalar>(seq: &SetSequence<T>) -> SetSequence<T> {
    let mut out: Vec<Vec<BasicSet<T>>> = vec![Vec::new(); seq.items.len()];
    let mut earlier: Vec<&BasicSet<T>> = Vec::new();
    for (n, m) in seq.order() {
        let part = seq.part(n, m).expect("pair from order()");
        let cut = earlier.iter().copied().filter(|e| e.intersects(part));
        out[n].extend(subtract_all(vec![part.clone()], cut));
        earlier.push(part);
    }
    let items = out
        .into_iter()
        .map(|parts| GeneralizedSet::new(seq.dim, parts).expect("pieces keep the dimension"))
        .collect();
    SetSequence {
        dim: seq.dim,
        items,
        pairing: seq.pairing,
    }
}

/// Checks relating a sequence to its reduction.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub input_overlap_blind_measure: f64,
    pub input_union_measure: f64,
    pub output_measure: f64,
    pub measures_agree: bool,
    pub disjoint: bool,
    pub same_union: bool,
    pub boundary_contained: bool,
}

pub fn reduction_report<T: Scalar>(input: &SetSequence<T>, output: &SetSequence<T>) -> ReductionReport {
    let ju = input.union();
    let ku = output.union();
    let union_measure = ju.union_measure();
    let out_measure = ku.measure();
    let exact_gamma = input.dim() == 1;
    let gamma_j = ju.gamma().to_vec();
    let boundary_contained = output.items().iter().all(|k| {
        let pieces = if exact_gamma {
            k.gamma().to_vec()
        } else {
            k.essential_boundary()
        };
        super::arrangement::is_covered(&pieces, &gamma_j)
    });
    ReductionReport {
        input_overlap_blind_measure: input.overlap_blind_measure().as_f64(),
        input_union_measure: union_measure.as_f64(),
        output_measure: out_measure.as_f64(),
        measures_agree: union_measure == out_measure,
        disjoint: ku.pairwise_disjoint(),
        same_union: ju.is_subset_of(&ku) && ku.is_subset_of(&ju),
        boundary_contained,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn iv(lo: &str, hi: &str, cl: bool, ch: bool) -> BasicSet<Dyadic> {
        BasicSet::with_flags(&[d(lo)], &[d(hi)], &[cl], &[ch]).unwrap()
    }

    #[test]
    fn cantor_roundtrip() {
        for k in 0..5000 {
            let (n, m) = cantor_unpair(k);
            assert_eq!(cantor_pair(n, m), k);
        }
        assert_eq!(cantor_pair(0, 0), 0);
        assert_eq!(cantor_pair(1, 0), 1);
        assert_eq!(cantor_pair(0, 1), 2);
    }

    #[test]
    fn reduction_of_overlapping_pair() {
        let items = vec![
            GeneralizedSet::from_part(iv("0", "1/2", true, true)),
            GeneralizedSet::from_part(iv("1/4", "1", false, true)),
        ];
        let seq = SetSequence::new(1, items, Pairing::RowMajor).unwrap();
        let k = countable_reduction(&seq);
        assert_eq!(k.items()[0].parts(), &[iv("0", "1/2", true, true)]);
        assert_eq!(k.items()[1].parts(), &[iv("1/2", "1", false, true)]);
        let r = reduction_report(&seq, &k);
        assert!(r.measures_agree && r.disjoint && r.same_union && r.boundary_contained);
        assert_eq!(r.input_overlap_blind_measure, 1.25);
        assert_eq!(r.output_measure, 1.0);
    }

    #[test]
    fn flatten_roundtrips_on_used_indices() {
        let items = vec![
            GeneralizedSet::new(1, vec![iv("0", "1", true, true), iv("2", "3", true, true)]).unwrap(),
            GeneralizedSet::from_part(iv("5", "6", true, true)),
        ];
        for pairing in [Pairing::RowMajor, Pairing::Cantor] {
            let seq = SetSequence::new(1, items.clone(), pairing).unwrap();
            for k in 0..3 {
                let (n, m) = seq.unflatten(k).unwrap();
                assert_eq!(seq.flatten(n, m), Some(k));
            }
            assert!(seq.unflatten(3).is_none());
        }
    }
}
