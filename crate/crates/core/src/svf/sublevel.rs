use rayon::prelude::*;

use crate::domain::{BudgetRule, RepresentableDomain};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::{GeneralizedSet, Pairing, SetSequence};

use super::RepresentableSvf;

/// Sets `C_i = {x : |r_i − F(x)| ≤ δ}` as unions of cells.
///
/// Sampled maps decide membership at cell centers against `δ + τ`, so each
/// `C_i` is a superset of the true sublevel and every member satisfies
/// `dist ≤ δ + τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SublevelFamily<T> {
    centers: Vec<Vec<T>>,
    delta: T,
    slack: T,
    members: Vec<Vec<usize>>,
}

/// Computes the sublevel family of `f` for normalized `centers`.
pub fn sublevel_domains<T: Scalar>(
    f: &RepresentableSvf<T>,
    centers: &[Vec<T>],
    delta: &T,
) -> Result<SublevelFamily<T>> {
    if *delta <= T::zero() {
        return Err(Error::NonPositiveBudget);
    }
    if let Some(c) = centers.iter().find(|c| c.len() != f.range_dim()) {
        return Err(Error::DimensionMismatch {
            expected: f.range_dim(),
            found: c.len(),
        });
    }
    let slack = f.slack().clone();
    if slack > *delta {
        return Err(Error::PrecisionUnattainable {
            tau: slack.as_f64(),
            allowed: delta.as_f64(),
        });
    }
    let level = delta.clone() + slack.clone();
    let level2 = level.clone() * level;
    let members = centers
        .par_iter()
        .map(|r| {
            (0..f.cell_count())
                .filter(|&i| f.values(i).and_then(|v| v.dist2(r)).is_some_and(|d| d <= level2))
                .collect()
        })
        .collect();
    Ok(SublevelFamily {
        centers: centers.to_vec(),
        delta: delta.clone(),
        slack,
        members,
    })
}

impl<T: Scalar> SublevelFamily<T> {
    pub fn centers(&self) -> &[Vec<T>] {
        &self.centers
    }

    pub fn delta(&self) -> &T {
        &self.delta
    }

    pub fn slack(&self) -> &T {
        &self.slack
    }

    /// Cell indices making up `C_i`.
    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    pub fn set(&self, f: &RepresentableSvf<T>, i: usize) -> GeneralizedSet<T> {
        let parts = self.members[i].iter().map(|&c| f.cell(c)).collect();
        GeneralizedSet::new(f.dim(), parts).expect("cells share the domain dimension")
    }

    pub fn sequence(&self, f: &RepresentableSvf<T>) -> SetSequence<T> {
        let items = (0..self.members.len()).map(|i| self.set(f, i)).collect();
        SetSequence::new(f.dim(), items, Pairing::RowMajor).expect("sets share the domain dimension")
    }

    /// Each `C_i` as a domain in the SVF's domain box.
    pub fn domains(&self, f: &RepresentableSvf<T>, rule: BudgetRule) -> Result<Vec<RepresentableDomain<T>>> {
        (0..self.members.len())
            .map(|i| {
                let seq = SetSequence::new(f.dim(), vec![self.set(f, i)], Pairing::RowMajor)?;
                RepresentableDomain::new(seq, f.domain().clone(), rule)
            })
            .collect()
    }

    /// `⋃ C_i` as a domain in the SVF's domain box. It passes the full
    /// representability check exactly when the sublevels cover the box up to
    /// cell boundaries.
    pub fn union_domain(&self, f: &RepresentableSvf<T>, rule: BudgetRule) -> Result<RepresentableDomain<T>> {
        RepresentableDomain::new(self.sequence(f), f.domain().clone(), rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::svf::build::tests::desk;
    use crate::svf::build_cellwise;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn desk_sublevels() {
        let f = build_cellwise(desk()).unwrap();
        let centers = vec![vec![d("0")], vec![d("1/4")], vec![d("1/2")]];
        let fam = sublevel_domains(&f, &centers, &d("1/4")).unwrap();
        assert_eq!(fam.members(1), &[0, 1]);
        // dist(0, {1/4}) = 1/4 sits on the closed level
        assert_eq!(fam.members(0), &[0, 1]);
        assert_eq!(fam.members(2), &[0, 1]);
        let tight = sublevel_domains(&f, &[vec![d("7/8")]], &d("1/4")).unwrap();
        assert_eq!(tight.members(0), &[1]);
        let none = sublevel_domains(&f, &[vec![d("1/2")]], &d("1/8")).unwrap();
        assert!(none.members(0).is_empty());
        let m = none.union_domain(&f, BudgetRule::Equal).unwrap().witness_set(&d("1/8")).unwrap();
        assert!(m.is_empty());
    }
}
