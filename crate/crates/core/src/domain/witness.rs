use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cmp_scalar, min_of, Scalar};
use crate::setalg::{BasicSet, GeneralizedSet, SetSequence};

/// How the total budget ε is split among the faces of Γ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetRule {
    /// Face `i` receives `ε·2^-(i+1)`.
    #[default]
    Geometric,
    /// Every face receives `ε/|Γ|`. Needed for large Γ in floating point.
    Equal,
}

impl BudgetRule {
    fn budget<T: Scalar>(self, eps: &T, i: usize, count: usize) -> T {
        match self {
            BudgetRule::Geometric => eps.clone() * T::pow2(-(i as i64) - 1),
            BudgetRule::Equal => eps.div_floor(&T::from_int(count as i64)),
        }
    }
}

/// Half-width of the open inflation of `face` that fits in `budget`.
fn face_width<T: Scalar>(face: &BasicSet<T>, budget: &T, cap: Option<&T>) -> T {
    let axes = face.axes().expect("faces are nonempty");
    let flat = axes.iter().filter(|a| a.is_degenerate()).count();
    let lens: Vec<T> = axes.iter().filter(|a| !a.is_degenerate()).map(|a| a.length()).collect();
    let two = T::from_int(2);
    let mut w_max = lens
        .iter()
        .fold(None::<T>, |m, l| Some(m.map_or(l.clone(), |m| min_of(&m, l))))
        .map_or_else(T::one, |l| l.half().half());
    if let Some(c) = cap {
        w_max = min_of(&w_max, c);
    }
    let volume = |w: &T| {
        let side = two.clone() * w.clone();
        let mut v = T::one();
        for _ in 0..flat {
            v = v * side.clone();
        }
        lens.iter().fold(v, |acc, l| acc * (l.clone() + side.clone()))
    };
    if flat == 1 {
        let denom = lens
            .iter()
            .fold(two.clone(), |acc, l| acc * (l.clone() + two.clone() * w_max.clone()));
        return min_of(&w_max, &budget.div_floor(&denom));
    }
    let mut w = T::one();
    while w > w_max {
        w = w.half();
    }
    while volume(&w) > *budget {
        w = w.half();
    }
    w
}

/// Open boxes around every face, face `i` inflated within its share of `eps`.
pub fn witness_from_faces<T: Scalar>(
    faces: &[BasicSet<T>],
    eps: &T,
    rule: BudgetRule,
) -> Result<GeneralizedSet<T>> {
    if *eps <= T::zero() {
        return Err(Error::NonPositiveBudget);
    }
    let Some(dim) = faces.first().map(BasicSet::dim) else {
        return Ok(GeneralizedSet::empty(1));
    };
    // in one dimension keep neighbouring inflations apart
    let cap = if dim == 1 {
        let mut pts: Vec<T> = faces.iter().filter_map(|f| f.lo()).map(|v| v[0].clone()).collect();
        pts.sort_by(cmp_scalar);
        pts.windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .filter(|g| *g > T::zero())
            .fold(None::<T>, |m, g| Some(m.map_or(g.clone(), |m| min_of(&m, &g))))
            .map(|g| g.half().half())
    } else {
        None
    };
    let parts = faces
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let b = rule.budget(eps, i, faces.len());
            let w = face_width(f, &b, cap.as_ref());
            f.inflate_open(&w)
        })
        .collect();
    GeneralizedSet::new(dim, parts)
}

/// Witness for the literal Γ of `x` under the geometric rule.
pub fn make_witness<T: Scalar>(x: &SetSequence<T>, ambient: &BasicSet<T>, eps: &T) -> Result<GeneralizedSet<T>> {
    if ambient.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: ambient.dim(),
            found: x.dim(),
        });
    }
    let faces = sequence_gamma(x);
    let mut m = witness_from_faces(&faces, eps, BudgetRule::Geometric)?;
    if m.is_empty() {
        m = GeneralizedSet::empty(x.dim());
    }
    Ok(m)
}

pub(crate) fn sequence_gamma<T: Scalar>(x: &SetSequence<T>) -> Vec<BasicSet<T>> {
    x.union().gamma().to_vec()
}

/// Generator `ε ↦ M(ε)` with a distance oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum RepresentabilityWitness<T> {
    Faces { faces: Vec<BasicSet<T>>, rule: BudgetRule },
    /// `M(ε) = A(ε/2) ∪ B(ε/2)`.
    Union(Box<RepresentabilityWitness<T>>, Box<RepresentabilityWitness<T>>),
}

impl<T: Scalar> RepresentabilityWitness<T> {
    pub fn for_sequence(x: &SetSequence<T>, rule: BudgetRule) -> Self {
        RepresentabilityWitness::Faces {
            faces: sequence_gamma(x),
            rule,
        }
    }

    pub fn generate(&self, eps: &T, dim: usize) -> Result<GeneralizedSet<T>> {
        let m = match self {
            RepresentabilityWitness::Faces { faces, rule } => witness_from_faces(faces, eps, *rule)?,
            RepresentabilityWitness::Union(a, b) => {
                let h = eps.half();
                a.generate(&h, dim)?.union(&b.generate(&h, dim)?)?
            }
        };
        Ok(if m.is_empty() { GeneralizedSet::empty(dim) } else { m })
    }

    /// Euclidean distance from `x` to `M(ε)`.
    pub fn distance(&self, x: &[T], eps: &T, dim: usize) -> Result<f64> {
        let m = self.generate(eps, dim)?;
        Ok(crate::setalg::dist_point_set(x, &m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn empty_gamma_gives_empty_witness() {
        let m = witness_from_faces::<f64>(&[], &0.3, BudgetRule::Geometric).unwrap();
        assert!(m.is_empty());
        assert!(witness_from_faces::<f64>(&[], &0.0, BudgetRule::Geometric).is_err());
    }

    #[test]
    fn geometric_budgets_halve() {
        let faces: Vec<_> = ["0", "1/2", "1"].iter().map(|p| BasicSet::singleton(&[d(p)])).collect();
        let m = witness_from_faces(&faces, &d("1/4"), BudgetRule::Geometric).unwrap();
        let widths: Vec<Dyadic> = m.parts().iter().map(|p| p.measure()).collect();
        assert_eq!(widths, vec![d("1/8"), d("1/16"), d("1/32")]);
    }

    #[test]
    fn square_faces_fit_their_budget() {
        let sq = BasicSet::closed_box(&[d("0"), d("0")], &[d("1"), d("1")]).unwrap();
        let faces = sq.faces();
        let m = witness_from_faces(&faces, &d("1/8"), BudgetRule::Equal).unwrap();
        assert!(m.measure() <= d("1/8"));
        for (f, p) in faces.iter().zip(m.parts()) {
            assert!(f.inner_margin(p).is_some());
        }
    }
}
