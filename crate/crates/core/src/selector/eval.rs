use serde::Serialize;

use crate::domain::{witness_from_faces, BudgetRule};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::setalg::{BasicSet, GeneralizedSet};

use super::SelectorChain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Undefined {
    /// Outside the domain box or outside `dom(f_n)`.
    OutsideDomain,
    /// Inside the representability witness of `dom(f_n)`.
    InsideWitness,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalResult<T> {
    /// Value in original range coordinates.
    Value(Vec<T>),
    Undefined(Undefined),
}

/// Uniform bucket grid over a box, listing the parts meeting each bucket.
struct BoxIndex {
    lo: Vec<f64>,
    size: Vec<f64>,
    side: usize,
    buckets: Vec<Vec<usize>>,
}

impl BoxIndex {
    fn new(region: &BasicSet<f64>, parts: &[BasicSet<f64>]) -> Self {
        let dim = region.dim();
        let lo = region.lo().unwrap_or_else(|| vec![0.0; dim]);
        let hi = region.hi().unwrap_or_else(|| vec![0.0; dim]);
        let target = (parts.len().max(1) as f64).powf(1.0 / dim as f64).ceil() as usize;
        let side = target.clamp(1, 64);
        let size: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| ((b - a) / side as f64).max(f64::MIN_POSITIVE))
            .collect();
        let mut idx = BoxIndex {
            lo,
            size,
            side,
            buckets: vec![Vec::new(); side.pow(dim as u32)],
        };
        for (p, part) in parts.iter().enumerate() {
            let (Some(a), Some(b)) = (part.lo(), part.hi()) else { continue };
            let span: Vec<(usize, usize)> = (0..dim).map(|k| (idx.bucket(k, a[k]), idx.bucket(k, b[k]))).collect();
            let mut cur: Vec<usize> = span.iter().map(|s| s.0).collect();
            'walk: loop {
                let f = cur.iter().fold(0, |acc, &i| acc * side + i);
                idx.buckets[f].push(p);
                for k in (0..dim).rev() {
                    if cur[k] < span[k].1 {
                        cur[k] += 1;
                        continue 'walk;
                    }
                    cur[k] = span[k].0;
                }
                break;
            }
        }
        idx
    }

    fn bucket(&self, k: usize, v: f64) -> usize {
        let t = ((v - self.lo[k]) / self.size[k]).floor();
        if t.is_nan() || t < 0.0 {
            0
        } else {
            (t as usize).min(self.side - 1)
        }
    }

    fn candidates(&self, x: &[f64]) -> &[usize] {
        let f = x
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &v)| acc * self.side + self.bucket(k, v));
        &self.buckets[f]
    }
}

/// Evaluates the last step of a chain against a fixed witness `M(ε_dom)`.
pub struct Evaluator<'a, T> {
    chain: &'a SelectorChain<T>,
    witness: GeneralizedSet<T>,
    index: BoxIndex,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    /// Witness built from the literal faces of the final pieces with equal
    /// budget shares.
    pub fn new(chain: &'a SelectorChain<T>, eps_dom: &T) -> Result<Self> {
        let svf = chain.svf();
        let step = chain.last();
        let cells: Vec<BasicSet<T>> = (0..svf.cell_count())
            .filter(|&c| step.assignment()[c].is_some())
            .map(|c| svf.cell(c))
            .collect();
        let dom = GeneralizedSet::new(svf.dim(), cells)?;
        let witness = witness_from_faces(dom.gamma(), eps_dom, BudgetRule::Equal)?;
        let parts64: Vec<BasicSet<f64>> = witness.parts().iter().map(BasicSet::to_f64).collect();
        let index = BoxIndex::new(&svf.domain().to_f64(), &parts64);
        Ok(Evaluator { chain, witness, index })
    }

    pub fn witness(&self) -> &GeneralizedSet<T> {
        &self.witness
    }

    pub fn in_witness(&self, x: &[T]) -> bool {
        let xf: Vec<f64> = x.iter().map(Scalar::as_f64).collect();
        self.index
            .candidates(&xf)
            .iter()
            .any(|&p| self.witness.parts()[p].contains(x))
    }

    pub fn eval(&self, x: &[T]) -> EvalResult<T> {
        let Some(v) = self.cell_value(x) else {
            return EvalResult::Undefined(Undefined::OutsideDomain);
        };
        if self.in_witness(x) {
            return EvalResult::Undefined(Undefined::InsideWitness);
        }
        EvalResult::Value(v)
    }

    /// Value of the final piece whose cell contains `x`, ignoring the witness.
    pub fn cell_value(&self, x: &[T]) -> Option<Vec<T>> {
        let svf = self.chain.svf();
        let c = svf.locate(x)?;
        self.chain.last().value::<T>(c).map(|r| svf.range().denormalize(&r))
    }
}

impl<T: Scalar> SelectorChain<T> {
    pub fn evaluator(&self, eps_dom: &T) -> Result<Evaluator<'_, T>> {
        Evaluator::new(self, eps_dom)
    }

    /// One-off evaluation; build an [`Evaluator`] for repeated queries.
    pub fn eval(&self, x: &[T], eps_dom: &T) -> Result<EvalResult<T>> {
        Ok(self.evaluator(eps_dom)?.eval(x))
    }
}
