use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::{BasicSet, GeneralizedSet};

/// Affine map `y ↦ (y - lo)·scale/width` from the range box into
/// `[0, scale]^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeMap<T> {
    lo: Vec<T>,
    width: Vec<T>,
    scale: T,
    fwd: Vec<T>,
    back: Vec<T>,
}

/// Largest cube side keeping `[0, s]^β` inside the open ball of radius ½,
/// rounded down to a multiple of 2⁻¹⁰.
pub fn half_ball_scale(beta: usize) -> f64 {
    let s = 0.5 / (beta as f64).sqrt();
    ((s * 1024.0).floor() - 1.0) / 1024.0
}

/// Correctly rounded `1/w` for floats; exact or floored for dyadics.
fn reciprocal<T: Scalar>(w: &T) -> T {
    if T::EXACT {
        return T::one().div_floor(w);
    }
    T::from_f64_exact(1.0 / w.as_f64()).unwrap_or_else(|| T::one().div_floor(w))
}

impl<T: Scalar> RangeMap<T> {
    pub fn identity(beta: usize) -> Self {
        RangeMap {
            lo: vec![T::zero(); beta],
            width: vec![T::one(); beta],
            scale: T::one(),
            fwd: vec![T::one(); beta],
            back: vec![T::one(); beta],
        }
    }

    /// Map for the closure of `range`. Flat axes get unit width. Exact
    /// scalars require every width and the scale to be powers of two.
    pub fn from_box(range: &BasicSet<T>, scale: T) -> Result<Self> {
        let axes = range
            .axes()
            .ok_or_else(|| Error::InvalidSet("range box is empty".into()))?;
        let lo = axes.iter().map(|a| a.lo.clone()).collect();
        let width = axes
            .iter()
            .map(|a| if a.is_degenerate() { T::one() } else { a.length() })
            .collect();
        Self::new(lo, width, scale)
    }

    pub fn new(lo: Vec<T>, width: Vec<T>, scale: T) -> Result<Self> {
        if scale <= T::zero() || width.iter().any(|w| *w <= T::zero()) {
            return Err(Error::InvalidSet("range widths and scale must be positive".into()));
        }
        if lo.len() != width.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: width.len(),
            });
        }
        let inv_s = reciprocal(&scale);
        let mut fwd = Vec::new();
        let mut back = Vec::new();
        for w in &width {
            let inv = reciprocal(w);
            if T::EXACT && (inv.clone() * w.clone() != T::one() || inv_s.clone() * scale.clone() != T::one()) {
                return Err(Error::NonDyadic(format!(
                    "range width {w:?} and scale {scale:?} must be powers of two for exact normalization"
                )));
            }
            fwd.push(scale.clone() * inv);
            back.push(w.clone() * inv_s.clone());
        }
        Ok(RangeMap {
            lo,
            width,
            scale,
            fwd,
            back,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn width(&self) -> &[T] {
        &self.width
    }

    pub fn scale(&self) -> &T {
        &self.scale
    }

    pub fn normalize(&self, y: &[T]) -> Vec<T> {
        y.iter()
            .zip(&self.lo)
            .zip(&self.fwd)
            .map(|((v, l), f)| (v.clone() - l.clone()) * f.clone())
            .collect()
    }

    pub fn denormalize(&self, r: &[T]) -> Vec<T> {
        r.iter()
            .zip(&self.lo)
            .zip(&self.back)
            .map(|((v, l), b)| l.clone() + v.clone() * b.clone())
            .collect()
    }

    pub fn normalize_box(&self, b: &BasicSet<T>) -> BasicSet<T> {
        match b.axes() {
            None => BasicSet::empty(b.dim()),
            Some(a) => {
                let axes = a
                    .iter()
                    .enumerate()
                    .map(|(k, i)| {
                        let f = |v: &T| (v.clone() - self.lo[k].clone()) * self.fwd[k].clone();
                        Some(i.map(f))
                    })
                    .collect();
                BasicSet::from_intervals(b.dim(), axes)
            }
        }
    }

    pub fn normalize_set(&self, s: &GeneralizedSet<T>) -> GeneralizedSet<T> {
        let parts = s.parts().iter().map(|p| self.normalize_box(p)).collect();
        GeneralizedSet::new(s.dim(), parts).expect("normalization keeps the dimension")
    }

    pub fn denormalize_set(&self, s: &GeneralizedSet<T>) -> GeneralizedSet<T> {
        let parts = s
            .parts()
            .iter()
            .map(|p| match p.axes() {
                None => p.clone(),
                Some(a) => {
                    let axes = a
                        .iter()
                        .enumerate()
                        .map(|(k, i)| Some(i.map(|v| self.lo[k].clone() + v.clone() * self.back[k].clone())))
                        .collect();
                    BasicSet::from_intervals(p.dim(), axes)
                }
            })
            .collect();
        GeneralizedSet::new(s.dim(), parts).expect("normalization keeps the dimension")
    }

    /// The box `lo + [0, width]` this map sends onto `[0, scale]^β`.
    pub fn source_box(&self) -> BasicSet<T> {
        let hi: Vec<T> = self.lo.iter().zip(&self.width).map(|(l, w)| l.clone() + w.clone()).collect();
        BasicSet::closed_box(&self.lo, &hi).expect("widths are positive")
    }

    /// Largest factor by which normalization stretches a length.
    pub fn max_stretch(&self) -> f64 {
        self.fwd.iter().map(Scalar::as_f64).fold(0.0, f64::max)
    }

    /// Largest factor by which denormalization stretches a length.
    pub fn max_shrink(&self) -> f64 {
        self.back.iter().map(Scalar::as_f64).fold(0.0, f64::max)
    }
}
