use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{max_of, min_of, Scalar};
use crate::setalg::{arrangement, BasicSet, GeneralizedSet};

use super::range::RangeMap;
use super::{Grid, Layout, RepresentableSvf, ValueSet};

/// Cellwise description in original range units.
#[derive(Clone, Debug, PartialEq)]
pub struct CellwiseSpec<T> {
    pub domain: BasicSet<T>,
    pub range: BasicSet<T>,
    /// Side of the normalized range cube `[0, scale]^β`, a power of two for
    /// exact scalars.
    pub scale: T,
    pub cells: Vec<(BasicSet<T>, GeneralizedSet<T>)>,
}

/// Finite net of a value set with its covering radius, in original units.
#[derive(Clone, Debug, PartialEq)]
pub struct Net<T> {
    pub points: Vec<Vec<T>>,
    pub radius: T,
}

/// What a sampler sees for one grid cell.
#[derive(Clone, Debug)]
pub struct GridCell<T> {
    pub index: usize,
    pub center: Vec<T>,
    pub cell: BasicSet<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledSpec<T> {
    /// Closed box whose sides are multiples of `step`.
    pub domain: BasicSet<T>,
    pub step: T,
    /// Range box; the bounding box of all net points when absent.
    pub range: Option<BasicSet<T>>,
    /// Side of the normalized range cube `[0, scale]^β`.
    pub scale: T,
}

fn is_closed_set<T: Scalar>(s: &GeneralizedSet<T>) -> bool {
    s.parts().iter().all(|p| p.closure() == *p)
}

/// Validates a cellwise description: the cells tile the domain, every value
/// set is closed, nonempty and inside the range box.
pub fn build_cellwise<T: Scalar>(spec: CellwiseSpec<T>) -> Result<RepresentableSvf<T>> {
    let dim = spec.domain.dim();
    if spec.domain.is_empty() {
        return Err(Error::InvalidSet("SVF domain is empty".into()));
    }
    let beta = spec.range.dim();
    let range = RangeMap::from_box(&spec.range, spec.scale.clone())?;
    let mut cells = Vec::with_capacity(spec.cells.len());
    let mut values = Vec::with_capacity(spec.cells.len());
    for (i, (cell, vals)) in spec.cells.into_iter().enumerate() {
        if cell.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cell.dim(),
            });
        }
        if vals.dim() != beta {
            return Err(Error::DimensionMismatch {
                expected: beta,
                found: vals.dim(),
            });
        }
        if cell.is_empty() {
            return Err(Error::BadTiling(format!("cell {i} is empty")));
        }
        if vals.is_empty() {
            return Err(Error::EmptyValueSet { cell: i });
        }
        if !is_closed_set(&vals) {
            return Err(Error::InvalidSet(format!("value set of cell {i} is not closed")));
        }
        if !vals.parts().iter().all(|p| p.is_subset_of(&spec.range.closure())) {
            return Err(Error::InvalidSet(format!("value set of cell {i} leaves the range box")));
        }
        cells.push(cell);
        values.push(Some(ValueSet::Exact(range.normalize_set(&vals))));
    }
    for (i, a) in cells.iter().enumerate() {
        if let Some(j) = cells[i + 1..].iter().position(|b| a.intersects(b)) {
            return Err(Error::BadTiling(format!("cells {i} and {} overlap", i + j + 1)));
        }
    }
    if !arrangement::is_covered(&cells, std::slice::from_ref(&spec.domain)) {
        return Err(Error::BadTiling("a cell leaves the domain".into()));
    }
    if let Some(gap) = arrangement::uncovered_part(&spec.domain, &[], &cells) {
        return Err(Error::BadTiling(format!("cells miss {:?}", gap.to_f64())));
    }
    Ok(RepresentableSvf::from_parts(
        spec.domain,
        range,
        Layout::Cells(cells),
        values,
        T::zero(),
    ))
}

fn sample_nets<T, S>(grid: &Grid<T>, sampler: S) -> Vec<Option<Net<T>>>
where
    T: Scalar,
    S: Fn(&GridCell<T>) -> Option<Net<T>> + Sync,
{
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            sampler(&GridCell {
                index: i,
                center: grid.center(i),
                cell: grid.cell(i),
            })
        })
        .collect()
}

/// Samples a net per grid cell. A sampler returning `None` excludes the cell
/// from the domain; an empty net is an error.
pub fn build_sampled<T, S>(spec: SampledSpec<T>, sampler: S) -> Result<RepresentableSvf<T>>
where
    T: Scalar,
    S: Fn(&GridCell<T>) -> Option<Net<T>> + Sync,
{
    let grid = Grid::new(&spec.domain, spec.step.clone())?;
    let nets = sample_nets(&grid, sampler);
    assemble(spec, grid, nets, false)
}

/// Like [`build_sampled`], but net radii are already in normalized range
/// units, so τ is their maximum rather than a stretched bound. The range box
/// must be given.
pub fn build_sampled_normalized<T, S>(spec: SampledSpec<T>, sampler: S) -> Result<RepresentableSvf<T>>
where
    T: Scalar,
    S: Fn(&GridCell<T>) -> Option<Net<T>> + Sync,
{
    if spec.range.is_none() {
        return Err(Error::InvalidSet("normalized radii need an explicit range box".into()));
    }
    let grid = Grid::new(&spec.domain, spec.step.clone())?;
    let nets = sample_nets(&grid, sampler);
    assemble(spec, grid, nets, true)
}

fn assemble<T: Scalar>(
    spec: SampledSpec<T>,
    grid: Grid<T>,
    nets: Vec<Option<Net<T>>>,
    normalized: bool,
) -> Result<RepresentableSvf<T>> {
    let mut beta = None;
    let mut radius = T::zero();
    for (i, n) in nets.iter().enumerate() {
        let Some(n) = n else { continue };
        if n.points.is_empty() {
            return Err(Error::EmptyValueSet { cell: i });
        }
        for p in &n.points {
            match beta {
                None => beta = Some(p.len()),
                Some(b) if b != p.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: b,
                        found: p.len(),
                    })
                }
                _ => {}
            }
        }
        radius = max_of(&radius, &n.radius);
    }
    let beta = beta.ok_or_else(|| Error::InvalidSet("sampler returned no values at all".into()))?;
    let range_box = match spec.range {
        Some(b) => {
            let c = b.closure();
            for n in nets.iter().flatten() {
                if let Some(p) = n.points.iter().find(|p| !c.contains(p)) {
                    return Err(Error::InvalidSet(format!("net point {p:?} leaves the range box")));
                }
            }
            b
        }
        None => {
            let mut lo: Vec<T> = vec![];
            let mut hi: Vec<T> = vec![];
            for p in nets.iter().flatten().flat_map(|n| &n.points) {
                if lo.is_empty() {
                    lo = p.clone();
                    hi = p.clone();
                }
                for k in 0..beta {
                    lo[k] = min_of(&lo[k], &p[k]);
                    hi[k] = max_of(&hi[k], &p[k]);
                }
            }
            BasicSet::closed_box(&lo, &hi)?
        }
    };
    let range = RangeMap::from_box(&range_box, spec.scale)?;
    let slack = if normalized {
        radius
    } else {
        let stretch = T::from_f64_exact(range.max_stretch())
            .ok_or_else(|| Error::InvalidSet("range stretch is not finite".into()))?;
        radius * stretch
    };
    let values = nets
        .into_iter()
        .map(|n| n.map(|n| ValueSet::Net(n.points.iter().map(|p| range.normalize(p)).collect())))
        .collect();
    Ok(RepresentableSvf::from_parts(
        spec.domain,
        range,
        Layout::Grid(grid),
        values,
        slack,
    ))
}
