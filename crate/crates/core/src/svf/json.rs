//! JSON forms of set-valued maps.
//!
//! Cellwise maps use `{"domain", "range", "cells": [{"cell", "values"}]}` in
//! original range units and are revalidated on load. Sampled maps carry
//! `"tier": "sampled"`, the grid step, the stored range map, the declared
//! slack and the normalized nets (`null` for excluded cells).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::setalg::json::{part_from_wire, part_to_wire, set_from_wire, set_to_wire, PartWire, SetWire};
use crate::setalg::BasicSet;

use super::build::{build_cellwise, CellwiseSpec};
use super::range::RangeMap;
use super::{Grid, Layout, RepresentableSvf, ValueSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellWire {
    pub cell: PartWire,
    pub values: SetWire,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellwiseWire {
    pub domain: PartWire,
    pub range: PartWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Dyadic>,
    pub cells: Vec<CellWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RangeWire {
    pub lo: Vec<Dyadic>,
    pub width: Vec<Dyadic>,
    pub scale: Dyadic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledWire {
    pub tier: String,
    pub domain: PartWire,
    pub step: Dyadic,
    pub range: RangeWire,
    pub slack: Dyadic,
    pub nets: Vec<Option<Vec<Vec<Dyadic>>>>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum SvfWire {
    Sampled(SampledWire),
    Cellwise(CellwiseWire),
}

impl<'de> Deserialize<'de> for SvfWire {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        let sampled = v.get("tier").and_then(|t| t.as_str()) == Some("sampled");
        if sampled {
            serde_json::from_value(v).map(SvfWire::Sampled).map_err(D::Error::custom)
        } else {
            serde_json::from_value(v).map(SvfWire::Cellwise).map_err(D::Error::custom)
        }
    }
}

fn dy<T: Scalar>(v: &[T]) -> Vec<Dyadic> {
    v.iter().map(Scalar::to_dyadic).collect()
}

fn un<T: Scalar>(v: &[Dyadic]) -> Vec<T> {
    v.iter().map(T::from_dyadic).collect()
}

pub fn cellwise_spec_from_wire<T: Scalar>(w: &CellwiseWire) -> Result<CellwiseSpec<T>> {
    let cells = w
        .cells
        .iter()
        .map(|c| Ok((part_from_wire(&c.cell, None)?, set_from_wire(&c.values)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellwiseSpec {
        domain: part_from_wire(&w.domain, None)?,
        range: part_from_wire(&w.range, None)?,
        scale: w.scale.as_ref().map_or_else(T::one, T::from_dyadic),
        cells,
    })
}

pub fn svf_to_wire<T: Scalar>(f: &RepresentableSvf<T>) -> SvfWire {
    let range = f.range();
    match f.layout() {
        Layout::Cells(cells) => SvfWire::Cellwise(CellwiseWire {
            domain: part_to_wire(f.domain()),
            range: part_to_wire(&range.source_box()),
            scale: (*range.scale() != T::one()).then(|| range.scale().to_dyadic()),
            cells: cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let vals = match f.values(i) {
                        Some(ValueSet::Exact(s)) => range.denormalize_set(s),
                        _ => unreachable!("cellwise maps hold exact value sets"),
                    };
                    CellWire {
                        cell: part_to_wire(c),
                        values: set_to_wire(&vals),
                    }
                })
                .collect(),
        }),
        Layout::Grid(g) => SvfWire::Sampled(SampledWire {
            tier: "sampled".into(),
            domain: part_to_wire(f.domain()),
            step: g.step().to_dyadic(),
            range: RangeWire {
                lo: dy(range.lo()),
                width: dy(range.width()),
                scale: range.scale().to_dyadic(),
            },
            slack: f.slack().to_dyadic(),
            nets: (0..f.cell_count())
                .map(|i| f.values(i).map(|v| v.points().iter().map(|p| dy(p)).collect()))
                .collect(),
        }),
    }
}

pub fn svf_from_wire<T: Scalar>(w: &SvfWire) -> Result<RepresentableSvf<T>> {
    match w {
        SvfWire::Cellwise(c) => build_cellwise(cellwise_spec_from_wire(c)?),
        SvfWire::Sampled(s) => {
            if s.tier != "sampled" {
                return Err(Error::Parse(format!("unknown SVF tier {:?}", s.tier)));
            }
            let domain: BasicSet<T> = part_from_wire(&s.domain, None)?;
            let grid = Grid::new(&domain, T::from_dyadic(&s.step))?;
            if s.nets.len() != grid.len() {
                return Err(Error::Parse(format!(
                    "{} nets for a grid of {} cells",
                    s.nets.len(),
                    grid.len()
                )));
            }
            let range = RangeMap::new(un(&s.range.lo), un(&s.range.width), T::from_dyadic(&s.range.scale))?;
            let mut values = Vec::with_capacity(s.nets.len());
            for (i, n) in s.nets.iter().enumerate() {
                values.push(match n {
                    None => None,
                    Some(p) if p.is_empty() => return Err(Error::EmptyValueSet { cell: i }),
                    Some(p) => {
                        if let Some(q) = p.iter().find(|q| q.len() != range.dim()) {
                            return Err(Error::DimensionMismatch {
                                expected: range.dim(),
                                found: q.len(),
                            });
                        }
                        Some(ValueSet::Net(p.iter().map(|q| un(q)).collect()))
                    }
                });
            }
            Ok(RepresentableSvf::from_parts(
                domain,
                range,
                Layout::Grid(grid),
                values,
                T::from_dyadic(&s.slack),
            ))
        }
    }
}

impl<T: Scalar> Serialize for RepresentableSvf<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        svf_to_wire(self).serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for RepresentableSvf<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = SvfWire::deserialize(de)?;
        svf_from_wire(&w).map_err(D::Error::custom)
    }
}

/// Parses a map from JSON text, keeping line and column in syntax errors.
pub fn svf_from_str<T: Scalar>(text: &str) -> Result<RepresentableSvf<T>> {
    let w: SvfWire = serde_json::from_str(text)?;
    svf_from_wire(&w)
}
