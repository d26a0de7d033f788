//! JSON form of a selector chain.
//!
//! `{"n", "eps_dom", "svf", "steps": [{"level", "certificate", "pieces"}]}`
//! where each piece lists its mesh index, its normalized value and the
//! indices of the cells it covers. Loading checks that pieces are disjoint,
//! that cell indices exist and that values match their mesh indices.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::svf::json::{svf_from_wire, svf_to_wire, SvfWire};

use super::{mesh_point, ChainStep, MeshIndex, SelectorChain, StepCertificate};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceWire {
    pub mesh_index: MeshIndex,
    pub value: Vec<Dyadic>,
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepWire {
    pub level: u32,
    pub certificate: StepCertificate,
    pub pieces: Vec<PieceWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainWire {
    pub n: u32,
    pub eps_dom: Dyadic,
    pub svf: SvfWire,
    pub steps: Vec<StepWire>,
}

pub fn chain_to_wire<T: Scalar>(chain: &SelectorChain<T>) -> ChainWire {
    ChainWire {
        n: chain.n(),
        eps_dom: chain.eps_dom().to_dyadic(),
        svf: svf_to_wire(chain.svf()),
        steps: chain
            .steps()
            .iter()
            .map(|s| StepWire {
                level: s.level(),
                certificate: s.certificate().clone(),
                pieces: s
                    .groups()
                    .into_iter()
                    .map(|(j, cells)| PieceWire {
                        value: mesh_point(s.level(), &j),
                        mesh_index: j,
                        cells,
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn chain_from_wire<T: Scalar>(w: &ChainWire) -> Result<SelectorChain<T>> {
    let svf = svf_from_wire::<T>(&w.svf)?;
    if w.steps.len() != w.n as usize || w.n < 2 {
        return Err(Error::Parse(format!("chain of level {} lists {} steps", w.n, w.steps.len())));
    }
    let cells = svf.cell_count();
    let mut steps = Vec::with_capacity(w.steps.len());
    for (i, s) in w.steps.iter().enumerate() {
        if s.level as usize != i + 1 {
            return Err(Error::Parse(format!("step {} has level {}", i + 1, s.level)));
        }
        let mut assignment: Vec<Option<MeshIndex>> = vec![None; cells];
        for p in &s.pieces {
            if p.mesh_index.len() != svf.range_dim() || mesh_point::<Dyadic>(s.level, &p.mesh_index) != p.value {
                return Err(Error::Parse(format!(
                    "level {}: value {:?} does not match mesh index {:?}",
                    s.level, p.value, p.mesh_index
                )));
            }
            for &c in &p.cells {
                match assignment.get_mut(c) {
                    None => return Err(Error::Parse(format!("level {}: no cell {c}", s.level))),
                    Some(Some(_)) => return Err(Error::Parse(format!("level {}: cell {c} listed twice", s.level))),
                    Some(slot) => *slot = Some(p.mesh_index.clone()),
                }
            }
        }
        steps.push(ChainStep {
            level: s.level,
            assignment,
            certificate: s.certificate.clone(),
        });
    }
    Ok(SelectorChain::from_parts(svf, w.n, T::from_dyadic(&w.eps_dom), steps))
}

impl<T: Scalar> Serialize for SelectorChain<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        chain_to_wire(self).serialize(ser)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for SelectorChain<T> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let w = ChainWire::deserialize(de)?;
        chain_from_wire(&w).map_err(D::Error::custom)
    }
}

/// Parses a chain from JSON text, keeping line and column in syntax errors.
pub fn chain_from_str<T: Scalar>(text: &str) -> Result<SelectorChain<T>> {
    let w: ChainWire = serde_json::from_str(text)?;
    chain_from_wire(&w)
}
