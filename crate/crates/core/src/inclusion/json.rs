//! JSON form of an inclusion problem.
//!
//! The field is either a built-in (`"kind": "affine-box"`), an inline map
//! (`"kind": "svf"` with `"svf"`) or a map file (`"kind": "svf-file"` with a
//! `"path"` relative to the problem file).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svf::json::{svf_from_str, svf_from_wire, SvfWire};

use super::{AffineBoxField, Curve, DiProblem, IterConfig, NetField, SvfField, TimeFn};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FieldWire {
    AffineBox(AffineBoxField),
    Svf { svf: SvfWire },
    SvfFile { path: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiProblemWire {
    pub field: FieldWire,
    pub x0: Vec<f64>,
    pub g: Curve,
    pub kappa: TimeFn,
    pub p: TimeFn,
    pub beta: f64,
    pub horizon: f64,
    pub iteration: IterConfig,
}

/// Field chosen at load time.
pub enum DiField {
    AffineBox(AffineBoxField),
    Svf(SvfField),
}

impl NetField for DiField {
    fn state_dim(&self) -> usize {
        match self {
            DiField::AffineBox(f) => f.state_dim(),
            DiField::Svf(f) => f.state_dim(),
        }
    }

    fn project(&self, t: f64, x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
        match self {
            DiField::AffineBox(f) => f.project(t, x, target),
            DiField::Svf(f) => f.project(t, x, target),
        }
    }

    fn radius(&self) -> f64 {
        match self {
            DiField::AffineBox(f) => f.radius(),
            DiField::Svf(f) => f.radius(),
        }
    }
}

/// Builds the problem; `base` resolves relative `svf-file` paths.
pub fn problem_from_wire(w: DiProblemWire, base: Option<&Path>) -> Result<(DiProblem<DiField>, IterConfig)> {
    let field = match w.field {
        FieldWire::AffineBox(f) => {
            f.check()?;
            DiField::AffineBox(f)
        }
        FieldWire::Svf { svf } => DiField::Svf(SvfField::new(svf_from_wire(&svf)?)?),
        FieldWire::SvfFile { path } => {
            let full = base.map_or_else(|| Path::new(&path).to_path_buf(), |b| b.join(&path));
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::InvalidProblem(format!("cannot read {}: {e}", full.display())))?;
            DiField::Svf(SvfField::new(svf_from_str(&text)?)?)
        }
    };
    let prob = DiProblem {
        field,
        x0: w.x0,
        g: w.g,
        kappa: w.kappa,
        p: w.p,
        beta: w.beta,
        horizon: w.horizon,
    };
    prob.validate()?;
    Ok((prob, w.iteration))
}

pub fn problem_from_str(text: &str, base: Option<&Path>) -> Result<(DiProblem<DiField>, IterConfig)> {
    let w: DiProblemWire = serde_json::from_str(text)?;
    problem_from_wire(w, base)
}
