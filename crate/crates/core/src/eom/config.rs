//! Field configurations described by JSON files.
//!
//! ```json
//! { "model": "axio-dilaton",
//!   "center": [0, 0, 0, 0], "spacing": 0.1, "points": 7,
//!   "metric": [ {"mu": 0, "nu": 0, "c": -0.1, "m": [0, 0, 0, 2]} ],
//!   "phi": [ [ {"c": 0.1, "m": [0, 0, 0, 0]}, {"c": 0.3, "m": [1, 0, 0, 0]} ],
//!            [ {"c": 1.2, "m": [0, 0, 0, 0]} ] ],
//!   "electric": [ [ {"mu": 0, "nu": 1, "c": 0.3, "m": [0, 0, 0, 0]} ],
//!                 [ ] ] }
//! ```
//!
//! The metric is `η` plus the listed symmetric terms, `φ^i` is the polynomial
//! in the `i`-th list and `F^Λ` the antisymmetric polynomial two-form in the
//! `Λ`-th list.  A term `{"c": c, "m": [p0, p1, p2, p3]}` is
//! `c x0^p0 x1^p1 x2^p2 x3^p3`.  `model` is a builtin name; `model_file`
//! names a model file instead, relative to the configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::GridPatch;
use super::residuals::{FieldConfiguration, Theory, MIN_POINTS};
use crate::field::{eta, M4};
use crate::model::{builtin, load_model};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    pub m: [u32; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorTerm {
    pub mu: usize,
    pub nu: usize,
    pub c: f64,
    pub m: [u32; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub model_file: Option<String>,
    pub center: [f64; 4],
    pub spacing: f64,
    pub points: usize,
    #[serde(default)]
    pub metric: Vec<TensorTerm>,
    pub phi: Vec<Vec<Term>>,
    #[serde(default)]
    pub electric: Vec<Vec<TensorTerm>>,
}

fn monomial(m: &[u32; 4], x: [f64; 4]) -> f64 {
    (0..4).map(|a| x[a].powi(m[a] as i32)).product()
}

fn tensor(terms: &[TensorTerm], x: [f64; 4], sign: f64) -> M4 {
    let mut out = M4::zeros();
    for t in terms {
        let v = t.c * monomial(&t.m, x);
        out[(t.mu, t.nu)] += v;
        out[(t.nu, t.mu)] += sign * v;
    }
    out
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            path: "configuration".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    fn validate(&self) -> Result<()> {
        let all = self.metric.iter().chain(self.electric.iter().flatten());
        for t in all {
            if t.mu > 3 || t.nu > 3 {
                return Err(Error::Invalid(format!("tensor index ({}, {}) out of range", t.mu, t.nu)));
            }
        }
        if self.electric.iter().flatten().any(|t| t.mu == t.nu) {
            return Err(Error::Invalid("two-form terms need distinct indices".into()));
        }
        if !(self.spacing > 0.0) || self.points < MIN_POINTS {
            return Err(Error::Invalid(format!("need positive spacing and at least {MIN_POINTS} points")));
        }
        Ok(())
    }

    /// Samples the configuration; `base` resolves a relative `model_file`.
    pub fn build(&self, base: Option<&Path>) -> Result<FieldConfiguration> {
        self.validate()?;
        let model = match (&self.model, &self.model_file) {
            (Some(name), None) => builtin(name)?,
            (None, Some(file)) => {
                let p = base.map_or_else(|| Path::new(file).to_path_buf(), |b| b.join(file));
                load_model(&p)?
            }
            _ => return Err(Error::Invalid("give exactly one of `model` and `model_file`".into())),
        };
        if self.phi.len() != model.chart.dim() {
            return Err(Error::Dimension(format!(
                "{} scalar components for a chart of dimension {}",
                self.phi.len(),
                model.chart.dim()
            )));
        }
        let nv = model.nv;
        if !self.electric.is_empty() && self.electric.len() != nv {
            return Err(Error::Dimension(format!(
                "{} field strengths for rank {nv}",
                self.electric.len()
            )));
        }
        let patch = GridPatch::centered(self.center, self.spacing, self.points)?;
        FieldConfiguration::from_fn(
            patch,
            Theory::new(model),
            |x| eta() + tensor(&self.metric, x, 1.0),
            |x| {
                self.phi
                    .iter()
                    .map(|terms| terms.iter().map(|t| t.c * monomial(&t.m, x)).sum())
                    .collect()
            },
            |x| {
                (0..nv)
                    .map(|k| {
                        self.electric
                            .get(k)
                            .map_or_else(M4::zeros, |terms| tensor(terms, x, -1.0))
                    })
                    .collect()
            },
        )
    }
}
