//! Machine-readable reports.
//!
//! A report lists every check as a measured value next to the tolerance it
//! was held to, plus free-form data.  Reports are deterministic: keys are
//! sorted, floats print in shortest round-trip form, and wall time is only
//! included on request.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{CMat, RMat};

pub const SCHEMA_VERSION: u32 = 1;

/// How a check compares its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ tolerance`.
    AtMost,
    /// `|value - expected| ≤ tolerance`.
    Equals,
    /// `lo ≤ value ≤ hi`.
    Within,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub comparison: Comparison,
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            comparison: Comparison::AtMost,
            value,
            tolerance,
            expected: None,
            range: None,
            // NaN fails.
            pass: value <= tolerance,
        }
    }

    pub fn equals(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            comparison: Comparison::Equals,
            value,
            tolerance,
            expected: Some(expected),
            range: None,
            pass: (value - expected).abs() <= tolerance,
        }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.to_string(),
            comparison: Comparison::Within,
            value,
            tolerance: 0.0,
            expected: None,
            range: Some([lo, hi]),
            pass: lo <= value && value <= hi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    /// SHA-256 of the arguments and of every input file read.
    pub inputs_digest: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            inputs_digest: String::new(),
            seed,
            checks: Vec::new(),
            data: BTreeMap::new(),
            warnings: Vec::new(),
            error: None,
            wall_time_s: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.data.insert(key.to_string(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Incremental digest of the inputs of a run.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn hex(&self) -> String {
        self.0
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Row-major nested arrays.
pub fn real_matrix(m: &RMat) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(x)).collect()))
            .collect(),
    )
}

/// Row-major nested arrays of `[re, im]` pairs.
pub fn complex_matrix(m: &CMat) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|z: &Complex64| json!([z.re, z.im])).collect()))
            .collect(),
    )
}
