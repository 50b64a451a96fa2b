//! Report types. Every verdict carries the number it was decided on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Non-finite numbers are stored as `None` and serialize as `null`.
pub type Number = Option<f64>;

pub fn number(x: f64) -> Number {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: Number,
    /// Comparison applied to `value`: `"<="` or `">="`.
    pub relation: String,
    pub threshold: Number,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value: number(value),
            relation: "<=".into(),
            threshold: number(threshold),
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value: number(value),
            relation: ">=".into(),
            threshold: number(threshold),
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_sha256: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub kind: String,
    pub dim: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub epsilon: f64,
    pub residual: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSlice {
    pub y0: f64,
    /// `(x, Re Q₁(x, y₀), Im Q₁(x, y₀))`
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
    /// Reported quantities without a pass/fail decision.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Number>,
    /// Eigenvalues as `[re, im]`, sorted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge_log: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Vec<ScalingPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_slice: Option<KernelSlice>,
}

impl TaskRecord {
    pub fn new(task: &str) -> Self {
        Self {
            task: task.into(),
            ok: true,
            ..Self::default()
        }
    }

    pub fn failed(task: &str, error: String) -> Self {
        Self {
            task: task.into(),
            ok: false,
            error: Some(error),
            ..Self::default()
        }
    }

    pub fn value(&mut self, name: &str, x: f64) {
        self.values.insert(name.into(), number(x));
    }

    pub fn passed(&self) -> bool {
        self.ok && self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub provenance: Provenance,
    /// `None` when the model itself could not be built.
    pub model: Option<ModelSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_error: Option<String>,
    pub tasks: Vec<TaskRecord>,
    pub pass: bool,
}
