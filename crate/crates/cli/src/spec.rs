//! Model specifications: strict JSON schema plus range validation.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use phq_core::{Operator, PiecewisePotential, Tolerance};
use serde::{Deserialize, Serialize};

/// Loading failures carry the offending location: a line and column for
/// syntax errors, a field path for schema and range violations.
#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column} (field `{path}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];
pub type ComplexRows = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParitySpec>,
    pub tasks: Vec<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    Matrix {
        entries: ComplexRows,
    },
    SplitMatrix {
        h0: ComplexRows,
        h1: ComplexRows,
        epsilon: f64,
    },
    Schroedinger {
        #[serde(rename = "L")]
        half_width: f64,
        #[serde(rename = "N")]
        points: usize,
        potential: PotentialSpec,
        epsilon: f64,
    },
    /// `S·diag(E)·S⁻¹` drawn from the run seed.
    RandomRealSpectrum {
        dim: usize,
        cond: f64,
    },
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Matrix { .. } => "matrix",
            Model::SplitMatrix { .. } => "split_matrix",
            Model::Schroedinger { .. } => "schroedinger",
            Model::RandomRealSpectrum { .. } => "random_real_spectrum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParitySpec {
    Named(NamedParity),
    Matrix(ComplexRows),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedParity {
    /// `(Pψ)(x) = ψ(−x)`: index reversal on the grid
    GridReflection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Spectral,
    Perturbative(PerturbativeTask),
    Wave,
    Scaling(ScalingTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Spectral => "spectral",
            Task::Perturbative(_) => "perturbative",
            Task::Wave => "wave",
            Task::Scaling(_) => "scaling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbativeTask {
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingTask {
    pub eps_list: Vec<f64>,
    /// Defaults to the order of the first perturbative task, else 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

pub const MAX_ELL: usize = 5;

/// Parses and validates a spec read from `path`.
pub fn load_spec(path: &Path) -> Result<ModelSpec, SpecError> {
    let text = fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<ModelSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ModelSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SpecError::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    spec.validate()?;
    Ok(spec)
}

impl ModelSpec {
    /// Range and shape checks beyond the serde schema.
    pub fn validate(&self) -> Result<(), SpecError> {
        let dim = self.validate_model()?;
        if self.tasks.is_empty() {
            return Err(schema("tasks", "at least one task is required"));
        }
        for (i, task) in self.tasks.iter().enumerate() {
            match task {
                Task::Perturbative(p) => check_ell(p.ell, &format!("tasks[{i}].perturbative.ell"))?,
                Task::Scaling(s) => {
                    let at = format!("tasks[{i}].scaling");
                    if let Some(ell) = s.ell {
                        check_ell(ell, &format!("{at}.ell"))?;
                    }
                    check_eps_list(&s.eps_list, &format!("{at}.eps_list"))?;
                }
                Task::Spectral | Task::Wave => {}
            }
        }
        if let Some(ParitySpec::Matrix(rows)) = &self.parity {
            let n = check_square(rows, "parity")?;
            if n != dim {
                return Err(schema(
                    "parity",
                    format!("{n}×{n} parity for a {dim}-dimensional model"),
                ));
            }
        }
        if let Some(t) = &self.tolerances {
            self.tolerance_with(t.abs_tol)
                .map_err(|e| schema("tolerances", e.to_string()))?;
        }
        Ok(())
    }

    fn validate_model(&self) -> Result<usize, SpecError> {
        match &self.model {
            Model::Matrix { entries } => check_square(entries, "model.matrix.entries"),
            Model::SplitMatrix { h0, h1, epsilon } => {
                let n = check_square(h0, "model.split_matrix.h0")?;
                if check_square(h1, "model.split_matrix.h1")? != n {
                    return Err(schema("model.split_matrix.h1", "dimension differs from h0"));
                }
                check_finite(*epsilon, "model.split_matrix.epsilon")?;
                Ok(n)
            }
            Model::Schroedinger {
                half_width,
                points,
                potential,
                epsilon,
            } => {
                let at = "model.schroedinger";
                if !(*half_width > 0.0 && half_width.is_finite()) {
                    return Err(schema(format!("{at}.L"), "must be positive and finite"));
                }
                if *points < 16 {
                    return Err(schema(format!("{at}.N"), "must be at least 16"));
                }
                check_finite(*epsilon, &format!("{at}.epsilon"))?;
                let v = potential
                    .build()
                    .map_err(|e| schema(format!("{at}.potential"), e.to_string()))?;
                if let Some((lo, hi)) = v.support() {
                    if !(lo > -half_width && hi < *half_width) {
                        return Err(schema(
                            format!("{at}.potential.breakpoints"),
                            "support must lie inside (−L, L)",
                        ));
                    }
                }
                Ok(*points)
            }
            Model::RandomRealSpectrum { dim, cond } => {
                let at = "model.random_real_spectrum";
                if *dim == 0 {
                    return Err(schema(format!("{at}.dim"), "must be positive"));
                }
                if !(*cond >= 1.0 && cond.is_finite()) {
                    return Err(schema(format!("{at}.cond"), "must be a finite number ≥ 1"));
                }
                Ok(*dim)
            }
        }
    }

    /// Spec tolerances, with `abs_override` taking precedence for `abs_tol`.
    pub fn tolerance_with(&self, abs_override: Option<f64>) -> phq_core::Result<Tolerance> {
        let default = Tolerance::default();
        let spec = self.tolerances.unwrap_or(ToleranceSpec {
            abs_tol: None,
            rel_tol: None,
        });
        Tolerance::new(
            abs_override.or(spec.abs_tol).unwrap_or(default.abs_tol),
            spec.rel_tol.unwrap_or(default.rel_tol),
        )
    }
}

impl PotentialSpec {
    pub fn build(&self) -> phq_core::Result<PiecewisePotential> {
        PiecewisePotential::new(self.breakpoints.clone(), self.values.clone())
    }
}

fn check_ell(ell: usize, path: &str) -> Result<(), SpecError> {
    if (1..=MAX_ELL).contains(&ell) {
        Ok(())
    } else {
        Err(schema(path, format!("{ell} outside 1..={MAX_ELL}")))
    }
}

fn check_eps_list(eps: &[f64], path: &str) -> Result<(), SpecError> {
    if eps.len() < 3 {
        return Err(schema(path, "needs at least 3 couplings"));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(schema(path, "couplings must be positive and finite"));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(schema(path, "couplings must be strictly decreasing"));
    }
    Ok(())
}

fn check_finite(x: f64, path: &str) -> Result<(), SpecError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(schema(path, "must be finite"))
    }
}

fn check_square(rows: &ComplexRows, path: &str) -> Result<usize, SpecError> {
    let n = rows.len();
    if n == 0 {
        return Err(schema(path, "matrix is empty"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(schema(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
        if row.iter().flatten().any(|x| !x.is_finite()) {
            return Err(schema(format!("{path}[{i}]"), "entries must be finite"));
        }
    }
    Ok(n)
}

pub fn to_operator(rows: &ComplexRows) -> phq_core::Result<Operator> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Operator::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEP: &str = include_str!("../specs/step_potential.json");

    #[test]
    fn shipped_step_spec_loads() {
        let spec = parse_spec(STEP).unwrap();
        match &spec.model {
            Model::Schroedinger { potential, .. } => {
                assert_eq!(potential.build().unwrap(), PiecewisePotential::step());
            }
            other => panic!("unexpected model {}", other.kind()),
        }
    }

    #[test]
    fn two_models_are_rejected() {
        let text = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]]},
            "random_real_spectrum": {"dim": 2, "cond": 2}}, "tasks": ["spectral"]}"#;
        assert!(matches!(parse_spec(text), Err(SpecError::Parse { .. })));
    }

    #[test]
    fn ell_out_of_range() {
        let text = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]]}},
            "tasks": [{"perturbative": {"ell": 9}}]}"#;
        match parse_spec(text) {
            Err(SpecError::Schema { path, .. }) => assert_eq!(path, "tasks[0].perturbative.ell"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_names_its_path() {
        let text = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]], "extra": 1}},
            "tasks": ["spectral"]}"#;
        match parse_spec(text) {
            Err(SpecError::Parse { path, line, .. }) => {
                assert!(path.starts_with("model.matrix"), "{path}");
                assert_eq!(line, 1);
            }
            other => panic!("{other:?}"),
        }
        let top = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]]}},
            "tasks": ["spectral"], "colour": "red"}"#;
        assert!(parse_spec(top).is_err());
    }

    #[test]
    fn eps_list_must_decrease() {
        let text = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0]]]}},
            "tasks": [{"scaling": {"eps_list": [0.1, 0.2, 0.05]}}]}"#;
        assert!(matches!(parse_spec(text), Err(SpecError::Schema { .. })));
    }

    #[test]
    fn parity_dimension_checked() {
        let text = r#"{"name": "x", "model": {"matrix": {"entries": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]}},
            "parity": [[[1, 0]]], "tasks": ["spectral"]}"#;
        assert!(matches!(parse_spec(text), Err(SpecError::Schema { .. })));
        let named = text.replace("[[[1, 0]]]", "\"grid_reflection\"");
        assert!(parse_spec(&named).is_ok());
    }

    #[test]
    fn tolerance_override() {
        let spec = parse_spec(STEP).unwrap();
        let tol = spec.tolerance_with(Some(1e-9)).unwrap();
        assert_eq!(tol.abs_tol, 1e-9);
    }
}
