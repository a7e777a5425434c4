//! JSON problem documents consumed by the CLI: one document describes one
//! channel (finite, scalar Gaussian, or matrix Gaussian) with an optional
//! transmission cost.

use capfb_core::channel::{FiniteChannelKernel, TransmissionCost};
use capfb_core::error::{CoreError, Result};
use capfb_core::gaussian::{GaussianMatrixParams, GaussianScalarParams};
use capfb_core::prob::{state_count, Alphabet, Simplex};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Kernel rows are accepted when they sum to 1 within this band, then
/// renormalized exactly.
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecKind {
    #[serde(rename = "finite")]
    Finite,
    #[serde(rename = "gaussianScalar")]
    GaussianScalar,
    #[serde(rename = "gaussianMatrix")]
    GaussianMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CostSpec {
    pub memory_k: usize,
    /// `[cost state][input]`, nonnegative.
    pub table: Vec<Vec<f64>>,
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FiniteSpec {
    pub input_size: usize,
    pub output_size: usize,
    pub memory_m: usize,
    /// `[window state][input][output]`, rows stochastic within `ROW_SUM_TOL`.
    pub kernel: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GaussianScalarSpec {
    pub c: f64,
    #[serde(default = "default_gain")]
    pub d: f64,
    pub r: f64,
    pub q: f64,
    pub k_v: f64,
    pub kappa: f64,
}

fn default_gain() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GaussianMatrixSpec {
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub k_v: Vec<Vec<f64>>,
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GaussianSpec {
    Scalar(GaussianScalarSpec),
    Matrix(GaussianMatrixSpec),
}

/// One problem document. `schemaVersion` must be 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ChannelSpecDocument {
    pub schema_version: u32,
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<GaussianSpec>,
    /// Optional distribution over the initial output window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

/// A parsed and validated problem.
#[derive(Debug)]
pub enum Problem {
    Finite {
        channel: FiniteChannelKernel,
        cost: Option<TransmissionCost>,
        initial: Option<Simplex>,
    },
    GaussianScalar(GaussianScalarParams),
    GaussianMatrix(GaussianMatrixParams),
}

fn renormalize_row(row: &[f64], what: &str) -> Result<Vec<f64>> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(CoreError::Domain(format!(
            "{what}: entries must be finite and nonnegative"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(CoreError::Domain(format!(
            "{what}: row sums to {sum}, outside 1 +- {ROW_SUM_TOL:e}"
        )));
    }
    Ok(row.iter().map(|p| p / sum).collect())
}

fn to_dmatrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(CoreError::Domain(format!("{name}: matrix must be non-empty")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CoreError::Domain(format!("{name}: ragged matrix rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl ChannelSpecDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::Domain(format!("spec document parse error: {e}")))
    }

    /// Validates the document and builds the solver-side problem.
    pub fn build(&self) -> Result<Problem> {
        if self.schema_version != 1 {
            return Err(CoreError::Domain(format!(
                "unsupported schemaVersion {} (expected 1)",
                self.schema_version
            )));
        }
        match self.kind {
            SpecKind::Finite => {
                let spec = self.finite.as_ref().ok_or_else(|| {
                    CoreError::Domain("kind is 'finite' but the 'finite' block is missing".into())
                })?;
                self.build_finite(spec)
            }
            SpecKind::GaussianScalar => match &self.gaussian {
                Some(GaussianSpec::Scalar(g)) => {
                    let params = GaussianScalarParams {
                        c: g.c,
                        d: g.d,
                        r: g.r,
                        q: g.q,
                        k_v: g.k_v,
                        kappa: g.kappa,
                    };
                    params.validate()?;
                    Ok(Problem::GaussianScalar(params))
                }
                _ => Err(CoreError::Domain(
                    "kind is 'gaussianScalar' but the 'gaussian' block is missing or not scalar"
                        .into(),
                )),
            },
            SpecKind::GaussianMatrix => match &self.gaussian {
                Some(GaussianSpec::Matrix(g)) => {
                    let params = GaussianMatrixParams::new(
                        to_dmatrix(&g.c, "C")?,
                        to_dmatrix(&g.d, "D")?,
                        to_dmatrix(&g.r, "R")?,
                        to_dmatrix(&g.q, "Q")?,
                        to_dmatrix(&g.k_v, "K_V")?,
                        g.kappa,
                    )?;
                    Ok(Problem::GaussianMatrix(params))
                }
                _ => Err(CoreError::Domain(
                    "kind is 'gaussianMatrix' but the 'gaussian' block is missing or not matrix"
                        .into(),
                )),
            },
        }
    }

    fn build_finite(&self, spec: &FiniteSpec) -> Result<Problem> {
        let input = Alphabet::new(spec.input_size)?;
        let output = Alphabet::new(spec.output_size)?;
        let states = state_count(spec.memory_m, spec.output_size)?;
        if spec.kernel.len() != states {
            return Err(CoreError::Domain(format!(
                "kernel has {} state slices, expected {states}",
                spec.kernel.len()
            )));
        }
        let mut rows = Vec::with_capacity(states);
        for (s, slice) in spec.kernel.iter().enumerate() {
            if slice.len() != spec.input_size {
                return Err(CoreError::Domain(format!(
                    "kernel state {s} has {} input rows, expected {}",
                    slice.len(),
                    spec.input_size
                )));
            }
            let mut out_rows = Vec::with_capacity(spec.input_size);
            for (a, row) in slice.iter().enumerate() {
                if row.len() != spec.output_size {
                    return Err(CoreError::Domain(format!(
                        "kernel row (state {s}, input {a}) has {} outputs, expected {}",
                        row.len(),
                        spec.output_size
                    )));
                }
                out_rows.push(renormalize_row(
                    row,
                    &format!("kernel row (state {s}, input {a})"),
                )?);
            }
            rows.push(out_rows);
        }
        let channel = FiniteChannelKernel::new(spec.memory_m, input, output, rows)?;
        let cost = match &spec.cost {
            Some(c) => Some(TransmissionCost::new(
                c.memory_k,
                input,
                output,
                c.table.clone(),
                c.kappa,
            )?),
            None => None,
        };
        let initial = match &self.initial {
            Some(probs) => {
                let j = spec
                    .memory_m
                    .max(spec.cost.as_ref().map_or(0, |c| c.memory_k));
                let expected = state_count(j, spec.output_size)?;
                if probs.len() != expected {
                    return Err(CoreError::Domain(format!(
                        "initial distribution has {} entries, expected {expected} (J-window states)",
                        probs.len()
                    )));
                }
                Some(Simplex::new(probs.clone())?)
            }
            None => None,
        };
        Ok(Problem::Finite {
            channel,
            cost,
            initial,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_finite_document() {
        let doc = r#"{
            "schemaVersion": 1,
            "kind": "finite",
            "finite": {
                "inputSize": 2, "outputSize": 2, "memoryM": 0,
                "kernel": [[[0.9, 0.1], [0.1, 0.9]]],
                "cost": {"memoryK": 0, "table": [[0.0, 1.0]], "kappa": 0.3}
            }
        }"#;
        let doc = ChannelSpecDocument::from_json(doc).unwrap();
        match doc.build().unwrap() {
            Problem::Finite { channel, cost, .. } => {
                assert_eq!(channel.memory(), 0);
                assert!((cost.unwrap().kappa() - 0.3).abs() < 1e-15);
            }
            _ => panic!("expected finite problem"),
        }
    }

    #[test]
    fn rejects_bad_row_naming_the_cell() {
        let doc = r#"{
            "schemaVersion": 1,
            "kind": "finite",
            "finite": {
                "inputSize": 2, "outputSize": 2, "memoryM": 0,
                "kernel": [[[0.5, 0.3], [0.1, 0.9]]]
            }
        }"#;
        let err = ChannelSpecDocument::from_json(doc).unwrap().build();
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("state 0, input 0"), "{msg}");
    }

    #[test]
    fn parses_gaussian_scalar() {
        let doc = r#"{
            "schemaVersion": 1,
            "kind": "gaussianScalar",
            "gaussian": {"c": 2.0, "r": 1.0, "q": 0.0, "kV": 1.0, "kappa": 7.0}
        }"#;
        let doc = ChannelSpecDocument::from_json(doc).unwrap();
        match doc.build().unwrap() {
            Problem::GaussianScalar(p) => {
                assert_eq!(p.d, 1.0);
                assert_eq!(p.kappa, 7.0);
            }
            _ => panic!("expected scalar problem"),
        }
    }

    #[test]
    fn parses_gaussian_matrix() {
        let doc = r#"{
            "schemaVersion": 1,
            "kind": "gaussianMatrix",
            "gaussian": {
                "c": [[2.0, 0.0], [0.0, 0.5]],
                "d": [[1.0, 0.0], [0.0, 1.0]],
                "r": [[1.0, 0.0], [0.0, 1.0]],
                "q": [[0.0, 0.0], [0.0, 0.0]],
                "kV": [[1.0, 0.0], [0.0, 2.0]],
                "kappa": 13.0
            }
        }"#;
        let doc = ChannelSpecDocument::from_json(doc).unwrap();
        assert!(matches!(doc.build().unwrap(), Problem::GaussianMatrix(_)));
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let doc = r#"{"schemaVersion": 2, "kind": "finite", "finite": {"inputSize": 2, "outputSize": 2, "memoryM": 0, "kernel": [[[1.0, 0.0], [0.0, 1.0]]]}}"#;
        assert!(ChannelSpecDocument::from_json(doc).unwrap().build().is_err());
    }
}
