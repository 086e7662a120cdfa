//! Serializable report documents. Complex numbers are written as `[re, im]`.

use std::collections::BTreeMap;

use grovertails_core::scattering::KirchhoffReport;
use grovertails_core::{CMatrix, CVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Mode, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cx(pub [f64; 2]);

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx([z.re, z.im])
    }
}

pub fn cx_vec<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> Vec<Cx> {
    values.into_iter().map(|&z| z.into()).collect()
}

pub fn cx_column(v: &CVector) -> Vec<Cx> {
    cx_vec(v.iter())
}

/// Row-major nested rows.
pub fn cx_rows(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub graph: String,
    pub mode: Mode,
    pub tails: Vec<usize>,
    pub inflow: Vec<Cx>,
    pub z: Cx,
    pub steps: Option<usize>,
    pub tol: f64,
    pub truncation: usize,
    pub seed: u64,
}

impl ConfigEcho {
    pub fn new(cfg: &RunConfig) -> Self {
        ConfigEcho {
            graph: cfg.graph_path.display().to_string(),
            mode: cfg.mode,
            tails: cfg.tails.clone(),
            inflow: cx_vec(&cfg.inflow_or_default()),
            z: cfg.z.into(),
            steps: cfg.steps,
            tol: cfg.tol,
            truncation: cfg.truncation,
            seed: cfg.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub arcs: usize,
    pub cyclomatic_number: usize,
    pub boundary: Vec<usize>,
    pub tilde_degrees: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedCheck {
    pub tail_length: usize,
    pub steps: usize,
    pub max_deviation: f64,
    pub max_norm_defect: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveReport {
    pub max_steps: usize,
    pub steps_taken: usize,
    pub converged: bool,
    pub tol: f64,
    pub final_residual: Option<f64>,
    /// `z^n ψ_n` at the last step.
    pub limit: Vec<Cx>,
    /// Sup distance between the limit and the linear solve (z = 1 only).
    pub distance_to_solve: Option<f64>,
    pub truncated: TruncatedCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenEntry {
    pub value: Cx,
    pub modulus: f64,
    pub class: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterEntry {
    pub eigenvalue: Cx,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterCheck {
    pub center_dim: usize,
    pub basis_dim: usize,
    pub c_plus_dim: usize,
    pub c_minus_dim: usize,
    pub t_per_dim: usize,
    pub max_principal_sine: f64,
    pub eigenvalues_match: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub epsilon: f64,
    pub spectral_radius: f64,
    pub stable_radius: f64,
    pub eigenvalues: Vec<EigenEntry>,
    pub center: Vec<CenterEntry>,
    pub sigma_per: Vec<f64>,
    pub center_check: Option<CenterCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub passed: bool,
    pub magnitude: f64,
    pub tolerance: f64,
}

pub fn check_map(report: &KirchhoffReport) -> BTreeMap<String, CheckEntry> {
    report
        .checks
        .iter()
        .map(|c| {
            (
                c.name.to_string(),
                CheckEntry {
                    passed: c.passed,
                    magnitude: c.magnitude,
                    tolerance: c.tolerance,
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringReport {
    pub tails: Vec<usize>,
    pub alpha: Vec<Cx>,
    pub beta: Vec<Cx>,
    pub c: Cx,
    pub t_star: Option<Cx>,
    pub r_star: Option<Cx>,
    pub transmission_rate: Option<f64>,
    pub reflection_rate: Option<f64>,
    pub kappa: Vec<Cx>,
    pub internal_mass: f64,
    /// `|E0| / 2`, the lower bound on the internal mass for two tails with
    /// unit inflow on the first.
    pub bound: f64,
    pub psi: Vec<Cx>,
    pub residual: f64,
    pub center_leak: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scattering_matrix: Option<Vec<Vec<Cx>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<BTreeMap<String, CheckEntry>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub stage: &'static str,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub graph: GraphSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scattering: Option<ScatteringReport>,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_serializes_as_pair() {
        let json = serde_json::to_string(&Cx::from(Complex64::new(0.5, -1.0))).unwrap();
        assert_eq!(json, "[0.5,-1.0]");
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i * 2 + j) as f64, 0.0));
        assert_eq!(
            serde_json::to_string(&cx_rows(&m)).unwrap(),
            "[[[0.0,0.0],[1.0,0.0]],[[2.0,0.0],[3.0,0.0]]]"
        );
    }
}
