//! Wire formats. Field order is fixed, name maps are sorted, and floats are
//! rounded to ten significant digits before encoding, so identical inputs
//! serialize byte-identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, PartialBooleanAlgebra, RawAlgebra, ValidationReport};
use crate::graph::{AtomGraph, GraphError};
use crate::quantum::{CMatrix, Projector, QuantumError, QuantumSystem};
use crate::witness::WitnessReport;

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

fn sig10(x: f64) -> f64 {
    round_sig(x, 10)
}

/// Pretty JSON with a trailing newline.
pub fn to_string_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub compat: Vec<(String, String)>,
    pub meet: Vec<(String, String, String)>,
    pub join: Vec<(String, String, String)>,
    pub neg: Vec<(String, String)>,
}

impl From<&PartialBooleanAlgebra> for AlgebraJson {
    fn from(alg: &PartialBooleanAlgebra) -> Self {
        let raw = alg.to_raw();
        AlgebraJson {
            elements: raw.elements,
            zero: raw.zero,
            one: raw.one,
            compat: raw.compat,
            meet: raw.meet,
            join: raw.join,
            neg: raw.neg,
        }
    }
}

impl AlgebraJson {
    pub fn into_algebra(&self) -> Result<PartialBooleanAlgebra, AlgebraError> {
        PartialBooleanAlgebra::from_raw(&RawAlgebra {
            elements: self.elements.clone(),
            zero: self.zero.clone(),
            one: self.one.clone(),
            compat: self.compat.clone(),
            meet: self.meet.clone(),
            join: self.join.clone(),
            neg: self.neg.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl From<&AtomGraph> for GraphJson {
    fn from(g: &AtomGraph) -> Self {
        GraphJson {
            vertices: g.labels().to_vec(),
            edges: g
                .edges()
                .into_iter()
                .map(|(i, j)| (g.label(i).to_string(), g.label(j).to_string()))
                .collect(),
        }
    }
}

impl GraphJson {
    pub fn into_graph(&self) -> Result<AtomGraph, GraphError> {
        AtomGraph::from_edges(self.vertices.clone(), &self.edges)
    }
}

/// States on algebras and on graphs share the same value-map encoding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub values: BTreeMap<String, f64>,
}

impl StateJson {
    pub fn from_values<'a, I>(named: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        StateJson {
            values: named
                .into_iter()
                .map(|(n, v)| (n.to_string(), sig10(v)))
                .collect(),
        }
    }

    pub fn to_pairs(&self) -> Vec<(String, f64)> {
        self.values.iter().map(|(n, v)| (n.clone(), *v)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightsJson {
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectorJson {
    pub name: String,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectorSetJson {
    pub dim: usize,
    pub projectors: Vec<ProjectorJson>,
}

fn matrix_to_parts(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = m.nrows();
    let mut re = vec![vec![0.0; d]; d];
    let mut im = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            re[i][j] = sig10(m[(i, j)].re);
            im[i][j] = sig10(m[(i, j)].im);
        }
    }
    (re, im)
}

pub fn matrix_from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix, QuantumError> {
    let d = re.len();
    if im.len() != d || re.iter().any(|r| r.len() != d) || im.iter().any(|r| r.len() != d) {
        return Err(QuantumError::DimensionMismatch(d, im.len()));
    }
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = num_complex::Complex64::new(re[i][j], im[i][j]);
        }
    }
    Ok(m)
}

impl From<&QuantumSystem> for ProjectorSetJson {
    fn from(sys: &QuantumSystem) -> Self {
        let projectors = sys
            .projectors
            .iter()
            .enumerate()
            .map(|(e, p)| {
                let (re, im) = matrix_to_parts(p.matrix());
                ProjectorJson {
                    name: sys.algebra.label(e).to_string(),
                    re,
                    im,
                }
            })
            .collect();
        ProjectorSetJson {
            dim: sys.dim(),
            projectors,
        }
    }
}

impl ProjectorSetJson {
    pub fn into_projectors(&self) -> Result<Vec<(String, Projector)>, QuantumError> {
        self.projectors
            .iter()
            .map(|p| {
                let m = matrix_from_parts(&p.re, &p.im)?;
                if m.nrows() != self.dim {
                    return Err(QuantumError::DimensionMismatch(self.dim, m.nrows()));
                }
                Ok((p.name.clone(), Projector::new(m)?))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReportJson {
    pub ok: bool,
    pub violations: Vec<ViolationJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationJson {
    pub axiom: String,
    pub witnesses: Vec<String>,
}

impl From<&ValidationReport> for ValidationReportJson {
    fn from(report: &ValidationReport) -> Self {
        ValidationReportJson {
            ok: report.ok(),
            violations: report
                .violations
                .iter()
                .map(|v| ViolationJson {
                    axiom: v.axiom.to_string(),
                    witnesses: v.witnesses.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReportJson {
    pub alpha: f64,
    pub alpha_set: Vec<String>,
    pub theta: f64,
    pub theta_lower: f64,
    pub theta_upper: f64,
    pub theta_gap: f64,
    pub alpha_star: f64,
    pub alpha_star_point: BTreeMap<String, f64>,
    pub gap_found: bool,
    pub gap_tolerance: f64,
    pub theta_gap_tolerance: f64,
}

impl WitnessReportJson {
    pub fn new(graph: &AtomGraph, report: &WitnessReport) -> Self {
        WitnessReportJson {
            alpha: sig10(report.alpha.value),
            alpha_set: report
                .alpha
                .set
                .iter()
                .map(|&v| graph.label(v).to_string())
                .collect(),
            theta: sig10(report.theta.value),
            theta_lower: sig10(report.theta.lower),
            theta_upper: sig10(report.theta.upper),
            theta_gap: sig10(report.theta.gap),
            alpha_star: sig10(report.alpha_star.value),
            alpha_star_point: report
                .alpha_star
                .x
                .iter()
                .enumerate()
                .map(|(v, &x)| (graph.label(v).to_string(), sig10(x)))
                .collect(),
            gap_found: report.gap_found,
            gap_tolerance: crate::witness::WITNESS_GAP_TOL,
            theta_gap_tolerance: 1e-6,
        }
    }
}
