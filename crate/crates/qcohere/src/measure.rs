use serde::{Deserialize, Serialize};

use crate::qcore::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Witness {
    /// Closest free state.
    State(ComplexMatrix),
    /// Optimal measurement or reference basis, as a unitary with the vectors in its columns.
    Basis(ComplexMatrix),
    /// Optimal measurement direction(s) as (θ, φ) angles.
    Angles(Vec<f64>),
    /// Optimizer coordinates (simplex weights, scale factors).
    Point(Vec<f64>),
}

/// Value of a quantifier with provenance of how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub value: f64,
    pub method: Method,
    pub tol: f64,
    pub witness: Option<Witness>,
}

impl MeasureResult {
    pub fn analytic(value: f64) -> Self {
        MeasureResult { value, method: Method::Analytic, tol: 1e-10, witness: None }
    }

    pub fn numeric(value: f64, tol: f64) -> Self {
        MeasureResult { value, method: Method::Numeric, tol, witness: None }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}
