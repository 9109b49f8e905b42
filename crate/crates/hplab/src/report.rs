//! Check records shared by the verification batteries and the CLI.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` means the check could not be evaluated (serialized as null).
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual <= tolerance;
        Check { name: name.into(), residual: residual.is_finite().then_some(residual), tolerance, pass, error: None }
    }

    /// A residual that must exceed `threshold` (negative controls).
    pub fn above(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let pass = residual.is_infinite() || residual > threshold;
        Check { name: name.into(), residual: residual.is_finite().then_some(residual), tolerance: threshold, pass, error: None }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, err: impl ToString) -> Self {
        Check { name: name.into(), residual: None, tolerance, pass: false, error: Some(err.to_string()) }
    }

    /// Wraps a fallible residual computation.
    pub fn from_result(name: impl Into<String>, r: crate::Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(v) => Check::new(name, v, tolerance),
            Err(e) => Check::failed(name, tolerance, e),
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
