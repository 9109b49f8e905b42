use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter sits on a pole of the series or makes an integral diverge.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point outside the convergence region: {0}")]
    Region(String),
    #[error("point on a singular locus: {0}")]
    Singular(String),
    /// The caller broke a stated precondition (chart mismatch, constraint not met, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("step size underflow during transport at s = {0}")]
    StepUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Contract(msg()))
    }
}
