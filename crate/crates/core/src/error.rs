use thiserror::Error;

/// Errors raised by the series, functional and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BohrError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series claimed to be in the Schur class violates a coefficient bound,
    /// or an operation requiring a certified series got an uncertified one.
    #[error("certification error: {0}")]
    Certification(String),
    /// A structural precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("search failed: {0}")]
    Search(String),
}

pub type Result<T> = std::result::Result<T, BohrError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BohrError::Domain(msg.into()))
}

pub(crate) fn check_unit_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("radius {r} must lie in [0, 1)"));
    }
    Ok(())
}
