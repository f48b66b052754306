use thiserror::Error;

/// Errors raised by the flux models, envelope kernel and Riemann solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiemannError {
    /// An argument lies outside the admissible state box.
    #[error("domain error: {0}")]
    Domain(String),

    /// Envelope ranges do not overlap, so no minimum-jump crossing exists.
    #[error("no envelope crossing: {0}")]
    Infeasible(String),

    /// A solver-internal assertion failed (speed ordering, singleton trace set, ...).
    #[error("solver assertion failed: {0}")]
    Assertion(String),

    /// The rarefaction integrator ran into the resonance locus.
    #[error("resonance encountered: {0}")]
    Resonance(String),

    /// The flux does not have the shape the construction assumes.
    #[error("flux shape not supported: {0}")]
    Shape(String),

    /// Bad numerical parameters (CFL, grid sizes, tolerances).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Lagrangian coordinates are undefined on vacuum.
    #[error("degenerate coordinate: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, RiemannError>;
