//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse surface spec `{0}`: {1}")]
    SurfaceParse(String, String),

    #[error("zero gradient encountered at {0:?}")]
    ZeroGradient(Vec<f64>),

    #[error("surface projection did not converge after {iterations} iterations (|f| = {residual:.3e})")]
    ProjectionDiverged { iterations: usize, residual: f64 },

    #[error("point is not on the surface (|f| = {0:.3e})")]
    OffSurface(f64),

    #[error("shape-operator eigenvalue along the normal is {0:.3e}, expected < {1:.1e}; tangential projection is leaking")]
    NormalEigenvalueLeak(f64, f64),

    #[error("eigensolver failed on {0}")]
    EigenFailure(String),

    #[error("finite-difference step {0:.3e} is too large for the local curvature scale {1:.3e}")]
    StepTooLarge(f64, f64),

    #[error("operator bases differ: {0} vs {1}")]
    BasisMismatch(String, String),

    #[error("margin {margin} exhausts the basis (l_max = {l_max})")]
    MarginExhaustsBasis { margin: usize, l_max: usize },

    #[error("operator `{label}` violates hermiticity: max |A - A^H| = {deviation:.3e}")]
    HermiticityViolation { label: String, deviation: f64 },

    #[error("operator `{label}` failed its sanity bound (max entry {max_entry:.3e} > {bound:.3e}); pole handling is suspect")]
    SanityBoundExceeded {
        label: String,
        max_entry: f64,
        bound: f64,
    },

    #[error("alpha-slope matrix is degenerate (norm {0:.3e})")]
    DegenerateSlope(f64),

    #[error("spectrum grouping is ambiguous: levels {0} and {1} fall in one group")]
    GroupingAmbiguity(usize, usize),

    #[error("surface sampling failed: {0}")]
    SamplingFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
