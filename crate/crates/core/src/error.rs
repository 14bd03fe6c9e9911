//! Error types shared across the solver.

use thiserror::Error;

/// A single violated invariant, reported with the path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Complete list of invariant violations found by problem validation.
#[derive(Debug, Clone, Error)]
#[error("invalid problem specification ({} violation(s))", .violations.len())]
pub struct ValidationErrors {
    pub violations: Vec<Violation>,
}

impl ValidationErrors {
    pub fn describe(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Errors raised by transforms and field algebra.
#[derive(Debug, Clone, Error)]
pub enum FieldError {
    #[error("grid incompatible with basis: {0}")]
    ShapeMismatch(String),
    #[error("operation requires matching bases/truncations: {0}")]
    BasisMismatch(String),
}

/// Errors raised by the linear and nonlinear solvers.
#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Validation(#[from] ValidationErrors),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(
        "resonant mode: |sigma({m}, {n:?})| = {abs_sigma} below tolerance (vanishing dissipation)"
    )]
    Resonance {
        m: i64,
        n: Vec<usize>,
        abs_sigma: f64,
    },
    #[error("right-hand side has steady content; steady part must be solved separately")]
    SteadyContent,
    #[error("Neumann data incompatible: residual of the solvability integral = {residual}")]
    IncompatibleData { residual: f64 },
    #[error("inhomogeneous boundary data is only supported on 1-D intervals")]
    UnsupportedBoundary,
    #[error("boundary-condition kind does not match the requested solver")]
    WrongBcKind,
    #[error("pointwise |1 + 2 k w| reached {min_abs}: outside the small-solution regime")]
    OutOfRegime { min_abs: f64 },
    #[error(
        "period map not contracted to tolerance within {periods} periods (last diff {last_diff})"
    )]
    AttractorNotFound { periods: usize, last_diff: f64 },
}
