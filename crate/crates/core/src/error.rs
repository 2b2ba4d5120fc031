use thiserror::Error;

use crate::link::User;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular impedance: denominator magnitude {magnitude:e} below tolerance")]
    SingularImpedance { magnitude: f64 },

    #[error("degenerate coefficients: |1 - (R {sign} T)| = {residual:e} (pure modes have no finite impedance)")]
    DegenerateCoefficients { sign: char, residual: f64 },

    #[error("distance {distance} m is below the 1 m path-loss reference distance")]
    BelowReferenceDistance { distance: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: expected {expected} elements, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("infeasible: effective gain of the {user} user is {gain:e}")]
    Infeasible { user: User, gain: f64 },

    #[error("no feasible point for the element subproblem")]
    ElementInfeasible,

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("conventional split requires an even element count, got {0}")]
    OddElementCount(usize),

    #[error("exhaustive oracle supports at most {max} elements, got {found}")]
    OracleTooLarge { max: usize, found: usize },
}
