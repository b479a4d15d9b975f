use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("invalid variety descriptor: {0}")]
    InvalidSpec(String),

    #[error("fan construction failed: {0}")]
    ConstructionFailed(String),

    #[error("fan is not complete: {0}")]
    NotComplete(String),

    #[error("fan is not smooth: maximal cone {cone} has determinant {det}")]
    NotSmooth { cone: usize, det: String },

    #[error("Picard group has torsion (invariant factor {factor})")]
    TorsionDetected { factor: String },

    #[error("local data disagree on ray {ray}: {first} vs {second}")]
    InconsistentGluing { ray: usize, first: String, second: String },

    #[error("wall basis is degenerate: {0}")]
    BasisDegenerate(String),

    #[error("cohomology search box did not converge (radius {radius} exceeds ceiling {ceiling})")]
    BoxNotConverged { radius: i64, ceiling: i64 },

    #[error("bundle {index} is not exceptional")]
    NotExceptionalMember { index: usize },

    #[error("bundles {first} and {second} are linearly equivalent")]
    DuplicateBundle { first: usize, second: usize },

    #[error("factor collection {factor} is not strongly exceptional")]
    FactorNotStronglyExceptional { factor: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
