//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by frame construction and the solver pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),
    #[error("unknown edge id {0}")]
    UnknownEdge(u32),
    #[error("duplicate id {0}")]
    DuplicateId(u32),
    #[error("edge {id}: endpoints coincide (length {len} below tolerance)")]
    DegenerateEdge { id: u32, len: f64 },
    #[error("edge {id}: j hint is parallel to the edge axis")]
    DegenerateHint { id: u32 },
    #[error("rotation axis has near-zero norm {0}")]
    ZeroAxis(f64),
    #[error("eigenvalue parameter must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("edge argument mu*l = {arg} exceeds the overflow budget {max}")]
    ArgumentOverflow { arg: f64, max: f64 },
    #[error("root refinement did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("lambda = {lambda} is not an eigenvalue at tolerance (nullity 0)")]
    NotAnEigenvalue { lambda: f64 },
    #[error("coordinate {x} outside edge range [0, {len}]")]
    OutOfRange { x: f64, len: f64 },
    #[error("field lacks the smoothness required by the differential operator")]
    NotOperatorSmooth,
    #[error("matrix factorization failed: {0}")]
    Factorization(&'static str),
    #[error("symmetry element {name}: {reason}")]
    BadSymmetry { name: String, reason: String },
    #[error("irrep {label}: {reason}")]
    BadIrrep { label: String, reason: String },
    #[error("frame is not planar: {0}")]
    NotPlanar(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<V> = std::result::Result<V, Error>;
