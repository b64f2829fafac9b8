//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building graphs, decorating them with
/// vertex spaces, assembling operators or solving metric problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),

    #[error("edge {edge} has non-positive length {length}")]
    NonPositiveLength { edge: usize, length: f64 },

    #[error("vertex `{0}` is isolated (degree 0)")]
    IsolatedVertex(String),

    #[error("graph has a self-loop at edge {0}, which this operation does not allow")]
    SelfLoopPresent(usize),

    #[error("graph has multiple edges between `{0}` and `{1}`, which this operation does not allow")]
    MultiEdgePresent(String, String),

    #[error("edge {0} is isolated (both endpoints have degree 1)")]
    IsolatedEdge(usize),

    #[error("unknown edge id {0}")]
    UnknownEdge(usize),

    #[error("invalid projection at vertex `{vertex}`: {reason}")]
    BadProjection { vertex: String, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vertex space is not continuous at vertex `{vertex}`: {reason}")]
    NotContinuous { vertex: String, reason: String },

    #[error(
        "rank decision is ambiguous: singular value {value:.3e} lies in the gray zone around cutoff {cutoff:.3e}"
    )]
    RankAmbiguous { value: f64, cutoff: f64 },

    #[error("supersymmetry violated: unmatched eigenvalue pair ({0:?}, {1:?})")]
    SpectraMismatch(Option<f64>, Option<f64>),

    #[error("dual kernel isomorphism failed: {0}")]
    IsoFailed(String),

    #[error("graph is not {0}-regular as required")]
    NotRegular(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{relation} failed: {detail}")]
    RelationFailed { relation: String, detail: String },

    #[error("kernel map is not bijective onto the discrete kernel: {0}")]
    PhiNotBijective(String),

    #[error("invalid metric problem: {0}")]
    BadProblem(String),

    #[error("secular grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("problem file error: {0}")]
    SchemaError(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
