//! Crate-wide error type.

/// Errors shared across the algebra modules.
///
/// Variants are deliberately coarse: callers either propagate them to the CLI
/// or treat them as check failures; no recovery logic branches on payloads.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Exact division failed in the coefficient ring or in a twisted Laurent ring.
    #[error("not divisible: {0}")]
    NotDivisible(String),

    /// An operation requiring a PBW presentation was invoked on one that fails the criterion.
    #[error("presentation is not PBW: {0}")]
    NonPBW(String),

    /// The set of commutation parameters is not of the form {t, t^-1}.
    #[error("not a single-parameter presentation: {0}")]
    NotSingleParameter(String),

    /// The generator graph is not connected.
    #[error("generator graph is not connected")]
    NotConnected,

    /// A generator-graph vertex has degree above 2, so the graph is neither a path nor a cycle.
    #[error("generator graph has a vertex of degree > 2")]
    DegreeExceeded,

    /// Relation tables fail a structural consistency check during classification.
    #[error("relation tables do not match the expected shape: {0}")]
    RelationMismatch(String),

    /// A seed mutation was attempted on a pair failing the compatibility assertion.
    #[error("incompatible seed: {0}")]
    IncompatibleSeed(String),

    /// A presentation does not become commutative when v is specialized to 1.
    #[error("presentation is not commutative at q=1: {0}")]
    NotCommutativeAtOne(String),

    /// Malformed input outside the specific cases above.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Expression or file parsing failed; offset is a byte position into the source.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
