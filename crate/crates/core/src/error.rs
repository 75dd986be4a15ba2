use thiserror::Error;

/// Errors raised by graph validation and the algorithms built on it.
///
/// Paths and edges are reported by their display form so that messages stay
/// meaningful without access to the graph they came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be at least 1")]
    InvalidRank,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("edge `{edge}` has color {color}, outside 1..={rank}")]
    UnknownColor { edge: String, color: usize, rank: usize },
    #[error("no square covers the composable pair `{first}` then `{second}`")]
    MissingSquare { first: String, second: String },
    #[error("the pair `{first}` then `{second}` is covered by more than one square")]
    NonBijectiveSquare { first: String, second: String },
    #[error("square [{}] is inconsistent: {reason}", .square.join(", "))]
    IncompatibleEndpoints { square: Vec<String>, reason: String },
    #[error("triple {} sorts to different paths depending on swap order", .edges.join("."))]
    HexagonViolation { edges: Vec<String> },

    #[error("cannot compose `{left}` with `{right}`: source and range differ")]
    NotComposable { left: String, right: String },
    #[error("degree window {lo}..{hi} is not inside 0..{degree}")]
    DegreeOutOfRange { lo: String, hi: String, degree: String },
    #[error("{0} requires an acyclic graph")]
    CyclicGraphUnsupported(&'static str),
    #[error("path family members do not share the range `{0}`")]
    RangeMismatch(String),
    #[error("malformed path `{0}`")]
    MalformedPath(String),

    #[error("closure did not stabilise within {0} steps")]
    ClosureBudgetExceeded(usize),
    #[error("enumeration of {what} exceeds the budget of {budget}")]
    BudgetExceeded { what: String, budget: usize },
    #[error("universe at vertex `{vertex}` has {candidates} candidate paths; at most {limit} supported")]
    UniverseTooLarge { vertex: String, candidates: usize, limit: usize },
    #[error("satiation fixpoint not reached within {0} rounds")]
    FixpointBudgetExceeded(usize),
    #[error("{0} requires an exact universe (acyclic graph, full window)")]
    InexactUniverse(&'static str),

    #[error("position function is defined on positive integers only")]
    DomainError,
    #[error("no separating degree up to d(x) for `{lambda}` and `{mu}`")]
    NoSeparation { lambda: String, mu: String },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("family has no matrix for `{0}`")]
    IncompleteFamily(String),
    #[error("pair (`{0}`, `{1}`) is not in the matrix-unit grid")]
    PairNotInGrid(String, String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
