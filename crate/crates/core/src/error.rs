use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure: {reason} (best bound {best_bound:e})")]
    NumericalFailure { reason: String, best_bound: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("point is not a vertex of the polytope (distance {distance:e})")]
    NotAVertex { distance: f64 },

    #[error("fan precondition violated: {0}")]
    FanPrecondition(String),

    #[error("singular linear system (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("cones {0} and {1} are not adjacent")]
    NonAdjacent(usize, usize),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("admissibility violated at time index {time_index}")]
    Admissibility { time_index: usize },

    #[error("enumeration guard exceeded: {count} > {limit}")]
    GuardExceeded { count: f64, limit: f64 },

    #[error("invalid tree: {0}")]
    InvalidTree(String),
}
