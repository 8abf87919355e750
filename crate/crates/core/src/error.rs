use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("argument {index} = {value} lies outside the domain {domain}")]
    Domain {
        index: usize,
        value: f64,
        domain: String,
    },

    #[error("expected {expected} arguments, got {found}")]
    Shape { expected: usize, found: usize },

    /// `row` and `position` are reported 1-based.
    #[error("alpha row {row}, position {position}: index {value} is outside 1..={p}")]
    IndexOutOfRange {
        row: usize,
        position: usize,
        value: i64,
        p: usize,
    },

    #[error("alpha row {row} has length {found} but mean {row} has arity {expected}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("all means must share one interval; mean {index} is defined on {found}")]
    MismatchedDomains { index: usize, found: String },

    #[error("vertex {vertex} has no in-neighbors; the tri-state step is undefined there")]
    NoInNeighbors { vertex: usize },

    #[error("graph is not ergodic; no uniform walk length exists")]
    NotErgodic,

    #[error("boolean powers did not become all-ones within the cap {cap}")]
    WalkLengthCap { cap: usize },

    #[error("census limited to {max} vertices, got {n}")]
    TooManyVertices { n: usize, max: usize },

    #[error("mapping is not certified uniformly weak contractive: {0}")]
    NotCertified(String),

    #[error("iteration did not converge after {iterations} steps (oscillation {oscillation})")]
    NotConverged { iterations: usize, oscillation: f64 },
}
