use thiserror::Error;

/// Errors raised by the library. One enum keeps the `?` plumbing simple
/// across modules that call each other.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {index} out of range for a graph on {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(usize, usize),
    #[error("input of size {size} exceeds the configured limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("sequence is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("ordering width {width} exceeds the certified optimum {optimum}")]
    NotOptimal { width: usize, optimum: usize },
    #[error("boundary arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("bucket index {index} outside 1..={ell}")]
    BadBucketIndex { index: usize, ell: usize },
    #[error("bad index {0}")]
    BadIndex(usize),
    #[error("bucketing is not monotone along the ordering")]
    NotMonotone,
    #[error("ordering of width {width} does not match the declared width {declared}")]
    WidthMismatch { width: usize, declared: usize },
    #[error("ordering does not cover the reduced vertex set")]
    TraceMismatch,
    #[error("members {0} and {1} are immersion-comparable")]
    NotAntichain(usize, usize),
    #[error("expected {expected} members, got {got}")]
    MemberCount { expected: usize, got: usize },
    #[error("dynamic program exceeded the state limit of {0}")]
    StateLimit(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: loop edge at vertex {vertex}")]
    ParseLoop { line: usize, vertex: usize },
    #[error("catalog: {0}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
