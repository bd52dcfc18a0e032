use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("vertex `{0}` is not on the path")]
    VertexNotOnPath(String),
    #[error("subpath end precedes its start")]
    OrderViolation,
    #[error("path ends at `{left}` but the next path starts at `{right}`")]
    EndpointMismatch { left: String, right: String },
    #[error("edge `{0}` would appear twice in one path")]
    EdgeRepetition(String),
    #[error("no path from `{from}` to `{to}`")]
    NoPath { from: String, to: String },
    #[error("invalid path system: {0}")]
    InvalidSystem(String),
    #[error("edge `{0}` is not a merging of the two paths")]
    NotAMerge(String),
    #[error("auxiliary graph degree invariant broken: {0}")]
    DegreeViolation(String),
    #[error("auxiliary graph has a cycle; no regular decomposition exists")]
    AuxCyclic,
    #[error("witness shortening hit a self-reachable subpath")]
    PreconditionUnverified,
    #[error("input graph is cyclic; rerouting is only defined for acyclic graphs")]
    CyclicInput,
    #[error("plan was built for different path systems")]
    StalePlan,
    #[error("rerouting result rejected: {0}")]
    ValidationFailure(String),
    #[error("path systems do not share a single source")]
    SourceMismatch,
    #[error("cut values must be positive, got {0}")]
    InvalidCut(i64),
    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("no part instance for cuts {0:?}")]
    PartUnavailable(Vec<u32>),
    #[error("search finished without a verified candidate")]
    SearchExhausted,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}
