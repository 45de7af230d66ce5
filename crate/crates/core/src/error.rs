use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    // graph construction
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` must carry exactly one of a length or the halfline marker")]
    InvalidEdgeSpec(String),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("vertex at infinity `{0}` must have degree exactly 1")]
    InfinityDegreeViolation(String),
    #[error("edge `{0}` has a nonpositive or non-finite length")]
    NonpositiveLength(String),
    #[error("edge `{0}` joins two vertices at infinity")]
    InfinityToInfinityEdge(String),
    #[error("edge `{0}` is a self-loop at a vertex at infinity")]
    SelfLoopAtInfinity(String),
    #[error("edge `{0}` must be a halfline exactly when one endpoint is at infinity")]
    HalflineMismatch(String),
    #[error("truncation length must be positive")]
    NonpositiveTruncation,
    #[error("graph has no finite edges")]
    EmptyCompactCore,
    #[error("{edges} edges exceed the brute-force cap of {cap}")]
    TooLargeForBruteForce { edges: usize, cap: usize },
    #[error("graph has no halflines")]
    CompactGraph,

    // closed forms
    #[error("exponent {0} outside the admissible range")]
    ExponentOutOfRange(f64),
    #[error("scale must be positive")]
    NonpositiveScale,
    #[error("mass must be positive")]
    NonpositiveMass,

    // function space
    #[error("rule is discontinuous at vertex `{vertex}` (mismatch {mismatch:e})")]
    DiscontinuousRule { vertex: String, mismatch: f64 },
    #[error("function has zero mass")]
    ZeroMass,
    #[error("function takes negative values")]
    NegativeValues,
    #[error("function is constant")]
    ConstantFunction,
    #[error("sample layout does not match the mesh: {0}")]
    LayoutMismatch(String),

    // minimization
    #[error("initial guess has zero mass")]
    ZeroInitialMass,
    #[error("no run of the gradient flow converged")]
    NoConvergedRun,
    #[error("objective has the same sign at both ends of the bracket")]
    NoSignChange,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    // surgery and critical case
    #[error("cut width must be positive")]
    NonpositiveWidth,
    #[error("graph is not a bubble tower")]
    NotABubbleTower,
    #[error("graph does not have the expected shape: {0}")]
    WrongShape(String),
    #[error("mass exceeds the critical mass of the line")]
    MassTooLarge,
}
