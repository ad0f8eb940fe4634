use thiserror::Error;

pub type Result<T, E = FlgError> = std::result::Result<T, E>;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("node {node} out of range (node count {count})")]
    NodeOutOfRange { node: usize, count: usize },

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("digraph has no arcs")]
    EmptyArcSet,

    #[error("graph contains the triangle {0:?}")]
    Triangle([usize; 3]),

    #[error("invalid certificate: {0}")]
    BadCertificate(String),

    #[error("not a chordless cycle: {0}")]
    NotChordlessCycle(String),

    #[error("no partition of the cycle preimage satisfies the cycle lemma")]
    NoCyclePartition,

    #[error("component {component:?} has {cycles} independent cycles")]
    TooManyCycles { component: Vec<usize>, cycles: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),

    #[error("search budget exhausted after {0} steps")]
    BudgetExhausted(u64),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("assignment leaves clause {0} unsatisfied")]
    Unsatisfied(usize),

    #[error("clause {0} repeats a variable")]
    RepeatedVariable(usize),

    #[error("graph is not cubic (node {0} has degree {1})")]
    NotCubic(usize, usize),

    #[error("graph has the bridge {0}-{1}")]
    Bridge(usize, usize),
}

impl FlgError {
    /// The same error with node indices shifted to the 1-based numbering of
    /// the text formats.
    pub fn one_based(self) -> Self {
        use FlgError::*;
        match self {
            SelfLoop(v) => SelfLoop(v + 1),
            NodeOutOfRange { node, count } => NodeOutOfRange { node: node + 1, count },
            DuplicateEdge(u, v) => DuplicateEdge(u + 1, v + 1),
            Triangle(t) => Triangle(t.map(|v| v + 1)),
            TooManyCycles { component, cycles } => TooManyCycles {
                component: component.into_iter().map(|v| v + 1).collect(),
                cycles,
            },
            NotCubic(v, d) => NotCubic(v + 1, d),
            Bridge(u, v) => Bridge(u + 1, v + 1),
            other => other,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        FlgError::Parse {
            line,
            msg: msg.into(),
        }
    }
}
