use thiserror::Error;

#[derive(Debug, Error)]
pub enum TapError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("flow state has {found} edge entries but the network has {expected} edges")]
    FlowShape { expected: usize, found: usize },

    #[error("flow exceeds capacity on edge {edge}: {used} > {capacity}")]
    OverCapacity { edge: usize, used: u32, capacity: u32 },

    #[error("infeasible at stage {stage}: agent `{agent}` has no path with spare capacity")]
    Infeasible { stage: usize, agent: String },

    #[error("agent `{0}` has an empty reaction set")]
    EmptyReactionSet(String),

    #[error("destination of agent `{0}` is unreachable")]
    Unreachable(String),

    #[error("no feasible joint assignment exists")]
    NoFeasibleAssignment,

    #[error("search budget of {0} nodes exhausted before any feasible assignment was found")]
    BudgetExhausted(u64),

    #[error("exact expectation needs {orderings} distinct orderings (limit {limit}); use monte-carlo mode")]
    TooManyOrderings { orderings: u128, limit: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TapError> = std::result::Result<T, E>;
