use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agent {agent} is outside 1..={n}")]
    AgentOutOfRange { agent: usize, n: usize },

    #[error("population must contain at least one agent")]
    EmptyPopulation,

    #[error("not a partition of 1..={n}: {reason}")]
    InvalidPartition { n: usize, reason: String },

    #[error("gadget pair ({0}, {0}) must name two distinct agents")]
    SelfPair(usize),

    #[error("duplicate factor ({0}, {1})")]
    DuplicateFactor(usize, usize),

    #[error("population size mismatch: expected {expected}, found {found}")]
    PopulationMismatch { expected: usize, found: usize },

    #[error("degree limit {d} must be even with 2 <= d <= {n}")]
    InvalidDegree { d: usize, n: usize },

    #[error("max coalition size {c} must satisfy 1 <= c <= {n}")]
    InvalidCoalitionCap { c: usize, n: usize },

    #[error("missing parameter `{0}` for this family")]
    MissingParameter(&'static str),

    #[error("invalid congestion game: {0}")]
    InvalidCongestionGame(String),

    #[error("invalid auction: {0}")]
    InvalidAuction(String),

    #[error("block {block:?} has {profiles} joint profiles, over the cap of {cap}")]
    BruteForceCapExceeded {
        block: Vec<usize>,
        profiles: u128,
        cap: u128,
    },

    #[error("observations are inconsistent with any coalition structure: {0}")]
    InconsistentObservations(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("unknown adversary policy `{0}`")]
    UnknownPolicy(String),

    #[error("invalid truth model `{0}`")]
    InvalidTruthModel(String),

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("verification failed: {reason}\n{run}")]
    VerificationFailed { reason: String, run: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
