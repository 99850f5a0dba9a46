use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no straggler margin: n = {n} must exceed k_A * k_B = {product}")]
    NoStragglerMargin { n: u64, product: u64 },

    #[error("degenerate relaxation: x = {x} must lie in [0, {max}]")]
    DegenerateRelaxation { x: u64, max: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot split {cols} columns into {blocks} equal blocks (use padding)")]
    Indivisible { cols: usize, blocks: usize },

    #[error("rank-deficient system: rank {rank} of {required} required ({context})")]
    RankDeficient {
        rank: usize,
        required: usize,
        context: String,
    },

    #[error("worker {0} has already finished all of its tasks")]
    WorkerFinished(usize),

    #[error("too few survivors: {got} available, {needed} required")]
    TooFewSurvivors { got: usize, needed: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("missing block product for worker {worker} at location {location}")]
    MissingProduct { worker: usize, location: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid speed {speed} for worker {worker}")]
    InvalidSpeed { worker: usize, speed: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
