use std::path::PathBuf;

use thiserror::Error;

use crate::si::InfectionTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is not in a graph of {node_count} nodes")]
    UnknownNode { node: usize, node_count: usize },

    #[error("edge-space vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("spread reached {infected} of {target} infected nodes within {max_steps} steps")]
    Underfilled {
        infected: usize,
        target: usize,
        max_steps: usize,
        trace: Box<InfectionTrace>,
    },

    #[error("cannot trim snapshot to {target} nodes: {before_last} nodes were infected before the last step")]
    InfeasibleTrim { target: usize, before_last: usize },

    #[error("message entry {value} at edge {edge}, step {step} is outside [0, 1] beyond round-off")]
    OutOfRange { edge: usize, step: usize, value: f64 },

    #[error("perturbation denominator vanishes for candidate {0:?}")]
    DegenerateCandidate(Vec<usize>),

    #[error("snapshot has no ground-truth sources")]
    MissingGroundTruth,

    #[error("source sets differ in size: {truth} true vs {identified} identified")]
    SizeMismatch { truth: usize, identified: usize },

    #[error("{context}: {source}")]
    Io {
        context: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("instance {instance}: exhausted {retries} resampling attempts ({last})")]
    RetriesExhausted {
        instance: usize,
        retries: usize,
        last: String,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            context: path.into(),
            source,
        }
    }

    /// Data problems versus broken invariants; the CLI maps these to exit codes.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_) | Error::OutOfRange { .. })
    }
}
