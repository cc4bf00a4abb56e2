use thiserror::Error;

/// Errors raised by the simulation engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff {cutoff} too small for amplitude {amplitude}: tail mass {tail:e} exceeds tolerance")]
    CutoffTooSmall { amplitude: f64, cutoff: usize, tail: f64 },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("state would need {requested} amplitudes, budget is {limit}")]
    ResourceLimit { requested: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mode {mode} out of range for a {modes}-mode state")]
    InvalidMode { mode: usize, modes: usize },

    #[error("outcome has zero probability")]
    ZeroProbability,

    #[error("parameter outside its domain: {0}")]
    Domain(String),

    #[error("simulation consistency violated: {0}")]
    Consistency(String),

    #[error("amplitude mismatch: qubit at {qubit}, resource at {resource}")]
    AmplitudeMismatch { qubit: f64, resource: f64 },

    #[error("no success after {attempts} attempts")]
    Starvation { attempts: u64 },

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
