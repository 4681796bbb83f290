use std::path::PathBuf;

use crate::imex::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One problem found while reading an experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// 1-based line number, when the issue is tied to a line.
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("singular system: pivot breakdown at block {block}")]
    Singular { block: usize },

    #[error("unsupported density `{0}`")]
    UnsupportedDensity(String),

    #[error("random field is not positive at x = {x}, z = {z} (value {value})")]
    NonPositiveField { x: f64, z: f64, value: f64 },

    #[error("unknown tableau `{0}`")]
    UnknownTableau(String),

    #[error("invalid tableau: {}", join(.0))]
    InvalidTableau(Vec<Violation>),

    #[error("solution diverged in stage {stage} of the step starting at t = {t}")]
    Divergence { stage: usize, t: f64 },

    #[error("temperature fell below the floor {floor} (min {min}) at t = {t}")]
    TemperatureFloor { floor: f64, min: f64, t: f64 },

    #[error("configuration error: {}", join(.0))]
    Config(Vec<ConfigIssue>),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source}\n{context}")]
    Annotated {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI: 1 configuration, 2 solver, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Divergence { .. }
            | Error::TemperatureFloor { .. }
            | Error::Singular { .. } => 2,
            Error::Annotated { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
