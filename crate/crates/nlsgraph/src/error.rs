use std::path::{Path, PathBuf};

use nlsgraph_core::Error as CoreError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: no such file", .0.display())]
    NotFound(PathBuf),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    InvalidGraph(CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Assertion(String),
}

impl CliError {
    /// Stable identifier printed on the `ERROR` line.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::NotFound(_) => "IO_NOT_FOUND",
            CliError::Io { .. } => "IO_ERROR",
            CliError::Parse(_) => "PARSE_ERROR",
            CliError::InvalidGraph(_) => "INVALID_GRAPH",
            CliError::Usage(_) => "USAGE",
            CliError::Solver(_) => "SOLVER_FAILED",
            CliError::Assertion(_) => "ASSERTION_FAILED",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 2,
            CliError::Solver(_) => 3,
            _ => 4,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::NotFound(path.to_path_buf())
        } else {
            CliError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        match e {
            EmptyGraph
            | DuplicateId(_)
            | UnknownVertex(_)
            | UnknownEdge(_)
            | InvalidEdgeSpec(_)
            | DisconnectedGraph
            | InfinityDegreeViolation(_)
            | NonpositiveLength(_)
            | InfinityToInfinityEdge(_)
            | SelfLoopAtInfinity(_)
            | HalflineMismatch(_)
            | CompactGraph
            | EmptyCompactCore
            | WrongShape(_)
            | NotABubbleTower => CliError::InvalidGraph(e),
            InvalidConfig(_) | EmptyGrid | NonpositiveTruncation | LayoutMismatch(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}
