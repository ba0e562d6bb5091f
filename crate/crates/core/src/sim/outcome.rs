use std::fmt;

use serde::{Deserialize, Serialize};

/// Why a script failed to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    /// Nothing could be extracted from the text.
    ParseEmpty,
    ParseError,
    DanglingReference,
    NoPathToSink,
    MissingRequiredParam,
    DeadlockDetected,
    RuntimeError,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Result of importing and running one script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason")]
pub enum ExecOutcome {
    Success,
    Failure(FailureReason),
}

impl ExecOutcome {
    pub fn is_success(self) -> bool {
        self == ExecOutcome::Success
    }
}

impl fmt::Display for ExecOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecOutcome::Success => f.write_str("Success"),
            ExecOutcome::Failure(r) => write!(f, "Failure({r})"),
        }
    }
}
