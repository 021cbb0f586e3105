use fullgroup_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    /// `1` for violated preconditions, `2` for malformed input, `3` for
    /// failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) => match e {
                Error::Malformed(_)
                | Error::BaseMismatch { .. }
                | Error::BackendMismatch { .. }
                | Error::OverlappingPieces { .. }
                | Error::NotTotal { .. }
                | Error::UnresolvedName(_) => 2,
                Error::Postcondition(_) => 3,
                _ => 1,
            },
            HarnessError::Io(_) | HarnessError::Json(_) | HarnessError::Config(_) | HarnessError::UnknownSuite(_) => 2,
            HarnessError::Verification(_) => 3,
        }
    }
}
