use thiserror::Error;

/// Exit statuses of the `cba33` binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const DEGENERATE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input; the message carries line/key context.
    #[error("{0}")]
    Input(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: cba33::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => exit::INPUT_ERROR,
            CliError::Core { source, .. } => {
                if source.is_numerical_degeneracy() {
                    exit::DEGENERATE
                } else if matches!(source, cba33::Error::ConstraintsNotSatisfied { .. }) {
                    exit::CHECK_FAILED
                } else {
                    exit::INPUT_ERROR
                }
            }
        }
    }

    /// Short machine-readable kind for reports.
    pub fn kind(&self) -> String {
        match self {
            CliError::Input(_) => "input".into(),
            CliError::Core { source, .. } => {
                let dbg = format!("{source:?}");
                let end = dbg.find([' ', '(', '{']).unwrap_or(dbg.len());
                dbg[..end].to_string()
            }
        }
    }
}

/// Attach context to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for cba33::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}
