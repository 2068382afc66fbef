use thiserror::Error;

/// Crate-wide error type. Parse errors carry a source position; cap errors
/// signal that a construction outgrew its configured bound.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("malformed model: {0}")]
    Model(String),

    #[error("unsafe net: firing {action} at {{{marking}}} double-marks a place")]
    UnsafeNet { marking: String, action: String },

    #[error("state explosion: more than {0} states/configurations")]
    StateExplosion(usize),

    #[error("cap exceeded ({0}): input is likely not regular")]
    CapExceeded(usize),

    #[error("not a run: {0}")]
    NotARun(String),

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("open formula: no valuation entry for {0}")]
    OpenFormula(String),

    #[error("formula is not in the plain-modality mu-calculus fragment")]
    NotLmuFragment,

    #[error("system is not acyclic; use bounded mode")]
    NotAcyclic,

    #[error("system is not a Xi system: {0}")]
    NotXi(String),

    #[error("illegal move at {position}: {input}")]
    IllegalMove { position: String, input: String },

    #[error("CCS fragment violation: {0}")]
    FragmentViolation(String),

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }

    /// Process exit code for the CLI: 64 usage, 65 bad data, 70 internal cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 64,
            Error::StateExplosion(_) | Error::CapExceeded(_) => 70,
            _ => 65,
        }
    }
}
