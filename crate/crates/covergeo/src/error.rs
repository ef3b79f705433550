use std::fmt;
use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug)]
pub enum Error {
    Core(covergeo_core::Error),
    Io { path: PathBuf, source: io::Error },
    /// A file did not parse as the expected format.
    Format { path: PathBuf, reason: String },
    /// Bad shape specification, flag or config value.
    Config(String),
    /// An experiment ran but its empirical check failed.
    CheckFailed(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }

    /// Process exit status: 2 when a hypothesis of a covering result
    /// failed, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_hypothesis() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Core(e) if e.is_hypothesis() => write!(f, "hypothesis violated: {e}"),
            Error::Core(e) => write!(f, "{e}"),
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Format { path, reason } => write!(f, "{}: {reason}", path.display()),
            Error::Config(msg) => f.write_str(msg),
            Error::CheckFailed(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Core(e) => Some(e),
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<covergeo_core::Error> for Error {
    fn from(e: covergeo_core::Error) -> Self {
        Error::Core(e)
    }
}
