use std::path::PathBuf;

use fullersim_core::Error as CoreError;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

/// Process exit status for each error family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Config = 2,
    UnsupportedSize = 3,
    NonConvergence = 4,
    Consistency = 5,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: stale manifold cache (graph digest {found}, expected {expected})", path.display())]
    StaleCache { path: PathBuf, found: String, expected: String },
    #[error("{}: corrupt manifold cache: {message}", path.display())]
    CorruptCache { path: PathBuf, message: String },
    #[error("{module}: {source}")]
    Core { module: &'static str, source: CoreError },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Config(_) | AppError::Io { .. } | AppError::Parse { .. } => ExitCode::Config,
            AppError::StaleCache { .. } | AppError::CorruptCache { .. } => ExitCode::Consistency,
            AppError::Core { source, .. } => match source {
                CoreError::UnsupportedSize { .. } => ExitCode::UnsupportedSize,
                CoreError::NonConvergence { .. } | CoreError::NormDrift { .. } => ExitCode::NonConvergence,
                CoreError::ManifoldIncomplete { .. }
                | CoreError::DegenerateGroundState { .. }
                | CoreError::ConfigMismatch { .. } => ExitCode::Consistency,
                _ => ExitCode::Config,
            },
        }
    }
}

/// Attaches the module name to a core error.
pub trait Context<T> {
    fn during(self, module: &'static str) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, CoreError> {
    fn during(self, module: &'static str) -> Result<T> {
        self.map_err(|source| AppError::Core { module, source })
    }
}
