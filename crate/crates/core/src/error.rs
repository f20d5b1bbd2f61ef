use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: m = {m} exceeds the permutation-sum limit {limit}")]
    Size { m: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("step size {dt} exceeds the stability limit {limit}")]
    Stability { dt: f64, limit: f64 },

    #[error("CFL violation: courant number {courant} > 1 (dt = {dt}, dx = {dx})")]
    Cfl { courant: f64, dt: f64, dx: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown config key `{key}`{}", suggestion.as_ref().map(|s| format!(", did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey {
        key: String,
        suggestion: Option<String>,
    },

    #[error("no metrics matched the filter; available metrics: {}", available.join(", "))]
    EmptySelection { available: Vec<String> },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
