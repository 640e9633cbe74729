use thiserror::Error;

/// Errors produced anywhere in the certification pipeline.
///
/// Site and generator indices carried by variants are 1-based, matching the
/// textual and file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("{path}:{line}:{column}: {message}")]
    ParseFile { path: String, line: usize, column: usize, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generators {0} and {1} do not commute")]
    NotAbelian(usize, usize),

    #[error("the generated group contains -1")]
    MinusIdentity,

    #[error("generator {0} is not Hermitian")]
    InvalidPhase(usize),

    #[error("capacity exceeded: {what} is {got}, cap is {cap}")]
    Capacity { what: String, cap: u64, got: u64 },

    #[error("matrix is singular over GF(2)")]
    SingularMatrix,

    #[error("subspace is not genuinely multipartite entangled: bipartition {bipartition:?} has commuting restrictions{}", pair.map(|(a, b)| format!(" (no witness for pair ({a}, {b}))")).unwrap_or_default())]
    NotGme { bipartition: Vec<usize>, pair: Option<(usize, usize)> },

    #[error("no two-site witness exists for pair ({a}, {b}) although the group is GME")]
    NoWitness { a: usize, b: usize },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("outcome has zero probability")]
    ZeroProbability,

    #[error("forced outcome {forced} contradicts deterministic outcome {actual}")]
    Contradiction { forced: u8, actual: u8 },

    #[error("certificate failure for pair ({a}, {b}): {detail}")]
    CertificateFailure { a: usize, b: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, cap: u64, got: u64) -> Self {
        Error::Capacity { what: what.into(), cap, got }
    }
}
