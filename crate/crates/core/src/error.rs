use std::path::PathBuf;

/// Errors produced by sketch construction, updates and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ell must be even (got {0})")]
    OddEll(usize),

    #[error("ell must be at least {min} (got {ell})")]
    EllTooSmall { ell: usize, min: usize },

    #[error("ell exceeds min(mx,my): ell={ell}, limit={limit}")]
    EllTooLarge { ell: usize, limit: usize },

    #[error("dimension `{0}` must be positive")]
    ZeroDimension(&'static str),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("sketch configurations differ: {0}")]
    ConfigMismatch(String),

    #[error("shrink requires a full buffer (fill {fill} < ell {ell})")]
    BufferNotFull { fill: usize, ell: usize },

    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(f64),

    #[error("sketch length mode `{0}` requires matrix statistics")]
    MissingStats(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Errors raised by the on-disk stream and snapshot formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("unsupported dtype tag {0:#04x}")]
    UnsupportedDtype(u8),

    #[error("unsupported snapshot version {found} (expected {expected})")]
    Version { found: u8, expected: u8 },

    #[error("corrupt data at byte offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
