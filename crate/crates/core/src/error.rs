use std::path::PathBuf;

/// Errors raised by frame construction, coherence measures, solvers and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("{kind} frames require a power-of-two length per axis, got {len}")]
    NonDyadic { kind: &'static str, len: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("shape {rows}x{cols} does not match {len} values")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("signal contains non-finite values")]
    NonFinite,
    #[error("frames have different ambient dimensions ({first} vs {second})")]
    AmbientMismatch { first: usize, second: usize },
    #[error("atom {index} has norm {norm}, coherence requires normalized atoms")]
    Unnormalized { index: usize, norm: f64 },
    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("duplicate index {0} in cluster")]
    DuplicateIndex(usize),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("frame is not Parseval (defect {defect:.3e})")]
    NotParseval { defect: f64 },
    #[error("problem exceeds the exhaustive regime: {0}")]
    RegimeExceeded(String),
    #[error("complex-valued input where a real matrix is required")]
    ComplexInput,
    #[error("no representation with at most {k_max} atoms")]
    NotFound { k_max: usize },
    #[error("dictionary too large to densify ({entries} entries)")]
    TooLarge { entries: usize },
    #[error("linear algebra failure: {0}")]
    Numerical(String),
    #[error("parse error in {}: {msg}", path.display())]
    Parse { path: PathBuf, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
