use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {re}+{im}i is not on the unit circle (|z| = {modulus})")]
    OffCircle { re: f64, im: f64, modulus: f64 },

    #[error("point {re}+{im}i lies outside the closed unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("Blaschke zero {re}+{im}i does not lie in the open unit disc")]
    ZeroOutsideDisc { re: f64, im: f64 },

    #[error("matrix is not an orthogonal projection (residual {residual:e})")]
    NotProjection { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("symbol is not analytic: coefficient at z^{index} is nonzero")]
    NotAnalytic { index: i64 },

    #[error("repeated Blaschke zero {re}+{im}i; only simple zeros are supported")]
    RepeatedZero { re: f64, im: f64 },

    #[error("truncation of {blocks} blocks is smaller than the required {required}")]
    TruncationTooSmall { blocks: usize, required: usize },

    #[error("multiplier is not in E(Phi): {0}")]
    NotInEPhi(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("window instability: {0}")]
    WindowUnstable(String),

    #[error("invalid operator word {0:?}")]
    InvalidWord(String),

    #[error("unknown identifier {0:?}")]
    UnknownId(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
