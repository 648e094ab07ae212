use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("k = {k} out of range 1..={d}")]
    KOutOfRange { k: usize, d: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("not a density matrix: {0}")]
    NotState(String),
    #[error("vector is not unit norm (|v| = {0})")]
    NotUnit(f64),
    #[error("invalid index set: {0}")]
    InvalidIndices(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("normalization failure: <y, e> = {0}, expected 1")]
    Normalization(f64),
    #[error("membership oracle left {0} samples undecided; hit-or-miss ratio is undefined")]
    Undecided(usize),
    #[error("unsupported body: {0}")]
    UnsupportedBody(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        Err(Error::KOutOfRange { k, d })
    } else {
        Ok(())
    }
}
