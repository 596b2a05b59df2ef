use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for a {n_sites}-site space")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown local-state label `{0}`")]
    UnknownLabel(String),

    #[error("local dimensions are not all equal")]
    HeterogeneousDims,

    #[error("operator is zero")]
    ZeroOperator,

    #[error("dense dimension {dim} exceeds the cap {cap} (set DYNSYNC_DENSE_CAP to override)")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("spectral decomposition lacks left modes for the asymptotic subspace")]
    MissingLeftModes,

    #[error("input is not a valid density matrix: {0}")]
    NotAState(String),

    #[error("positivity violated at t = {t}: minimum eigenvalue {min_eig:e}")]
    Positivity { t: f64, min_eig: f64 },

    #[error("trace drifted at t = {t}: |Tr rho - 1| = {deviation:e}")]
    TraceDrift { t: f64, deviation: f64 },

    #[error("trajectory norm underflow at t = {t}")]
    NormUnderflow { t: f64 },

    #[error("eigenvalue tracking ambiguous for mode {mode} at delta = {delta}")]
    TrackingAmbiguity { mode: usize, delta: f64 },

    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error("fewer than two turning points in series `{0}`")]
    TooFewTurningPoints(String),

    #[error("fit requires strictly positive data")]
    NonPositiveData,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration rejected: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
