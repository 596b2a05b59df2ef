//! Numerical thresholds shared across the crate.

/// Default cap on the dimension of any superoperator that is densified
/// (i.e. `d²` for a Hilbert space of dimension `d`).
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Environment variable that overrides [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "DYNSYNC_DENSE_CAP";

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// General absolute tolerance for equality checks.
    pub atol: f64,
    /// Hermiticity threshold used when choosing a Hermitian code path.
    pub hermitian: f64,
    /// Relative threshold (times the spectral radius) below which a
    /// Liouvillian eigenvalue's real part counts as zero.
    pub zero_eig_rel: f64,
    /// Products with Frobenius norm below this are treated as vanishing.
    pub vanishing_norm: f64,
    /// Allowed drift of `Tr ρ` during dense evolution.
    pub trace_drift: f64,
    /// Most negative eigenvalue tolerated in an evolved state.
    pub positivity: f64,
    /// Relative tolerance of the matrix exponential.
    pub expm: f64,
    pub dense_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            atol: 1e-10,
            hermitian: 1e-12,
            zero_eig_rel: 1e-8,
            vanishing_norm: 1e-12,
            trace_drift: 1e-9,
            positivity: 1e-7,
            expm: 1e-12,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl Tolerances {
    /// Defaults with `dense_cap` taken from `DYNSYNC_DENSE_CAP` when set.
    pub fn from_env() -> Self {
        Tolerances { dense_cap: dense_cap_from_env(), ..Tolerances::default() }
    }
}

pub fn dense_cap_from_env() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}
