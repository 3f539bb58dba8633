use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A request exceeds a configured memory or size cap.
    #[error("{what} = {requested} exceeds the cap of {cap}")]
    Capacity {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// An index or cutoff lies outside the range a table or sieve covers.
    #[error("{what} = {value} is outside the supported range 1..={limit}")]
    Range {
        what: &'static str,
        value: f64,
        limit: u64,
    },

    /// A parameter is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A prime-power rule produced a non-finite value.
    #[error("rule `{label}` is not finite at p = {p}, nu = {nu}")]
    Evaluation { label: String, p: u64, nu: u32 },

    /// An infinite series or integral failed to converge.
    #[error("divergence: {0}")]
    Divergent(String),

    /// An error function failed a numeric membership check.
    #[error("membership check failed: {0}")]
    Membership(String),

    #[error("table limits differ: {left} vs {right}")]
    LimitMismatch { left: u64, right: u64 },

    #[error("rule `{0}` carries no hypothesis metadata")]
    MissingHypothesis(String),

    /// A value that must be real has a non-negligible imaginary part.
    #[error("expected a real value, got imaginary part {imag:e} at p = {p}, nu = {nu}")]
    NotReal { p: u64, nu: u32, imag: f64 },
}

impl Error {
    pub(crate) fn range(what: &'static str, value: f64, limit: u64) -> Self {
        Error::Range { what, value, limit }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::Range { .. }
            | Error::Domain(_)
            | Error::LimitMismatch { .. }
            | Error::MissingHypothesis(_) => 2,
            Error::Evaluation { .. }
            | Error::Divergent(_)
            | Error::Membership(_)
            | Error::NotReal { .. } => 4,
        }
    }
}
