use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("slit-base singularity at w = {w}: radicand vanishes")]
    SlitBase { w: Complex64 },

    #[error("event {index}: {source}")]
    AtEvent {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("inversion pole: whole-plane map vanishes at 1/w")]
    InversionPole,

    #[error("pole at ξ = w·w̄ = {xi}")]
    Pole { xi: Complex64 },

    #[error("truncation curve has a pole at M = {m}, γ = {gamma}")]
    TruncationPole { m: usize, gamma: f64 },

    #[error("zero pivot C00 at (i, j) = ({i}, {j})")]
    ZeroPivot { i: i64, j: i64 },

    #[error("{rejected} of {total} paths rejected at slit-base singularities (limit 1%)")]
    RejectionOverflow { rejected: usize, total: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit residual {residual:.3e} exceeds {limit:.1e}")]
    FitResidual { residual: f64, limit: f64 },

    #[error("no real eigenvalue with a reflection-symmetric eigenvector")]
    NoSymmetricMode,

    #[error("indeterminate series data: B_n + C_n - 2k = 0 at n = {n}, k = {k}")]
    Indeterminate { n: usize, k: usize },

    #[error("(M={m}, γ={gamma}, κ={kappa}) is off the truncation curve: A_-M = {residual:e}")]
    OffCurve {
        m: usize,
        gamma: f64,
        kappa: f64,
        residual: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::Parse { .. }
            | Error::TruncationPole { .. }
            | Error::Io(_) => false,
            Error::AtEvent { source, .. } => source.is_numerical(),
            _ => true,
        }
    }
}
