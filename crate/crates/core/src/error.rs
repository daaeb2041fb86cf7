use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between parsing a curve and printing a report.
///
/// Each variant maps to a stable machine-readable code (see [`Error::code`])
/// that the CLI embeds in its JSON error output.
#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is singular (discriminant is zero)")]
    SingularCurve,

    #[error("model is not minimal at p = {p}")]
    NotMinimalAtP { p: u64 },

    #[error("could not completely factor {value} (cofactor {cofactor} exceeds the supported range)")]
    FactorizationIncomplete { value: String, cofactor: String },

    #[error("p = {p} is a prime of bad reduction")]
    BadReductionPrime { p: u64 },

    #[error("no local coefficient supplied for prime {p}")]
    MissingPrime { p: u64 },

    #[error("adaptive quadrature failed to converge: {detail}")]
    QuadratureNonConvergence { detail: String },

    #[error(
        "functional-equation sign is ambiguous: discrepancy {plus:.3e} for +1, {minus:.3e} for -1 (threshold {threshold:.3e})"
    )]
    AmbiguousSign {
        plus: f64,
        minus: f64,
        threshold: f64,
    },

    #[error("analytic rank not resolved: all derivatives up to order {max_order} are below threshold")]
    RankNotResolved { max_order: usize },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable error code for machine consumption.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularCurve => "singular-curve",
            Error::NotMinimalAtP { .. } => "not-minimal",
            Error::FactorizationIncomplete { .. } => "factorization-incomplete",
            Error::BadReductionPrime { .. } => "bad-reduction-prime",
            Error::MissingPrime { .. } => "missing-prime",
            Error::QuadratureNonConvergence { .. } => "quadrature-non-convergence",
            Error::AmbiguousSign { .. } => "ambiguous-sign",
            Error::RankNotResolved { .. } => "rank-not-resolved",
            Error::InvalidRequest(_) => "invalid-request",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
        }
    }
}
