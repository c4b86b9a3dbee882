//! Error taxonomy for the whole crate.
//!
//! Everything fallible returns [`Result`]. The variants split along *who is
//! at fault*:
//!
//! - [`Error::Dimension`] / [`Error::Domain`] — the caller handed us
//!   arguments outside an operation's contract (mismatched `n`, invalid
//!   parameters, points on an excluded locus).
//! - [`Error::Singular`] — the input sits exactly on (or numerically
//!   indistinguishable from) a singular locus of the map being evaluated.
//! - [`Error::NoConvergence`] / [`Error::NoLimit`] / [`Error::Bracket`] —
//!   an iterative or asymptotic procedure could not certify its answer;
//!   the message carries the diagnostic the caller needs to decide what
//!   to do next.
//! - [`Error::Parse`] / [`Error::Config`] — bad text from the outside
//!   world (CLI arguments, JSON field specs, check names).

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two arguments that must live on the same group disagree about `n`.
    #[error("dimension mismatch in {op}: expected n = {expected}, got n = {got}")]
    Dimension {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    /// Arguments violate an operation's stated domain.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Evaluation requested exactly on a singular locus.
    #[error("singularity in {op}: {reason}")]
    Singular { op: &'static str, reason: String },

    /// Iteration exhausted its budget without meeting the threshold.
    #[error("{op} did not converge after {iterations} iterations (residual {residual:.3e}, threshold {threshold:.3e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
        threshold: f64,
    },

    /// Asymptotic extrapolation found no consistent limit.
    #[error("no limit in {op}: {reason}")]
    NoLimit { op: &'static str, reason: String },

    /// A bisection window failed to straddle the sought threshold.
    #[error("bracket error in {op}: {reason}")]
    Bracket { op: &'static str, reason: String },

    /// A mathematical invariant the routine is contracted to uphold
    /// failed numerically; returning a value would be worse than failing.
    #[error("invariant violated in {op}: {reason}")]
    Invariant { op: &'static str, reason: String },

    /// Malformed textual input (CLI point/field syntax, JSON specs).
    #[error("parse error in {what}: {reason}")]
    Parse { what: String, reason: String },

    /// Invalid run configuration (e.g. an unknown check name).
    #[error("configuration error: {reason}")]
    Config { reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a coordinate-bearing note to a bracket error, keeping the
    /// original reason. Used by grid sweeps to say *which* base point the
    /// window failed for.
    pub fn annotate_bracket(self, note: &str) -> Error {
        match self {
            Error::Bracket { op, reason } => Error::Bracket {
                op,
                reason: format!("{note}: {reason}"),
            },
            other => other,
        }
    }
}
