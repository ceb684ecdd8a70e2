use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The result would not be representable (overflow).
    #[error("range error in {op}: |x| = {value} exceeds threshold {threshold}")]
    Range {
        op: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("quadrature did not converge: estimate {value}, error estimate {error_estimate} after {subdivisions} subdivisions")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("optimization failed: {0}")]
    Optimization(String),

    /// The fit diverged; the best model seen and its report are attached.
    #[error("optimization diverged: {message}")]
    Divergence {
        message: String,
        best: Box<(crate::shells::ShellModel, crate::decomp::FitReport)>,
    },

    #[error("unknown name `{0}`")]
    Lookup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}

pub(crate) fn check_finite(op: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("non-finite input {x}")))
    }
}
