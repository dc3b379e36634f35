use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
///
/// Each variant names the operation that rejected its input so that CLI
/// messages can point at the offending argument without extra context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: out of supported range: {detail}")]
    Range { op: &'static str, detail: String },

    #[error("{op}: invalid argument: {detail}")]
    Argument { op: &'static str, detail: String },

    #[error("{op}: numerical failure: {detail}")]
    Numeric { op: &'static str, detail: String },

    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("{op}: outside the closed-form regime: {detail}")]
    Regime { op: &'static str, detail: String },

    #[error("{op}: unsupported order {order} (maximum is {max})")]
    UnsupportedOrder { op: &'static str, order: u32, max: u32 },

    #[error("{op}: degenerate configuration: {detail}")]
    Degenerate { op: &'static str, detail: String },

    #[error("{op}: unstable measurement (dispersion {dispersion:.3} > {limit}); rerun with a larger budget")]
    Unstable { op: &'static str, dispersion: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { op, detail: detail.into() }
}

pub(crate) fn range(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Range { op, detail: detail.into() }
}

pub(crate) fn argument(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Argument { op, detail: detail.into() }
}

pub(crate) fn numeric(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Numeric { op, detail: detail.into() }
}
