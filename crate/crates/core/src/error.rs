use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature order {0} outside 1..=200")]
    QuadratureOrder(usize),

    #[error("operator has zero trace")]
    ZeroTrace,

    #[error("closed-form correlation inconsistent: {0}")]
    FormulaInconsistency(String),

    #[error("Fock truncation inadequate: {0}")]
    Truncation(String),

    #[error("quadrature did not converge: order {order} vs {doubled} differ by {delta:.3e}")]
    QuadratureNonConvergence {
        order: usize,
        doubled: usize,
        delta: f64,
    },

    #[error("coherent label magnitude {0:.3e} exceeds the cap")]
    LabelCap(f64),

    #[error("config error: {0}")]
    Config(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
