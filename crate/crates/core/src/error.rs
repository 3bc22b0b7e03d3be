use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("Gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("integral diverges: {0}")]
    Divergence(String),
}

impl Error {
    /// Machine-readable tag used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Pole { .. } => "pole",
            Error::NonConvergence(_) => "non_convergence",
            Error::Divergence(_) => "divergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
