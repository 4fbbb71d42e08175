use thiserror::Error;

/// Everything that can go wrong inside the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular or nearly so (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("index {index} out of range for dimension {bound}")]
    Index { index: usize, bound: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("hafnian of a {dim}x{dim} matrix exceeds the configured cap of {cap}")]
    HafnianCap { dim: usize, cap: usize },

    #[error("invalid Gaussian state: {0}")]
    InvalidState(String),

    #[error("probability has imaginary residue {imag:e}")]
    ImaginaryResidue { imag: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("distribution mass {mass} is outside [1 - {tol:e}, 1 + {tol:e}]")]
    Normalization { mass: f64, tol: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Resource caps are reported separately from input errors (CLI exit code 3).
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::HafnianCap { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
