//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WignerError>;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Requested derivative order exceeds what the wavelet family supports.
    #[error(
        "unsupported derivative order {order} for Daubechies-{wavelet_order}: \
         {hint}"
    )]
    UnsupportedOrder {
        order: usize,
        wavelet_order: usize,
        hint: String,
    },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("numerical blowup at t = {time:.6}")]
    NumericalBlowup { time: f64 },

    #[error("conservation violated at t = {time:.6}: {detail}")]
    ConservationViolation { time: f64, detail: String },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Config validation reports every problem found, not just the first.
    #[error("config error(s):\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl WignerError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        WignerError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 0 success, 2 config, 3 blowup,
    /// 4 conservation, 5 non-convergence, 10 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            WignerError::Config(_) => 2,
            WignerError::InvalidArgument(_)
            | WignerError::UnsupportedOrder { .. }
            | WignerError::DomainTooSmall(_) => 2,
            WignerError::NumericalBlowup { .. } => 3,
            WignerError::ConservationViolation { .. } => 4,
            WignerError::NonConvergence(_) => 5,
            WignerError::InsufficientData(_) => 5,
            WignerError::Io { .. } => 10,
        }
    }
}
