use std::path::PathBuf;

use nswiener_core::WienerError;

/// Process exit codes. The numbering is a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Ok = 0,
    VerificationFailed = 1,
    Parse = 2,
    Dimension = 3,
    Positivity = 4,
    Stabilization = 5,
    Domain = 6,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid {flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error(transparent)]
    Wiener(#[from] WienerError),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Parse { .. } | CliError::Read { .. } | CliError::Flag { .. } => Exit::Parse,
            // Nothing more specific fits an unwritable output path.
            CliError::Write { .. } => Exit::Domain,
            CliError::Wiener(e) => match e {
                WienerError::InvalidBlockSize
                | WienerError::InvalidWindow { .. }
                | WienerError::DiagonalLength { .. }
                | WienerError::NonFinite { .. } => Exit::Parse,
                WienerError::BlockSizeMismatch { .. }
                | WienerError::DimensionMismatch { .. }
                | WienerError::WindowTooSmall { .. } => Exit::Dimension,
                WienerError::NotPositiveDefinite { .. }
                | WienerError::NotUniformlyPositive { .. } => Exit::Positivity,
                WienerError::StabilizationFailure { .. } => Exit::Stabilization,
                WienerError::NotSelfAdjoint { .. }
                | WienerError::NotUpperTriangular { .. }
                | WienerError::OutsideDisk { .. }
                | WienerError::BilateralOffCircle { .. }
                | WienerError::OutOfRange { .. }
                | WienerError::NotHermitian { .. }
                | WienerError::SingularBlock { .. } => Exit::Domain,
            },
        }
    }
}
