use std::fmt;

use fincast_core::agents::{AgentError, BackendError};
use fincast_core::arima::ArimaError;
use fincast_core::ingest::IngestError;
use fincast_core::lstm::LstmError;
use fincast_core::metrics::MetricsError;
use fincast_core::plot::PlotError;
use fincast_core::preprocess::PreprocessError;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_SINGULAR: u8 = 3;
pub const EXIT_INSUFFICIENT: u8 = 4;
pub const EXIT_MODEL_FORMAT: u8 = 5;
pub const EXIT_BACKEND: u8 = 6;

/// A command failure carrying its process exit code and a one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn io(what: &str, path: &std::path::Path, err: std::io::Error) -> Self {
        Self::new(EXIT_FAILURE, format!("{what} {}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CmdResult<T> = Result<T, Failure>;

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Self::new(EXIT_DATA, e.to_string())
    }
}

impl From<PreprocessError> for Failure {
    fn from(e: PreprocessError) -> Self {
        let code = match e {
            PreprocessError::InsufficientData(_) => EXIT_INSUFFICIENT,
            _ => EXIT_DATA,
        };
        Self::new(code, e.to_string())
    }
}

impl From<ArimaError> for Failure {
    fn from(e: ArimaError) -> Self {
        let code = match e {
            ArimaError::SingularDesign { .. } => EXIT_SINGULAR,
            _ => EXIT_DATA,
        };
        Self::new(code, e.to_string())
    }
}

impl From<LstmError> for Failure {
    fn from(e: LstmError) -> Self {
        let code = match e {
            LstmError::FormatVersion(_) | LstmError::Checksum(_) | LstmError::Format(_) => EXIT_MODEL_FORMAT,
            LstmError::InsufficientData(_) => EXIT_INSUFFICIENT,
            LstmError::Io(_) => EXIT_DATA,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        Self::new(EXIT_DATA, format!("cannot score predictions: {e}"))
    }
}

impl From<PlotError> for Failure {
    fn from(e: PlotError) -> Self {
        Self::new(EXIT_FAILURE, format!("cannot draw chart: {e}"))
    }
}

impl From<BackendError> for Failure {
    fn from(e: BackendError) -> Self {
        Self::new(EXIT_BACKEND, e.to_string())
    }
}

impl From<AgentError> for Failure {
    fn from(e: AgentError) -> Self {
        let code = match e {
            AgentError::Backend { .. } => EXIT_BACKEND,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e.to_string())
    }
}
