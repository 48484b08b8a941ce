use thiserror::Error;

pub type LabResult<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl LabError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => 2,
            LabError::Io(_) => 3,
            LabError::Numerical(_) => 4,
        }
    }
}

impl From<dirtomo_core::Error> for LabError {
    fn from(e: dirtomo_core::Error) -> Self {
        use dirtomo_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::Json(_) => LabError::Config(e.to_string()),
            E::DegenerateInput(_) => LabError::Numerical(e.to_string()),
            E::Io(_) | E::Csv(_) => LabError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
