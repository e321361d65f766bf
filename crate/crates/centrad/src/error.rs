use thiserror::Error;

/// Errors produced by dataset construction, metrics, optimizers and model I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("labels contain a single class: {0}")]
    SingleClass(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("csv error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv read error: {0}")]
    CsvFile(#[from] csv::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used by the CLI for exit codes
    /// and error reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "argument",
            Error::DimensionMismatch(_) | Error::SingleClass(_) | Error::InvalidData(_) => "data",
            Error::Csv { .. } | Error::CsvFile(_) => "csv",
            Error::Io(_) => "io",
            Error::Json(_) => "serialization",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories_are_stable() {
        assert_eq!(Error::InvalidArgument("x".into()).category(), "argument");
        assert_eq!(Error::SingleClass("y".into()).category(), "data");
        assert_eq!(
            Error::Csv {
                row: 3,
                message: "bad".into()
            }
            .category(),
            "csv"
        );
    }
}
