use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The lattice operations only exist for the angle `arctan(1/sqrt(M))`.
    #[error("unsupported angle {theta} rad for M={m}: lattice structure requires arctan(1/sqrt(M))")]
    UnsupportedAngle { m: u32, theta: f64 },
    /// Both fading gains of a symbol are (numerically) zero.
    #[error("degenerate channel: no usable fading gain")]
    DegenerateChannel,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("parity-check matrix is not encodable: {0}")]
    UnsupportedMatrix(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
