use thiserror::Error;

/// Failure modes shared across the crate.
///
/// The variants separate caller mistakes (`Dimension`, `Contract`), resource
/// guards (`Refused`), impossible data (`Data`) and input decoding (`Parse`),
/// so front ends can map each onto a distinct exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
