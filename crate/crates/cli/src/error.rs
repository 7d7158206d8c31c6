use std::fmt;
use std::path::Path;

/// Failure of a CLI run, carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_IO: u8 = 3;
pub const EXIT_PARSE: u8 = 4;
pub const EXIT_CONTRACT: u8 = 5;
pub const EXIT_REFUSED: u8 = 6;
pub const EXIT_DATA: u8 = 7;

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn contract(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONTRACT, message: message.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {err}", path.display()) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<heralded::Error> for CliError {
    fn from(e: heralded::Error) -> Self {
        use heralded::Error::*;
        let code = match &e {
            Parse(_) => EXIT_PARSE,
            Dimension(_) | Contract(_) => EXIT_CONTRACT,
            Refused(_) => EXIT_REFUSED,
            Data(_) => EXIT_DATA,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
