//! Exit-code mapping: 0 ok, 2 usage error, 3 data error, 4 clustering error.

use sessionlift_core::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_CLUSTERING: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        let code = match &error {
            Error::Parameter(_) | Error::Clustering(_) => EXIT_CLUSTERING,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: error.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        CliError::data(error.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
