//! Command errors carrying their process exit code.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or inconsistent input.
    Input(String),
    /// The screen has no focusable component to anchor a flow on.
    Unredrawable,
    /// Some batch entries failed; the rest were processed.
    PartialFailure(usize),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    /// Annotates an error with the file it came from.
    pub fn at(path: &Path, err: impl fmt::Display) -> CliError {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Unredrawable => 3,
            CliError::PartialFailure(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Unredrawable => {
                write!(f, "cannot redraw: no component is capable of receiving focus")
            }
            CliError::PartialFailure(n) => write!(f, "{n} screen(s) failed, see aggregate table"),
        }
    }
}

impl From<rgnf_core::Error> for CliError {
    fn from(err: rgnf_core::Error) -> CliError {
        match err {
            rgnf_core::Error::NothingFocusable => CliError::Unredrawable,
            other => CliError::Input(other.to_string()),
        }
    }
}
