use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: key `{key}`: {message}")]
    Key {
        line: usize,
        key: String,
        message: String,
    },

    /// A value outside the domain of its parameter. `line` is 0 when the
    /// value did not come from a document line.
    #[error("{}`{key}` out of domain: {message}", line_prefix(*.line))]
    Domain {
        line: usize,
        key: String,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] wma_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_prefix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

impl Error {
    /// Process exit status: 2 for usage, document and out-of-domain input
    /// problems, 1 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(wma_core::Error::Domain(_)) => 2,
            Error::Io(_) | Error::Core(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
