use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimacs line {line}: {msg}")]
    Dimacs { line: usize, msg: String },

    #[error("formula is unsatisfiable, backbone is undefined")]
    Unsatisfiable,

    #[error("fit error: {0}")]
    Fit(String),

    #[error("search tree does not match formula: {0}")]
    TreeMismatch(String),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn dimacs(line: usize, msg: impl Into<String>) -> Self {
        Error::Dimacs { line, msg: msg.into() }
    }
}
