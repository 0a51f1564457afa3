use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain where the quantity is defined.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Inconsistent shapes, too few nodes, coincident nuclei and similar.
    #[error("structural error: {0}")]
    Structural(String),

    /// A density that violates one of the conditions of the functional's domain.
    #[error("density rejected, violated condition `{condition}`: {detail}")]
    InvalidDensity { condition: &'static str, detail: String },

    #[error("solver `{solver}` failed: {msg}")]
    Solver { solver: &'static str, msg: String },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn solver(solver: &'static str, msg: impl Into<String>) -> Self {
        Error::Solver { solver, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
