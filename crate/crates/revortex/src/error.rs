use thiserror::Error;

/// Errors produced by the revortex library.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad caller-supplied data (malformed samples, out-of-range parameters).
    #[error("input error: {0}")]
    Input(String),
    /// A point or configuration lies outside the mathematical domain of an
    /// operation (pole in the plane chart, coincident vortices, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver failed to converge or its bracket is invalid.
    #[error("solver error: {0}")]
    Solver(String),
    /// The point-vortex flow left the admissible region (collision, pole).
    #[error("dynamics error: {0}")]
    Dynamics(String),
    /// Vortex detection could not produce a well-defined answer.
    #[error("detection error: {0}")]
    Detection(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable code used on the CLI diagnostics stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Input(_) => "E_INPUT",
            Error::Domain(_) => "E_DOMAIN",
            Error::Solver(_) => "E_SOLVER",
            Error::Dynamics(_) => "E_DYNAMICS",
            Error::Detection(_) => "E_DETECTION",
            Error::Io(_) => "E_IO",
        }
    }

    /// CLI exit status: 2 for validation problems, 3 for solver failures.
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Domain(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
