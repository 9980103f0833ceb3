use thiserror::Error;

/// Errors shared across the solver, detection, and CLI layers.
#[derive(Error, Debug)]
pub enum Error {
    /// Structurally invalid input (wrong shape, asymmetric matrix, NaN entries).
    #[error("structural error: {0}")]
    Structure(String),

    /// A matrix required to be (numerically) full rank is not.
    #[error("singular matrix in {context}: condition estimate {cond:.3e}")]
    Singular { context: String, cond: f64 },

    /// Not enough residual degrees of freedom (n <= p).
    #[error("degrees-of-freedom error: n = {n}, p = {p}")]
    DegreesOfFreedom { n: usize, p: usize },

    /// Correlation requested for a zero-variance column.
    #[error("undefined correlation: zero-variance input")]
    ZeroVariance,

    /// Argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration parameter.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Internal logic violation (e.g. empty support handed to cut emission).
    #[error("logic error: {0}")]
    Logic(String),

    /// A lazy callback returned constraints the incumbent already satisfies.
    #[error("lazy-constraint protocol violation: {0}")]
    Protocol(String),

    /// Solve budget exhausted before any incumbent was found.
    #[error("budget exhausted with no incumbent")]
    Budget,

    /// The constraint set admits no selection pattern.
    #[error("model infeasible: {0}")]
    Infeasible(String),

    /// CSV / input-file problems, with row and column context when known.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 parse, 3 numeric, 4 budget, 5 infeasible.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::Singular { .. }
            | Error::DegreesOfFreedom { .. }
            | Error::ZeroVariance
            | Error::Domain(_)
            | Error::Structure(_) => 3,
            Error::Budget => 4,
            Error::Infeasible(_) => 5,
            _ => 1,
        }
    }
}
