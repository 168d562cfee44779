use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("elements live in different field towers")]
    TowerMismatch,

    #[error("precision exhausted after {rounds} refinement rounds while {context}")]
    PrecisionExhausted { rounds: usize, context: String },

    #[error("polynomial is not square-free: the root V = 0 has multiplicity {0}")]
    NotSquareFree(usize),

    #[error("iteration guard tripped: {used} Newton polygon steps exceed the bound {bound}")]
    IterationGuard { used: usize, bound: usize },

    #[error("ambiguous branch match: {0}")]
    Ambiguity(String),

    #[error("no branch center matches the limit interval [{lo}, {hi}]")]
    EmptyMatch { lo: f64, hi: f64 },

    #[error("invalid SDO instance: {0}")]
    InvalidInstance(String),

    #[error("no strictly feasible starting point found: {0}")]
    Infeasible(String),

    #[error("Newton iteration did not converge at mu = {mu:e} (residual {residual:e})")]
    NoConvergence { mu: f64, residual: f64 },

    #[error("not enough samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("coordinate {0} is constant along the path")]
    ConstantCoordinate(usize),

    #[error("elimination blow-up: {0}")]
    EliminationBlowUp(String),

    #[error("eliminated polynomial does not vanish along the trace (relative residual {0:e})")]
    ExtraneousVanishing(f64),

    #[error("coordinate {index}: {source}")]
    Coordinate { index: usize, source: Box<Error> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by malformed user input, as opposed to failed computations.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Degenerate(_)
            | Error::InvalidInstance(_)
            | Error::Io(_) => true,
            Error::Coordinate { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
