use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("positivity failure: min u = {0:e}")]
    PositivityFailure(f64),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    /// True for violations of modelling hypotheses, as opposed to numerical failures.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::HypothesisViolated(_)
                | Error::AssumptionViolated(_)
                | Error::OutOfRange(_)
                | Error::UnsupportedProfile(_)
                | Error::DegenerateProfile(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
