use thiserror::Error;

/// Failure modes of the engine.
///
/// `TheoremViolation` is raised when a computed object disagrees with a structural
/// statement the engine relies on, for example an orbit without a rook-form member. This
/// does happen for `B_3` and `D_3`.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration budget exceeded: {what} needs {required} elements, budget is {budget}")]
    Budget {
        what: String,
        required: u128,
        budget: u128,
    },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
