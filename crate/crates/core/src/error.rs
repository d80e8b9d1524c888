use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} out of range: expected {expected}, got {got}")]
    OutOfRange {
        what: &'static str,
        expected: &'static str,
        got: String,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("duplicate prime {0} in factor list")]
    DuplicatePrime(u64),
    #[error("empty input")]
    Empty,
    #[error("decimal rendering did not stabilise after {0} extra terms")]
    Unstable(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    expected: &'static str,
    got: impl ToString,
) -> Error {
    Error::OutOfRange {
        what,
        expected,
        got: got.to_string(),
    }
}
