use thiserror::Error;

/// Engine errors. Warnings (such as a negative ord-integrand) are reported
/// alongside results rather than raised.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("class is not pseudoeffective: {0}")]
    NotPseudoeffective(String),
    #[error("input family is not nef: {0}")]
    NotNefInput(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("discontinuous volume: {0}")]
    DiscontinuousVolume(String),
    #[error("Okounkov body has zero area")]
    ZeroArea,
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
