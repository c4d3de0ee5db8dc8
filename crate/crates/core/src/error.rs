use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported field Q(sqrt({0})): only Q and the norm-Euclidean class-number-one quadratic fields are handled")]
    UnsupportedField(i64),
    #[error("field has unit rank zero")]
    NoUnits,
    #[error("gamma has a pole at the non-positive integer {0}")]
    PoleAtNonPositiveInteger(i64),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("frequency vector vanishes at some place")]
    ZeroFrequency,
    #[error("zeta function has a pole at s = 1")]
    PoleAtOne,
    #[error("completed zeta function has a pole at s = 0 or s = 1")]
    PoleAtZeroOrOne,
    #[error("scattering factor has a pole at this s")]
    ScatteringPole,
    #[error("lattice basis matrix is singular")]
    SingularBasisMatrix,
    #[error("iteration did not converge: {0}")]
    NotConvergent(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("quadrature budget of {0} nodes exceeded")]
    QuadratureBudgetExceeded(usize),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
