use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus must have degree at least 1")]
    DegreeZero,
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus is not squarefree")]
    NotSquarefree,
    #[error("modulus has the rational root {0}")]
    Reducible(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// A violated invariant of a polarized datum, named after the invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("g must be at least 1 (the space V has dimension 2g)")]
    ZeroDimension,
    #[error("phi must be {expected}x{expected}, got {rows}x{cols}")]
    PhiShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("phi is not alternating")]
    PhiNotAlternating,
    #[error("phi is not invertible")]
    PhiNotInvertible,
    #[error("E_basis is empty")]
    EmptyEBasis,
    #[error("E_basis[{0}] has the wrong shape")]
    EShape(usize),
    #[error("identity is not in span(E_basis)")]
    IdentityNotInESpan,
    #[error("span(E_basis) is not closed under product (E[{0}] * E[{1}])")]
    ENotClosed(usize, usize),
    #[error("span(E_basis) is not stable under the Rosati involution (E[{0}])")]
    RosatiUnstable(usize),
    #[error("extra_generators[{0}] has the wrong shape")]
    ExtraShape(usize),
    #[error("extra_generators[{0}] does not commute with E_basis[{1}]")]
    ExtraNotCommuting(usize, usize),
    #[error("extra_generators[{0}] does not preserve phi")]
    ExtraNotIsometry(usize),
    #[error("field: {0}")]
    Field(#[from] FieldError),
    #[error("cannot parse entry {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pairing matrix is not invertible")]
    NotInvertible,
    #[error("pairing matrix is not alternating")]
    NotAlternating,
    #[error("pairing matrix must be square of even size")]
    OddDimension,
    #[error("tensor position {pos} out of range 1..={n}")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("operator does not commute with the antisymmetrizer")]
    NotWedgeCompatible,
    #[error("operator space of dimension {dim} exceeds the budget {budget}")]
    SizeBudgetExceeded { dim: usize, budget: usize },
    #[error("algebra closure did not stabilise within {waves} waves")]
    ClosureWavesExceeded { waves: usize },
    #[error("minimal polynomial factor {poly} does not split over the field; extend the field")]
    SplittingFieldRequired { poly: String, coeffs: Vec<String> },
    #[error("no separating central element found after {retries} attempts")]
    CenterNotSeparated { retries: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

impl From<FieldError> for Error {
    fn from(e: FieldError) -> Self {
        Error::Validation(ValidationError::Field(e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
