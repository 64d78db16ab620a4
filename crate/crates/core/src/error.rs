use thiserror::Error;

/// Errors raised across the library. Variants are grouped loosely by the
/// module that produces them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace dimension {k} exceeds ambient dimension {n}")]
    DimensionTooLarge { k: usize, n: usize },

    #[error("a nonzero vector is required")]
    ZeroVector,

    #[error("vectors are linearly dependent")]
    LinearlyDependent,

    #[error("gram matrix is not square")]
    NotSquare,

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("gram matrix is singular")]
    Singular,

    #[error("map does not preserve the bilinear form")]
    NotIsometry,

    #[error("canonical vector lies in exactly one of the domain and the image")]
    CanonicalMembershipMismatch,

    #[error("map does not send the canonical vector to itself")]
    CanonicalNotFixed,

    #[error("q = {0} is not a power of 2 greater than 1")]
    NotPowerOfTwo(u64),

    #[error("inadmissible combination: {0}")]
    Inadmissible(String),

    #[error("subspace is not totally isotropic")]
    NotTotallyIsotropic,

    #[error("totally isotropic subspace of dimension {dim} is not maximal (expected {expected})")]
    NotMaximal { dim: usize, expected: usize },

    #[error("dimensions {0} and {1} have opposite parity; only same-parity sums are supported")]
    OppositeParity(usize, usize),

    #[error("ambient dimension {dim} exceeds the brute-force limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability is zero: {0}")]
    ProbabilityZero(String),

    #[error("only real forms (positive discriminant) are supported")]
    NotReal,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("the zero form has no roots to test")]
    ZeroForm,

    #[error("form is reducible over Q")]
    Reducible,
}

pub type Result<T> = std::result::Result<T, Error>;
