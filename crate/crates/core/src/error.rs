use thiserror::Error;

use crate::grid::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("field order {order} exceeds the configured maximum {max}")]
    DegreeTooLarge { order: u64, max: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a quadratic extension (k = 2), field has k = {0}")]
    NotQuadraticExtension(u32),
    #[error("grid is on the {found:?} side, expected {expected:?}")]
    WrongSide { expected: Side, found: Side },
    #[error("grids live on different sides")]
    SideMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("characteristic {characteristic} must exceed the dimension {n}")]
    CharacteristicTooSmall { characteristic: u32, n: usize },
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
    #[error("work estimate {needed} exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("kernel vanishes identically")]
    DegenerateKernel,
    #[error("operation requires a paraboloid surface")]
    WrongSurfaceKind,
    #[error("no closed form for R*({p} -> {q})")]
    NoClosedForm { p: String, q: String },
    #[error("surface contains no affine line")]
    SubspaceNotFound,
    #[error("unknown witness `{0}`")]
    UnknownWitness(String),
    #[error("function is not supported on the hyperplane x_n = 0")]
    SupportViolation,
    #[error("the second function does not majorize the first on the Fourier side")]
    NotAMajorant,
    #[error("-1 is a square in this field")]
    MinusOneIsSquare,
    #[error("polynomial must be non-zero")]
    NonZeroRequired,
    #[error("polynomial degree {degree} exceeds the bound {bound}")]
    PolynomialDegree { degree: u32, bound: u32 },
    #[error("pi_(-1) is not one-to-one on G")]
    NotInjective,
    #[error("slope {0} is not proper")]
    ImproperSlope(String),
    #[error("heights t0 and t_inf coincide")]
    DegenerateHeights,
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("invalid exponent `{0}`")]
    InvalidExponent(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
