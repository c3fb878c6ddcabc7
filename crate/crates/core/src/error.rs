use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic function must have degree >= 1")]
    ConstantFunction,
    #[error("coefficient {0} is not finite")]
    NonFiniteCoefficient(usize),
    #[error("quadratic leading coefficient {leading} does not match {orientation} orientation")]
    OrientationMismatch {
        leading: f64,
        orientation: &'static str,
    },
    #[error("expected a {expected} characteristic function")]
    WrongOrientation { expected: &'static str },
    #[error("operation requires a quadratic characteristic function (degree is {0})")]
    NotQuadratic(usize),
    #[error("discriminant {0} is not zero; only the double-root case is classified")]
    UnsupportedDiscriminant(f64),
    #[error("no real fixed point")]
    NoRealFixedPoint,
    #[error("iterate {step} reached {value}, beyond the divergence bound {bound}")]
    OverflowDiverged { step: usize, value: f64, bound: f64 },
    #[error("iteration produced a non-finite value at step {0}")]
    NonFinite(usize),

    #[error("dimension must be at least {min} (got {got})")]
    InvalidDimension { min: usize, got: usize },
    #[error("vacuum eigenvalue {0} lies outside the invertibility region")]
    InvalidVacuum(f64),
    #[error("f^({})(alpha0) - alpha0 = {value} is negative: no unitary representation", .m + 1)]
    NegativeNormSquared { m: usize, value: f64 },
    #[error("f(alpha0) = alpha0: Gauss numbers are undefined at a fixed-point vacuum")]
    FixedPointVacuum,

    #[error("highest weight {0} lies outside the invertibility region")]
    InvalidHighestWeight(f64),
    #[error("ladder square {value} at index {m} is negative: representation is not unitary")]
    NegativeLadderSquare { m: usize, value: f64 },
    #[error("ladder square vanishes at interior index {0}: representation closes early")]
    PrematureClosure(usize),
    #[error("descent hypothesis fails: weight {m} = {value} is not below the highest weight")]
    DescentViolation { m: usize, value: f64 },
    #[error("cut-condition residual {residual} exceeds {tol}")]
    CutResidualTooLarge { residual: f64, tol: f64 },
    #[error("periodicity residual {residual} exceeds {tol}")]
    PeriodicResidualTooLarge { residual: f64, tol: f64 },

    #[error("2j = {0} does not describe a valid shell")]
    InvalidShell(i64),
    #[error("Q2 = g(alpha_j) - alpha_j = {0} must be negative")]
    NonNegativeQ2(f64),
    #[error("radicand {value} of F is negative at state (n1={n1}, n2={n2})")]
    NegativeRadicand { n1: usize, n2: usize, value: f64 },
    #[error("state (n1={n1}, n2={n2}) is not in the basis")]
    OutOfBasis { n1: usize, n2: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("functions do not form a reflection pair: {0}")]
    PairingMismatch(String),

    #[error("invalid serialized data: {0}")]
    InvalidData(String),
    #[error("csv output failed: {0}")]
    Csv(String),
}
