use thiserror::Error;

/// Errors raised by the core operations.
///
/// Every variant corresponds to a violated precondition; scientific checks
/// that fail are reported through the report types, not through this enum.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("size {size} on axis {axis} must be odd")]
    EvenSize { axis: usize, size: usize },

    #[error("size {size} on axis {axis} must be at least 3")]
    SizeTooSmall { axis: usize, size: usize },

    #[error("expected {expected} lattice sizes, got {got}")]
    SizeCount { expected: usize, got: usize },

    #[error("period scale must be at least 1")]
    PeriodScale,

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("field length {got} does not match lattice mode count {expected}")]
    FieldLength { expected: usize, got: usize },

    #[error("coefficients are not Hermitian symmetric (mode {mode:?}, residual {residual:e})")]
    NotHermitian { mode: Vec<i64>, residual: f64 },

    #[error("non-finite evolution parameter y1 = {0}")]
    NonFiniteY1(f64),

    #[error("negative derivative order {0}")]
    NegativeOrder(i64),

    #[error("constraint for subspace {subspace} violated at mode {mode:?} (relative residual {residual:e})")]
    ConstraintViolated {
        subspace: char,
        mode: Vec<i64>,
        residual: f64,
    },

    #[error("y1 = {y1} has the wrong sign for subspace {subspace}")]
    WrongTimeDirection { subspace: char, y1: f64 },

    #[error("y1 grid needs at least 3 increasing positive points")]
    BadGrid,

    #[error("no growing component")]
    NoGrowingComponent,

    #[error("frequency {freq:?} does not fit on the lattice")]
    FrequencyOutOfRange { freq: Vec<i64> },

    #[error("purely timelike complement: extension impossible")]
    PurelyTimelikeComplement,

    #[error("component {label} has nonzero mean; trace data must be zero-mean")]
    NonzeroMean { label: String },

    #[error("margin {margin} too small for the coordinate-factor shift (need at least {required})")]
    MarginTooSmall { margin: u32, required: u32 },

    #[error("base mode {base:?} of component {label} has an empty kernel fiber")]
    EmptyFiber { label: String, base: Vec<i64> },

    #[error("kernel variant {variant} does not apply to signature {signature}")]
    VariantSignature { variant: String, signature: String },

    #[error("trace component {0} is not allowed for this signature")]
    BadLabel(String),

    #[error("K-norm input has support on the closed region |eta| <= |xi| at mode {0:?}")]
    SupportTouchesR1(Vec<i64>),

    #[error("Hdot norm with negative exponent needs zero-mean input")]
    HdotMean,

    #[error("bump profile invalid: {0}")]
    Profile(String),

    #[error("witness seed mode {mode:?} violates the cone margin {margin}")]
    SeedMargin { mode: Vec<i64>, margin: u32 },

    #[error("axis {0} is not a complement coordinate of M")]
    NotComplementAxis(usize),

    #[error("base data is not C-projected")]
    BaseNotCentered,

    #[error("cone geometry invalid: {0}")]
    Geometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
