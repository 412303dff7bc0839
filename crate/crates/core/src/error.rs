use thiserror::Error;

/// Errors raised by the geometry, sphere construction and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("y must be positive (got y = {0})")]
    NonPositiveImaginary(f64),

    #[error("matrix is not a positively oriented linear complex structure (defect {defect:.3e})")]
    NotComplexStructure { defect: f64 },

    #[error("matrix does not have unit determinant (det = {0})")]
    NotUnimodular(f64),

    #[error("weight function argument must be non-negative (got t = {0})")]
    NegativeWeightArgument(f64),

    #[error("invalid weight parameter k = {0}; k must be positive and finite")]
    InvalidWeightParameter(f64),

    #[error("malformed weight spec `{0}`; expected `linear:<k>` or `log:<k>`")]
    MalformedWeightSpec(String),

    #[error("Pick tensor is not compatible with J (defect {defect:.3e})")]
    IncompatiblePickTensor { defect: f64 },

    #[error("tangent vectors are attached to different base points")]
    BaseMismatch,

    #[error(
        "no solution of Wang's equation for a vanishing cubic differential: \
         the integral of the Laplacian over the torus is zero while 2e^u integrates to a positive number"
    )]
    VanishingCubicDifferential,

    #[error("exponent {exponent} is outside the representable range of f64 exponentials")]
    ExponentRange { exponent: f64 },

    #[error("initial frame has determinant {found}, expected {expected} (defect {defect:.3e})")]
    InvalidFrame {
        found: num_complex::Complex64,
        expected: num_complex::Complex64,
        defect: f64,
    },

    #[error("finite-difference step h = {h} crosses the boundary of the upper half-plane at y = {y}")]
    StepCrossesBoundary { y: f64, h: f64 },

    #[error("finite-difference step must be positive (got {0})")]
    NonPositiveStep(f64),

    #[error("mesh grid needs n >= 2 and a positive range (got n = {n}, r = {r})")]
    InvalidGrid { n: usize, r: f64 },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
