use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("evaluation point {0} lies on a pole")]
    AtPole(Complex64),

    #[error("evaluation point {0} lies on a mass position")]
    AtMass(Complex64),

    #[error("mass positions {0} and {1} coincide")]
    DegeneratePositions(Complex64, Complex64),

    #[error("reduced polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("jacobian is singular at {0}")]
    JacobianSingular(Complex64),

    #[error("contour sample {sample} is within guard distance of a zero or pole")]
    GuardViolation { sample: Complex64 },

    #[error("unresolved phase jump on contour centered at {center} (radius {radius})")]
    PhaseAmbiguity { center: Complex64, radius: f64 },

    #[error("configuration is not simple: {0}")]
    NonSimple(String),

    #[error("winding accounting failed: {0}")]
    CountMismatch(String),

    #[error("construction could not be validated: {reason}")]
    ValidationFailed { reason: String, trace: Vec<String> },

    #[error("unsupported request: {0}")]
    Unsupported(String),

    #[error("palette has {have} colors, {need} required")]
    PaletteExhausted { have: usize, need: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
