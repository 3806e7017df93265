//! Finding, classifying and certifying the solutions of `p(z) = conj(z)` and
//! `r(z) = conj(z)`, in particular the point-mass gravitational lens equation
//! `conj(z) = sum_j sigma_j / (z - z_j)`.

pub mod certify;
pub mod constructions;
pub mod error;
pub mod exec;
pub mod lens;
pub mod poly;
pub mod scanner;
pub mod solver;
pub mod timedelay;

pub use certify::{certified_solve, certify, check_theorem_bounds, theorem_bounds, Certificate};
pub use error::{Error, Result};
pub use exec::Execution;
pub use lens::{FieldKind, LensField, Mass, MassConfig, Orientation, RationalLens};
pub use poly::Polynomial;
pub use solver::{solve, LensSolution, SolveOptions, SolveReport};
