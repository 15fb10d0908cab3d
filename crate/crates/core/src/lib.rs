//! Exact renormalization-group perturbation series for oscillators
//! `y'' + y = eps * V(eps, e^{it}, e^{-it}, y, y')`.

pub mod algebra;
pub mod examples;
pub mod mathieu;
pub mod numeric;
pub mod perturbation;
pub mod potential;
pub mod rg;
pub mod verify;

pub use algebra::{AlgebraError, EpsilonSeries, GaussianRational, Poly, Var};
pub use examples::{example, ExampleSpec, EXAMPLES};
pub use mathieu::{MathieuAnalysis, MathieuError};
pub use numeric::{NumericError, Trajectory};
pub use perturbation::{expand, NaiveSeries, PerturbationError};
pub use potential::{Potential, PotentialError, Quartet};
pub use rg::{derive_rg, limit_cycle, to_polar, PolarRG, RGSystem, RgError};
pub use verify::IdentityReport;

/// Any failure of the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error(transparent)]
    Rg(#[from] RgError),
    #[error(transparent)]
    Mathieu(#[from] MathieuError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
