//! Exact coefficient arithmetic: Gaussian rationals, sparse multivariate
//! polynomials and eps-series truncated at a fixed order.

mod gaussian;
mod parse;
mod poly;
mod series;
mod solve;
mod text;
mod var;

use thiserror::Error;

pub use gaussian::{fmt_rational, parse_rational, GaussianRational};
pub use parse::{parse_expr, parse_series, trig};
pub use poly::{Monomial, Poly};
pub use series::{substitute, Bindings, EpsilonSeries};
pub use solve::{rational_roots, rational_sqrt, roots_of, series_solve_root, univariate_coefficients};
pub use text::{poly_to_json, render_poly, render_series, series_to_json, RenderOptions};
pub use var::{ParamName, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series caps differ: {left} vs {right}")]
    CapMismatch { left: usize, right: usize },
    #[error("series cap {cap} is below the required order {needed}")]
    CapTooSmall { needed: usize, cap: usize },
    #[error("series is not divisible by eps^{0}")]
    NotDivisibleByEps(usize),
    #[error("series is not invertible (eps^0 coefficient is not a nonzero constant)")]
    NotInvertible,
    #[error("negative power of `{0}` cannot be substituted")]
    NegativePower(Var),
    #[error("expected a univariate polynomial in `{0}` with constant real coefficients")]
    NotUnivariate(Var),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("coefficient too large for rational root search")]
    CoefficientTooLarge,
    #[error("degenerate root: {0}")]
    DegenerateRoot(String),
    #[error("no rational root: {0}")]
    NonRationalRoot(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
