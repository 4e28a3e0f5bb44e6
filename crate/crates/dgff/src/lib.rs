//! Exact discrete complex analysis on the square lattice and the current /
//! Virasoro mode algebra of the discrete Gaussian free field.
//!
//! Everything is computed in exact arithmetic ([`scalar::PiScalar`]); the
//! algebraic identities are checked by structural equality, never by a
//! floating-point tolerance.

pub mod contour;
pub mod correlator;
pub mod kernel;
pub mod lattice;
pub mod modes;
pub mod monomials;
pub mod scalar;

pub use scalar::{GaussianRational, PiScalar, Rational};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-monomial scalar {0}")]
    NonMonomialDivisor(String),
    #[error("site {site} is not in the domain {domain} of the function")]
    Domain { site: String, domain: String },
    #[error("invalid contour: {0}")]
    Contour(String),
    #[error("contour too small: {0}")]
    ContourTooSmall(String),
    #[error("path leaves its sublattice at {0}")]
    Path(String),
    #[error("kernel cache: {0}")]
    Cache(String),
    #[error("insertion list: {0}")]
    Insertion(String),
    #[error("numeric solver did not converge: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
