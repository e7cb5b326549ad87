//! Exact engine for Zariski-chamber sweeps on surfaces and the S / F
//! functionals that bound local δ-invariants of polarized threefolds.
//!
//! The lattice and Zariski code is generic over [`OrderedField`]; the
//! aliases below fix the two instantiations the engine uses.

pub mod error;
pub mod exact;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod okounkov;
pub mod scalar;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::{Infinitesimal, OrderedField, Ring};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Rationals extended by a positive infinitesimal.
pub type EpsRational = Infinitesimal<Rational>;


/// Divisor class with rational coefficients.
pub type DivClass = lattice::Class<Rational>;

/// Divisor class whose coefficients are polynomials in `(u, v)`.
pub type ParamClass = lattice::Class<exact::Poly>;

/// Zariski decomposition of a rational class.
pub type RationalZariski = lattice::ZariskiPair<Rational>;
