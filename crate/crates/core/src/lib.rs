pub mod classify;
pub mod faml;
pub mod groebner;
pub mod harness;
pub mod polyring;
pub mod realsolve;

pub use num_bigint::BigInt;

/// Exact coefficient type of the algebra kernel.
pub type Rational = num_rational::BigRational;
/// Polynomial over the rationals.
pub type QPolynomial = polyring::Polynomial<Rational>;
