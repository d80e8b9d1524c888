//! Exact-arithmetic toolkit for the divisor-power factorial series
//! `S_k = Σ σ_k(n)/n!`.
//!
//! The modules follow the objects that appear when one tries to show `S_k`
//! irrational: divisor sums, factorial-normalized tails, the quotient
//! polynomials `P_{k,i}`, prime-pattern sieves, fractional-part criteria and
//! discrepancy bounds for `f(n) = αn + α/n²`. Everything that can be exact is
//! exact; the few floating-point quantities carry explicit error budgets.

pub mod acceptance;
pub mod arith;
pub mod criteria;
pub mod divisors;
pub mod equidist;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod series;
pub mod sieve;

pub use arith::{FracDistance, Rational};
pub use error::{Error, Result};
pub use poly::{Poly, RatPoly};
pub use scalar::Scalar;

/// Nearest-integer distance over exact big rationals.
pub type Distance = FracDistance<num_bigint::BigInt>;
