//! Exact arithmetic primitives shared by every other module.
//!
//! This module wraps GMP integers and rationals (via `rug`) and adds
//! the small amount of structure the surface dynamics need: canonical
//! projective points on P^1, quadratic equations over prime fields,
//! integer polynomials with Sturm-sequence root isolation, integer and
//! rational matrices, and a certified spectral radius computation that
//! never trusts a floating point eigensolver.

mod fp;
mod matrix;
mod poly;
mod proj;
mod spectral;

pub use fp::{quad_roots_fp, sqrt_fp, FpElem, FpProj};
pub use matrix::{charpoly, IntMatrix, QMatrix};
pub use poly::{cyclotomic, cyclotomic_profile, IntPolynomial, RatPoly};
pub use proj::{normalize_proj, ProjPoint1};
pub use spectral::spectral_radius;

use thiserror::Error;

/// Exact rational number backed by GMP. Always stored in lowest terms
/// with a positive denominator.
pub type Rational = rug::Rational;

/// Exact arbitrary precision integer backed by GMP.
pub type Integer = rug::Integer;

/// Errors raised by the arithmetic layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    /// Both homogeneous coordinates were zero; (0,0) is not a point of P^1.
    #[error("(0, 0) does not define a point of P^1")]
    ZeroVector,
    /// A fiber quadratic had all three coefficients zero, so every point
    /// of P^1 is a root and there is no meaningful root set.
    #[error("degenerate fiber: the quadratic vanishes identically")]
    DegenerateFiber,
    /// An iterative bound refinement failed to reach the requested
    /// tolerance within its iteration budget.
    #[error("iteration budget exhausted before reaching tolerance")]
    NonConvergence,
}

/// Natural logarithm of a positive integer, exact to f64 rounding even
/// when the integer far exceeds the f64 range.
///
/// Splits the integer as m * 2^e with m normalized to 53 significant
/// bits, so the result is ln(m) + e ln(2) with only rounding error.
pub fn ln_integer(n: &Integer) -> f64 {
    assert!(n.cmp0() == std::cmp::Ordering::Greater, "ln of a non-positive integer");
    let bits = n.significant_bits();
    if bits <= 53 {
        return n.to_f64().ln();
    }
    let shift = bits - 53;
    let top = Integer::from(n >> shift);
    top.to_f64().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of max(|a|, |b|), the local height of the integer
/// pair (a, b) at the archimedean place.
pub fn ln_max_abs(a: &Integer, b: &Integer) -> f64 {
    let aa = Integer::from(a.abs_ref());
    let bb = Integer::from(b.abs_ref());
    let m = if aa >= bb { aa } else { bb };
    if m.cmp0() == std::cmp::Ordering::Equal {
        return 0.0;
    }
    ln_integer(&m)
}

/// Parse a rational from either "p/q" or a plain integer string.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    s.parse::<Rational>().ok().map(|r| r)
}
