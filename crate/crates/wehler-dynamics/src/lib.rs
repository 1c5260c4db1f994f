//! Exact arithmetic for the dynamics of Wehler K3 surfaces.
//!
//! A Wehler surface is a smooth hypersurface of degree (2,2,2) in
//! (P^1)^3. Each coordinate projection that forgets one factor is a
//! 2-to-1 covering, and swapping the two sheets defines an involution
//! of the surface. This crate implements the three involutions with
//! exact rational arithmetic, together with the machinery built on
//! top of them:
//!
//! - [`numcore`]: big rationals, canonical projective points, finite
//!   field quadratics, integer polynomials and certified spectral radii.
//! - [`wehler`]: surfaces, fiber quadratics, Vieta involutions, the
//!   biquadratic normal-form curves and their discriminants, and the
//!   family of surfaces with an orbit of size 8.
//! - [`orbits`]: group words, exact orbit search over Q, and a full
//!   point census plus orbit partition over finite fields.
//! - [`nsgeom`]: the rank-3 intersection lattice, isometry
//!   classification, axis geometry in the hyperbolic model, invariant
//!   curve degree bounds, and stationary (averaged pullback) operators.
//! - [`heights`]: Weil heights, cyclic canonical heights via Tate
//!   limits, stationary heights via the Kawaguchi recursion, and
//!   growth-rate estimation.
//! - [`kummer`]: torus automorphisms and their fixed point counts,
//!   torsion orbits, Kummer type validation, Hirzebruch-Jung strings,
//!   and the three-chart atlas resolving a 1/5(1,2) singular point.
//! - [`report`]: CLI configuration, JSON reports, and the dispatcher
//!   used by the `wehler-dynamics` binary.
//! - [`acceptance`]: the self-check suite run by `wehler-dynamics
//!   acceptance` and by the `acceptance` integration test.
//!
//! All core arithmetic is exact (GMP integers and rationals); floating
//! point appears only in explicitly error-bounded outputs such as
//! spectral radii, eigenvector coordinates, and height values.

pub mod acceptance;
pub mod heights;
pub mod kummer;
pub mod nsgeom;
pub mod numcore;
pub mod orbits;
pub mod report;
pub mod wehler;

pub use numcore::{FpElem, IntMatrix, IntPolynomial, ProjPoint1, Rational};
pub use nsgeom::{Isometry, IsometryType, LatticeForm};
pub use orbits::GroupWord;
pub use wehler::{SurfacePointQ, WehlerSurface};
