//! Nonexpansive fixed-point iterations on geodesic spaces, with certified
//! rates of asymptotic regularity.
//!
//! The crate provides:
//!
//! - [`spaces`]: a metric-plus-convexity-mapping abstraction (`dist`/`combine`)
//!   with four concrete geodesic spaces: Euclidean n-space, finite-dimensional
//!   l_p (p >= 2), the hyperbolic plane (hyperboloid model), and a star-shaped
//!   R-tree.
//! - [`modulus`]: moduli of uniform convexity (quadratic, Clarkson-type l_p,
//!   tabulated) plus empirical verification that a claimed modulus is valid
//!   for a given space.
//! - [`mappings`]: nonexpansive self-maps (projections, rotations, averaged
//!   maps, compositions) and an empirical nonexpansiveness checker.
//! - [`iterate`]: Picard, Krasnoselski-Mann, and Ishikawa orbits with per-step
//!   diagnostics and validation of the standard inequality chain along orbits.
//! - [`rates`]: evaluation of explicit rate certificates N(eps) guaranteeing
//!   d(x_n, Tx_n) < eps, with outward-conservative floating-point arithmetic
//!   so that emitted bounds are sound.
//! - [`analysis`]: asymptotic radii and centers, Chebyshev nearest-point
//!   projection, approximate fixed-point sets, and boundedness diagnostics.

pub mod analysis;
pub mod directed;
pub mod error;
pub mod iterate;
pub mod mappings;
pub mod modulus;
pub mod rates;
pub mod spaces;

pub use error::{Error, Result};
pub use mappings::NonexpansiveMap;
pub use modulus::Modulus;
pub use spaces::{ConvexSet, Point, Space};
