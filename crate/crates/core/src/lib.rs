//! Core algorithms for computing candidate rational points on hyperelliptic
//! curves by intersecting a residue disk's curve embedding with the p-adic
//! closure of the integral points of a torsor, in explicit p-adic height and
//! Coleman-logarithm coordinates.
//!
//! Modules, bottom-up:
//! - [`padic`], [`padic_poly`], [`zq`]: capped-precision p-adic scalars,
//!   univariate polynomials over Q_p, and mod-p^k multivariate machinery.
//! - [`curve`]: hyperelliptic models, residue-disk parametrization, and the
//!   odd-degree model change.
//! - [`mumford`]: Mumford divisor arithmetic with tracked linear-equivalence
//!   functions (compose/reduce, multiples, splitting).
//! - [`mw`]: Mordell-Weil lattice coordinates and endomorphism data.
//! - [`heights`]: local height bookkeeping around a pluggable at-p oracle.
//! - [`biext`]: the trivial biextension, its partial group laws, and the
//!   polynomial parametrization of integral torsor points.
//! - [`disk`]: the per-residue-disk solver and its refinement to higher
//!   disks.
//! - [`fixtures`]: serde schemas for the on-disk fixture bundle.

pub mod biext;
pub mod curve;
pub mod disk;
pub mod error;
pub mod fixtures;
pub mod heights;
pub mod mumford;
pub mod mw;
pub mod padic;
pub mod verify;
pub mod padic_poly;
pub mod zq;

pub use error::{Error, Result};
pub use padic::{Padic, Prec};
pub use padic_poly::{PadicPoly, SplitOutcome, ValuationProfile};
