//! Factorization of bivariate quaternionic polynomials into univariate
//! linear factors.
//!
//! A polynomial `Q ∈ H[t, s]` whose norm polynomial factors as `P(t)·R(s)`
//! admits, after multiplication by a suitable real `K(t)`, a factorization
//! `K·Q = ∏ (uᵢ − hᵢ)` with `uᵢ ∈ {t, s}`. This crate computes such
//! factorizations, enumerates them over all orderings of the quadratic
//! norm factors, decides equivalence of factorizations, and lifts them to
//! dual quaternions.

pub mod algebra;
pub mod bi_factor;
pub mod dual_lift;
pub mod error;
pub mod io;
pub mod quat_poly;
pub mod real_poly;
pub mod roots;
pub mod strategy;
pub mod tol;
pub mod uni_factor;

pub use algebra::{DualQuaternion, Quaternion, Real};
pub use error::{Error, Result};
pub use quat_poly::QuatPoly;
pub use real_poly::{RealBiPoly, RealPoly, Var};
pub use tol::Tol;
pub use uni_factor::{Factorization, LinearFactor};
