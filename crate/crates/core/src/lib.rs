//! Computational toolkit for characteristic classes of codimension-one
//! foliation leaf spaces.
//!
//! The crate is organised around five building blocks:
//!
//! * [`expr`] — a small closed-form expression language for real functions of
//!   one variable, with evaluation overloaded on jets so that all derivatives
//!   up to a requested order come out of a single pass.
//! * [`jets`] — truncated jet arithmetic (composition, reversion, prolonged
//!   actions on frame coordinates) over `f64`, exact rationals, or dual
//!   numbers.
//! * [`gf`] — the exterior algebra on the generators `c_0, c_1, c_2, …` of
//!   the formal-vector-field complex, its differential, weight grading,
//!   relative and divisible subcomplexes, and exact cohomology ranks.
//! * [`frames`] — the canonical 1-forms `θ_0 … θ_3` on frame-bundle charts,
//!   their structure identities, Gysin fiber integration, the Schwarzian
//!   derivative, and affine/projective connection cocycle verifiers.
//! * [`dynamics`] — circle and interval dynamics: rotation numbers,
//!   Diophantine estimation, fixed-point classification, the `Q_n`
//!   vector-field recursion, flow verification, and the Reeb holonomy probe.

pub mod dynamics;
pub mod expr;
pub mod frames;
pub mod gf;
pub mod jets;
pub mod multipoly;

/// Exact rational scalar used throughout the cohomology layer.
pub type Q = num::BigRational;

/// Arbitrary-precision integer.
pub type Z = num::BigInt;

/// Shorthand for building a rational from an integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

/// Shorthand for building the rational `p/q`.
pub fn qr(p: i64, q: i64) -> Q {
    Q::new(Z::from(p), Z::from(q))
}
