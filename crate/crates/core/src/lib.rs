//! Exact lattice valuations.
//!
//! Ordered Abelian groups, lattices and valuations on them, with the
//! pseudometric and quotient calculus, concrete measure and integral
//! instances over the rationals, finite-stage completion of monotone
//! sequences, fitting uniformities, convexification, the algebraic half of
//! Fubini for step functions, and Borel-code encodings.

// Errors carry the offending exact values.
#![allow(clippy::result_large_err)]

pub mod borel;
pub mod convex;
pub mod fubini;
pub mod instances;
pub mod lattice;
pub mod oag;
pub mod rational;
pub mod report;
pub mod sequences;
pub mod suites;
pub mod uniformity;
pub mod valuation;

pub use rational::Rational;
pub use report::CheckReport;
