//! Numerical laboratory for Wronskians of quasi-exponential function spaces.
//!
//! The crate computes discrete and differential Wronskians of spaces spanned
//! by functions of the form `p(x)·Q^x`, `p(x)·e^{λx}`, and `x^z·p(x)`, solves
//! the inverse problem (prescribe the Wronskian roots, recover the spaces),
//! and cross-checks the results against three independent reformulations:
//!
//! * spectra of structured matrices attached to the same data,
//! * positivity of Yangian-type bilinear forms on XXX Bethe-ansatz modules,
//! * a bispectral duality sending differential operators to difference
//!   operators acting on the base of the exponential.
//!
//! Everything is plain `f64`/complex numerics with explicit tolerances; see
//! [`config`] for the frozen constants and [`report`] for deterministic
//! output formatting.

pub mod bethe;
pub mod config;
pub mod inverse;
pub mod linalg;
pub mod matrices;
pub mod poly;
pub mod quasiexp;
pub mod quasipoly;
pub mod report;

pub use poly::{classify_real, pair_roots, PairingReport, PolyError, Polynomial, RootMultiset, C64};
