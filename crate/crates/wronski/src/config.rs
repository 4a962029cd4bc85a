//! Frozen numeric conventions and run-wide configuration.
//!
//! Every tolerance that appears in more than one module lives here, with the
//! rationale attached, so that a change is a one-line diff instead of a
//! scavenger hunt.

use serde::{Deserialize, Serialize};

/// Shift direction used when a differential operator in `x` and `x·d/dx` is
/// transposed into a difference operator in the exponential base.
///
/// `Forward` realizes the coefficient of `x^i` as a step `f(x) -> f(x+i)`;
/// `Backward` as `f(x) -> f(x-i)`. The shipped value is fixed by
/// [`crate::quasipoly::calibrate_dual_convention`] and asserted in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualConvention {
    Forward,
    Backward,
}

/// Calibrated shift convention for the bispectral dual.
pub const DUAL_CONVENTION: DualConvention = DualConvention::Forward;

/// Calibrated integer offset: the monic discrete Wronskian of the dual kernel
/// equals `Y(x - DUAL_SHIFT)` where `Y` is the indicial quotient polynomial.
pub const DUAL_SHIFT: i64 = 1;

/// Calibrated proportionality between eigenvalues of the `Qd` structured
/// matrix and the nonzero Wronskian roots they reproduce.
pub const QD_SPECTRUM_SCALE: f64 = 1.0;

/// Tolerances shared across modules. Values are absolute unless the name or
/// the use site says otherwise.
pub mod tol {
    /// Target for polished polynomial roots: `|p(r)|` relative to the largest
    /// coefficient magnitude.
    pub const ROOT_REFINE: f64 = 1e-10;

    /// Relative singular-value cutoff for numeric rank and nullspaces.
    pub const RANK_REL: f64 = 1e-10;

    /// Radius used to merge duplicate solutions of the inverse solver.
    pub const DEDUP_RADIUS: f64 = 1e-6;

    /// Forward residual (relative) required of a polished inverse solution.
    pub const FORWARD_RESIDUAL: f64 = 1e-10;

    /// Half-width of the excluded band around a reality-condition boundary
    /// when scanning parameter regions.
    pub const BOUNDARY_BAND: f64 = 1e-6;

    /// Default reality-classification tolerance: `|Im v| <= tol·(1 + |Re v|)`.
    pub const REALITY: f64 = 1e-6;

    /// Coefficientwise residual accepted when an annihilating operator is
    /// applied back to the space it was built from.
    pub const OPERATOR_RESIDUAL: f64 = 1e-8;

    /// Second-singular-value ratio below which a matrix counts as rank one.
    pub const RANK_ONE: f64 = 1e-9;

    /// Relative remainder accepted by exact polynomial division.
    pub const DIV_EXACT: f64 = 1e-9;
}

/// Output format for CLI reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Run-wide knobs shared by the CLI and the library entry points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Master seed; every parallel work item derives its own stream from it.
    pub seed: u64,
    /// Reality / agreement tolerance.
    pub tol: f64,
    /// Multistart count for the inverse solver.
    pub starts: usize,
    /// Worker threads; `None` lets the runtime decide.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 1, tol: tol::REALITY, starts: 200, jobs: None }
    }
}
