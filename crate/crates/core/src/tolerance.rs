//! Numerical tolerances shared by the calculus kernel and the certifiers.
//!
//! Relative tolerances are always multiplied by a magnitude ("scale") of the
//! quantities that were combined to produce the tested value, never by the
//! tested value itself.

/// `|1 + mu*p| > REGRESSIVITY * max(1, |mu*p|)` counts as regressive.
pub const REGRESSIVITY: f64 = 1e-9;

/// Roots are distinct when `|l2 - l1| > ROOT_SEPARATION * max(1, |l1|, |l2|)`.
pub const ROOT_SEPARATION: f64 = 1e-8;

/// A negative discriminant down to `-DISCRIMINANT * max(1, alpha^2, |4 beta|)`
/// is treated as a double root.
pub const DISCRIMINANT: f64 = 1e-14;

/// Residual of a constructed exact solution, relative to its scale.
pub const SOLUTION_RESIDUAL: f64 = 1e-9;

/// Riccati defect accepted by the variable-coefficient certifier.
pub const RICCATI_RESIDUAL: f64 = 1e-9;

/// Relative slack on every analytic bound `sup|y-u| <= K*eps`.
pub const BOUND_SLACK: f64 = 1e-9;

/// Absolute rounding floor on bound checks, relative to the magnitude of the
/// compared functions. Covers eps at the level of floating-point noise.
pub const BOUND_FLOOR: f64 = 1e-12;

/// Largest absolute value in `values`, floored at one.
pub fn magnitude<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn is_regressive_factor(mu_p: f64) -> bool {
    (1.0 + mu_p).abs() > REGRESSIVITY * mu_p.abs().max(1.0)
}
