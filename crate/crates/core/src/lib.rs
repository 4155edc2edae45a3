//! Calculus on finite time scales and constructive Hyers-Ulam stability
//! certificates for linear dynamic equations.
//!
//! A [`TimeScale`] is a finite, strictly increasing set of isolated points.
//! On such a set the delta derivative, the delta integral and the
//! generalized exponential `e_p(t, s)` are exact finite expressions, so
//! every certificate produced here is reproducible to the last bit.
//!
//! Given an approximate solution `y` with residual `eps`, the certifiers in
//! [`stability`] construct an exact solution `u` and report `sup|y - u|`
//! against `eps`, together with an analytic constant where one exists:
//!
//! ```
//! use std::sync::Arc;
//! use tempus_core::{certify_second_order_icc, GridFunction, TimeScale};
//!
//! let ts = Arc::new(TimeScale::new((0..=8).map(f64::from).collect()).unwrap());
//! let forcing = GridFunction::constant(&ts, 1.0).unwrap();
//! let y = GridFunction::from_fn(&ts, |t| 0.5 + 1e-3 * (t * 1.3).sin()).unwrap();
//! let cert = certify_second_order_icc(&y, -3.0, 2.0, &forcing).unwrap().certificate;
//! assert!(cert.verdict.is_pass());
//! assert!(cert.sup_deviation <= cert.analytic_constant.unwrap() * cert.epsilon * (1.0 + 1e-9));
//! ```
//!
//! The `parallel` feature (on by default) evaluates independent per-index
//! sums and campaign trials with rayon; see [`Execution`].

pub mod calculus;
pub mod error;
pub mod exec;
pub mod grid;
pub mod harness;
pub mod rng;
pub mod solvers;
pub mod stability;
pub mod timescale;
pub mod tolerance;

pub use calculus::{circle_minus, delta_derivative, delta_integral, exponential_profile, ts_exponential};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{Coefficient, GridFunction};
pub use harness::{
    make_timescale, perturb, run_campaign, run_campaign_with, CampaignError, CampaignReport,
    PerturbationKind, PerturbationSpec, TimeScaleFamily, TrialRow,
};
pub use rng::SplitMix64;
pub use solvers::{
    characteristic_roots, recurrence_oracle_second_order, residual_first_order, residual_second_order,
    riccati_forward, solve_first_order_ivp, solve_first_order_ivp_with, suggested_riccati_seed,
    CharacteristicRoots, Equation, EquationSpec, Residual, RiccatiSolution,
};
pub use stability::{
    certify_first_order, certify_second_order_cc, certify_second_order_cc_factored, certify_second_order_icc,
    certify_second_order_ivc, closing_identity_check, lemma_constant, riccati_inner_coefficient,
    Certification, Construction, HypothesisFlags, LemmaConstant, StabilityCertificate, TerminalDiagnostics,
    Verdict,
};
pub use timescale::{validate_timescale, TimeScale};
