//! Constructive Hyers-Ulam certificates.
//!
//! Every certifier takes an approximate solution `y`, measures its residual
//! `eps`, builds an exact solution `u` of the target equation, and reports
//! how far `y` lies from `u` relative to `eps`.
//!
//! * [`certify_first_order`] handles `x^Delta = d x + f` by variation of
//!   constants anchored at `g(a)`; the bound is `sup|g - w| <= L eps` with
//!   `L` from [`lemma_constant`].
//! * [`certify_second_order_cc`] follows the terminal-anchored construction
//!   for constant coefficients: `z = (g(b) - eps) e_{lambda2}(., b)` and the
//!   matching `u`. No analytic constant is claimed; the ratio is measured.
//! * [`certify_second_order_icc`] and [`certify_second_order_ivc`] factor the
//!   second-order operator into two first-order ones (via the characteristic
//!   roots or a Riccati solution) and apply the first-order certificate
//!   twice, giving the constant `L_inner * L_outer`.

use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{delta_derivative, exponential_profile};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Coefficient, GridFunction};
use crate::solvers::{
    characteristic_roots, residual_first_order, residual_second_order, solve_first_order_ivp_with,
    CharacteristicRoots, Equation, EquationSpec, Residual, RiccatiSolution,
};
use crate::tolerance::{self, magnitude};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Which construction produced the exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// First-order variation of constants from `w(a) = g(a)`.
    FirstOrderLemma,
    /// Constant coefficients, `z` and `u` anchored at the right endpoint.
    TerminalAnchored,
    /// Constant coefficients, factored through the characteristic roots.
    RootFactorization,
    /// Variable coefficients, factored through a Riccati solution.
    RiccatiFactorization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct HypothesisFlags {
    pub roots: Option<CharacteristicRoots>,
    /// Roots are real and distinct but not both positive.
    pub outside_theorem_hypotheses: bool,
    pub regressive: bool,
    pub riccati_cond1: Option<bool>,
    pub riccati_cond2: Option<bool>,
    /// Lemma constant of the inner first-order factor.
    pub inner_constant: Option<f64>,
    /// Lemma constant of the outer first-order factor.
    pub outer_constant: Option<f64>,
}

/// Measurements specific to the terminal-anchored construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminalDiagnostics {
    /// `max |g - z|` over `i <= n-2`.
    pub g_z_deviation: f64,
    /// Whether `|g - z| <= eps` held on this instance.
    pub g_z_within_epsilon: bool,
    /// Whether `|y - u| <= eps` held on this instance.
    pub deviation_within_epsilon: bool,
    /// `max |z^Delta - lambda2 z|` over `i <= n-2`.
    pub z_growth_residual: Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub construction: Construction,
    pub epsilon: f64,
    pub analytic_constant: Option<f64>,
    pub empirical_constant: f64,
    pub sup_deviation: f64,
    pub solution_residual: Residual,
    pub hypotheses: HypothesisFlags,
    pub terminal: Option<TerminalDiagnostics>,
    pub verdict: Verdict,
}

/// Result of a certification: the exact solution, the intermediate
/// first-order solution (`z` for the terminal construction, `w` otherwise)
/// and the certificate.
#[derive(Debug, Clone)]
pub struct Certification {
    pub solution: GridFunction,
    pub intermediate: GridFunction,
    pub certificate: StabilityCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConstant {
    pub value: f64,
    pub attained_at: usize,
}

/// `L = max_i |e_d(t_i, a)| * sum_{k<i} |e_d(a, sigma(t_k))| mu(t_k)`.
///
/// The running sum obeys `S_{i+1} = |1 + mu_i d_i| S_i + mu_i`, which never
/// forms `e_d(t, a)` on its own and so cannot overflow before `L` does.
pub fn lemma_constant(d: &Coefficient) -> Result<LemmaConstant> {
    let n = d.len();
    d.require_regressive(0..n - 1)?;
    let mu = d.timescale().graininess_all();
    let mut best = LemmaConstant {
        value: 0.0,
        attained_at: 0,
    };
    let mut s = 0.0;
    for (i, &m) in mu.iter().enumerate().take(n - 1) {
        s = d.factor(i).abs() * s + m;
        if s > best.value {
            best = LemmaConstant {
                value: s,
                attained_at: i + 1,
            };
        }
    }
    if !best.value.is_finite() {
        return Err(Error::NonFinite {
            index: best.attained_at,
        });
    }
    Ok(best)
}

fn empirical(sup_deviation: f64, epsilon: f64) -> f64 {
    if epsilon > 0.0 {
        sup_deviation / epsilon
    } else {
        0.0
    }
}

/// `sup_deviation <= K eps (1 + slack) + floor`; trivially true at `eps = 0`.
fn bound_holds(sup_deviation: f64, constant: f64, epsilon: f64, mag: f64) -> bool {
    epsilon == 0.0
        || sup_deviation <= constant * epsilon * (1.0 + tolerance::BOUND_SLACK) + tolerance::BOUND_FLOOR * mag
}

fn joint_magnitude(a: &GridFunction, b: &GridFunction) -> f64 {
    magnitude(a.values()).max(magnitude(b.values()))
}

/// Certifies `|g^Delta - d g - f| <= eps` against the exact solution `w` with
/// `w(a) = g(a)`.
pub fn certify_first_order(g: &GridFunction, d: &Coefficient, f: &GridFunction) -> Result<Certification> {
    certify_first_order_with(g, d, f, Execution::default())
}

pub fn certify_first_order_with(
    g: &GridFunction,
    d: &Coefficient,
    f: &GridFunction,
    exec: Execution,
) -> Result<Certification> {
    g.ensure_aligned(d.function())?;
    g.ensure_aligned(f)?;
    d.require_regressive(0..g.len() - 1)?;
    let epsilon = residual_first_order(g, d, f)?.value;
    let w = solve_first_order_ivp_with(d, f, g[0], exec)?;
    let lemma = lemma_constant(d)?;
    let sup_deviation = g.sup_distance(&w)?;
    let solution_residual = residual_first_order(&w, d, f)?;
    let pass = solution_residual.within(tolerance::SOLUTION_RESIDUAL)
        && bound_holds(sup_deviation, lemma.value, epsilon, joint_magnitude(g, &w));
    let certificate = StabilityCertificate {
        construction: Construction::FirstOrderLemma,
        epsilon,
        analytic_constant: Some(lemma.value),
        empirical_constant: empirical(sup_deviation, epsilon),
        sup_deviation,
        solution_residual,
        hypotheses: HypothesisFlags {
            regressive: true,
            ..HypothesisFlags::default()
        },
        terminal: None,
        verdict: Verdict::from_bool(pass),
    };
    Ok(Certification {
        solution: w.clone(),
        intermediate: w,
        certificate,
    })
}

fn certified_roots(alpha: f64, beta: f64) -> Result<CharacteristicRoots> {
    let roots = characteristic_roots(alpha, beta)?;
    if !roots.distinct {
        return Err(Error::RepeatedRoots {
            root: 0.5 * (roots.lambda1 + roots.lambda2),
        });
    }
    Ok(roots)
}

fn constant_coefficients(
    ts: &Arc<crate::timescale::TimeScale>,
    alpha: f64,
    beta: f64,
) -> Result<(GridFunction, GridFunction)> {
    Ok((
        GridFunction::constant(ts, alpha)?,
        GridFunction::constant(ts, beta)?,
    ))
}

/// Terminal-anchored certificate for `x^DD + alpha x^D + beta x = 0`.
///
/// With `g = y^Delta - lambda1 y`:
///
/// * `z(t) = (g(b) - eps) e_{lambda2}(t, b)`, so `z^Delta = lambda2 z`;
/// * `u(t) = (y(b) - eps) e_{lambda1}(t, b) - sum_{t <= s < b} e_{lambda1}(t, sigma(s)) z(s) mu(s)`,
///   so `u^Delta - lambda1 u = z` and `u` solves the homogeneous equation.
///
/// The sum is the integral `e_{lambda1}(t,a) int_t^b z/(1 + mu lambda1) e_{-/lambda1}(s,a)`
/// with the exponentials combined into one factor.
pub fn certify_second_order_cc(y: &GridFunction, alpha: f64, beta: f64) -> Result<Certification> {
    certify_second_order_cc_with(y, alpha, beta, Execution::default())
}

pub fn certify_second_order_cc_with(
    y: &GridFunction,
    alpha: f64,
    beta: f64,
    exec: Execution,
) -> Result<Certification> {
    let ts = y.timescale();
    ts.require_len(3)?;
    let roots = certified_roots(alpha, beta)?;
    let n = ts.len();
    let l1 = Coefficient::constant(ts, roots.lambda1)?;
    let l2 = Coefficient::constant(ts, roots.lambda2)?;
    l1.require_regressive(0..n - 1)?;
    l2.require_regressive(0..n - 1)?;

    let (p, q) = constant_coefficients(ts, alpha, beta)?;
    let zero = GridFunction::zeros(ts);
    let epsilon = residual_second_order(y, &p, &q, &zero)?.value;

    let dy = delta_derivative(y)?;
    let g = dy.zip_with(y, |d, v| d - roots.lambda1 * v)?;
    let z_anchor = g[n - 1] - epsilon;
    let growth = exponential_profile(&l2, n - 1)?;
    let z = GridFunction::new(ts, growth.iter().map(|e| z_anchor * e).collect())?;

    let mu = ts.graininess_all();
    let u_anchor = y[n - 1] - epsilon;
    let factors: Vec<f64> = (0..n).map(|k| l1.factor(k)).collect();
    let zv = z.values();
    let u_values = exec.map_indices(n, |i| {
        // prod = e_{lambda1}(t_i, sigma(t_k)) for k = i, ..., n-2.
        let mut prod = 1.0;
        let mut acc = 0.0;
        for k in i..n - 1 {
            prod /= factors[k];
            acc += prod * zv[k] * mu[k];
        }
        u_anchor * prod - acc
    });
    let u = GridFunction::new(ts, u_values)?;

    let solution_residual = residual_second_order(&u, &p, &q, &zero)?;
    let sup_deviation = y.sup_distance(&u)?;

    let dz = delta_derivative(&z)?;
    let mut z_growth_residual = Residual::zero();
    let mut g_z_deviation = 0.0_f64;
    for i in 0..n - 1 {
        let terms = [dz[i], roots.lambda2 * z[i]];
        z_growth_residual.absorb(terms[0] - terms[1], &terms);
        g_z_deviation = g_z_deviation.max((g[i] - z[i]).abs());
    }
    let mag = joint_magnitude(y, &u);
    let terminal = TerminalDiagnostics {
        g_z_deviation,
        g_z_within_epsilon: g_z_deviation
            <= epsilon * (1.0 + tolerance::BOUND_SLACK) + tolerance::BOUND_FLOOR * joint_magnitude(&g, &z),
        deviation_within_epsilon: sup_deviation
            <= epsilon * (1.0 + tolerance::BOUND_SLACK) + tolerance::BOUND_FLOOR * mag,
        z_growth_residual,
    };

    let pass = solution_residual.within(tolerance::SOLUTION_RESIDUAL) && sup_deviation.is_finite();
    let certificate = StabilityCertificate {
        construction: Construction::TerminalAnchored,
        epsilon,
        analytic_constant: None,
        empirical_constant: empirical(sup_deviation, epsilon),
        sup_deviation,
        solution_residual,
        hypotheses: HypothesisFlags {
            roots: Some(roots),
            outside_theorem_hypotheses: !roots.both_positive,
            regressive: true,
            ..HypothesisFlags::default()
        },
        terminal: Some(terminal),
        verdict: Verdict::from_bool(pass),
    };
    Ok(Certification {
        solution: u,
        intermediate: z,
        certificate,
    })
}

/// Reduction of order shared by the root and Riccati factorizations.
///
/// The operator is `(D - inner)(D - outer)` in the sense that
/// `g = y^Delta - outer y` satisfies `g^Delta - inner g - f = Ly - f` at every
/// `i <= n-3`. The inner first-order problem therefore lives on the time
/// scale without its right endpoint; its solution `w` is extended by one
/// repeated value (never read by the outer solve) and the outer problem
/// `u^Delta = outer u + w`, `u(a) = y(a)` is solved on the full scale.
struct Factorization<'a> {
    y: &'a GridFunction,
    inner: &'a Coefficient,
    outer: &'a Coefficient,
    p: &'a GridFunction,
    q: &'a GridFunction,
    f: &'a GridFunction,
}

impl Factorization<'_> {
    fn certify(
        &self,
        construction: Construction,
        mut hypotheses: HypothesisFlags,
        exec: Execution,
    ) -> Result<Certification> {
        let y = self.y;
        let ts = y.timescale();
        let n = ts.len();
        self.inner.require_regressive(0..n - 2)?;
        self.outer.require_regressive(0..n - 1)?;
        let epsilon = residual_second_order(y, self.p, self.q, self.f)?.value;

        let dy = delta_derivative(y)?;
        let g = GridFunction::new(ts, (0..n).map(|i| dy[i] - self.outer[i] * y[i]).collect())?;

        let head = Arc::new(ts.prefix(n - 1)?);
        let inner_head = self.inner.restrict(&head)?;
        let inner =
            certify_first_order_with(&g.restrict(&head)?, &inner_head, &self.f.restrict(&head)?, exec)?;
        let inner_constant = inner
            .certificate
            .analytic_constant
            .expect("first-order certificates carry a lemma constant");

        let mut w_values = inner.solution.into_values();
        w_values.push(w_values[n - 2]);
        let w = GridFunction::new(ts, w_values)?;
        let u = solve_first_order_ivp_with(self.outer, &w, y[0], exec)?;
        let outer_constant = lemma_constant(self.outer)?.value;
        let analytic = inner_constant * outer_constant;

        let solution_residual = residual_second_order(&u, self.p, self.q, self.f)?;
        let sup_deviation = y.sup_distance(&u)?;
        let pass = solution_residual.within(tolerance::SOLUTION_RESIDUAL)
            && bound_holds(sup_deviation, analytic, epsilon, joint_magnitude(y, &u));

        hypotheses.regressive = true;
        hypotheses.inner_constant = Some(inner_constant);
        hypotheses.outer_constant = Some(outer_constant);
        let certificate = StabilityCertificate {
            construction,
            epsilon,
            analytic_constant: Some(analytic),
            empirical_constant: empirical(sup_deviation, epsilon),
            sup_deviation,
            solution_residual,
            hypotheses,
            terminal: None,
            verdict: Verdict::from_bool(pass),
        };
        Ok(Certification {
            solution: u,
            intermediate: w,
            certificate,
        })
    }
}

/// Certificate for `x^DD + alpha x^D + beta x = f` through the factorization
/// `g = y^Delta - lambda1 y`, `g^Delta - lambda2 g = f + defect`.
pub fn certify_second_order_icc(
    y: &GridFunction,
    alpha: f64,
    beta: f64,
    f: &GridFunction,
) -> Result<Certification> {
    certify_second_order_icc_with(y, alpha, beta, f, Execution::default())
}

pub fn certify_second_order_icc_with(
    y: &GridFunction,
    alpha: f64,
    beta: f64,
    f: &GridFunction,
    exec: Execution,
) -> Result<Certification> {
    y.ensure_aligned(f)?;
    let ts = y.timescale();
    ts.require_len(3)?;
    let roots = certified_roots(alpha, beta)?;
    let (p, q) = constant_coefficients(ts, alpha, beta)?;
    let inner = Coefficient::constant(ts, roots.lambda2)?;
    let outer = Coefficient::constant(ts, roots.lambda1)?;
    Factorization {
        y,
        inner: &inner,
        outer: &outer,
        p: &p,
        q: &q,
        f,
    }
    .certify(
        Construction::RootFactorization,
        HypothesisFlags {
            roots: Some(roots),
            outside_theorem_hypotheses: !roots.both_positive,
            ..HypothesisFlags::default()
        },
        exec,
    )
}

/// The homogeneous constant-coefficient equation through the root
/// factorization, which unlike [`certify_second_order_cc`] carries an
/// analytic constant.
pub fn certify_second_order_cc_factored(y: &GridFunction, alpha: f64, beta: f64) -> Result<Certification> {
    certify_second_order_icc(y, alpha, beta, &GridFunction::zeros(y.timescale()))
}

/// `d = z^sigma - p`, with `z(b)` standing in for `z^sigma(b)`.
pub fn riccati_inner_coefficient(z: &GridFunction, p: &GridFunction) -> Result<Coefficient> {
    Ok(Coefficient::new(z.shifted().zip_with(p, |zs, pv| zs - pv)?))
}

/// Certificate for `x^DD + p x^D + q x = f` through a Riccati solution `z`:
/// `g = y^Delta + z y` satisfies `g^Delta - (z^sigma - p) g = f + defect`,
/// and `u^Delta = -z u + w` with `u(a) = y(a)`.
pub fn certify_second_order_ivc(
    y: &GridFunction,
    p: &GridFunction,
    q: &GridFunction,
    f: &GridFunction,
    riccati: &RiccatiSolution,
) -> Result<Certification> {
    certify_second_order_ivc_with(y, p, q, f, riccati, Execution::default())
}

pub fn certify_second_order_ivc_with(
    y: &GridFunction,
    p: &GridFunction,
    q: &GridFunction,
    f: &GridFunction,
    riccati: &RiccatiSolution,
    exec: Execution,
) -> Result<Certification> {
    for g in [p, q, f, &riccati.z] {
        y.ensure_aligned(g)?;
    }
    y.timescale().require_len(3)?;
    riccati.check_conditions()?;
    if !riccati.residual.within(tolerance::RICCATI_RESIDUAL) {
        return Err(Error::RiccatiResidual {
            residual: riccati.residual.value,
            tolerance: tolerance::RICCATI_RESIDUAL * riccati.residual.scale,
        });
    }
    let inner = riccati_inner_coefficient(&riccati.z, p)?;
    let outer = Coefficient::new(riccati.z.map(|z| -z)?);
    Factorization {
        y,
        inner: &inner,
        outer: &outer,
        p,
        q,
        f,
    }
    .certify(
        Construction::RiccatiFactorization,
        HypothesisFlags {
            riccati_cond1: Some(riccati.cond1_ok),
            riccati_cond2: Some(riccati.cond2_ok),
            ..HypothesisFlags::default()
        },
        exec,
    )
}

/// Max over `i <= n-3` of
/// `|(u^DD + p u^D + q u - f) - d (w - u^D - z u)|` with `d = z^sigma - p`.
///
/// The two sides agree whenever `z` solves the Riccati equation, `w` solves
/// `w^Delta = d w + f` and `u^Delta + z u - w` is constant; in general the
/// difference equals the delta derivative of `u^Delta + z u - w`.
pub fn closing_identity_check(
    u: &GridFunction,
    w: &GridFunction,
    z: &GridFunction,
    p: &GridFunction,
    q: &GridFunction,
    f: &GridFunction,
) -> Result<Residual> {
    for g in [w, z, p, q, f] {
        u.ensure_aligned(g)?;
    }
    u.timescale().require_len(3)?;
    let du = delta_derivative(u)?;
    let ddu = delta_derivative(&du)?;
    let d = riccati_inner_coefficient(z, p)?;
    let mut res = Residual::zero();
    for i in 0..u.len() - 2 {
        let lhs_terms = [ddu[i], p[i] * du[i], q[i] * u[i], f[i]];
        let lhs = lhs_terms[0] + lhs_terms[1] + lhs_terms[2] - lhs_terms[3];
        let bracket = [w[i], du[i], z[i] * u[i]];
        let rhs = d[i] * (bracket[0] - bracket[1] - bracket[2]);
        let scaled: Vec<f64> = bracket.iter().map(|b| d[i] * b).chain(lhs_terms).collect();
        res.absorb(lhs - rhs, &scaled);
    }
    Ok(res)
}

impl EquationSpec {
    /// Dispatches `y` to the certifier matching the equation's form.
    pub fn certify(&self, y: &GridFunction) -> Result<Certification> {
        self.certify_with(y, Execution::default())
    }

    pub fn certify_with(&self, y: &GridFunction, exec: Execution) -> Result<Certification> {
        match self.equation() {
            Equation::FirstOrder { d, f } => certify_first_order_with(y, d, f, exec),
            Equation::ConstantCoefficients {
                alpha,
                beta,
                forcing: None,
            } => certify_second_order_cc_with(y, *alpha, *beta, exec),
            Equation::ConstantCoefficients {
                alpha,
                beta,
                forcing: Some(f),
            } => certify_second_order_icc_with(y, *alpha, *beta, f, exec),
            Equation::VariableCoefficients { p, q, f, riccati } => {
                certify_second_order_ivc_with(y, p, q, f, riccati, exec)
            }
        }
    }
}
