//! Time-scale families, controlled perturbations of exact solutions and
//! randomized certification campaigns.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridFunction;
use crate::rng::SplitMix64;
use crate::solvers::{recurrence_oracle_second_order, Equation, EquationSpec};
use crate::stability::Verdict;
use crate::timescale::TimeScale;

/// A parametrized family of finite time scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScaleFamily {
    /// `{a, a+h, a+2h, ...}` up to and including `b` when it is hit.
    Uniform {
        a: f64,
        b: f64,
        h: f64,
    },
    /// `{t0, t0 q, ..., t0 q^(n-1)}`.
    QScale {
        t0: f64,
        q: f64,
        n: usize,
    },
    /// `n` equally spaced samples of the interval `[a, b]`, endpoints included.
    Sample {
        a: f64,
        b: f64,
        n: usize,
    },
    Points(Vec<f64>),
    /// Concatenation of segments; the result must stay strictly increasing.
    Mixed(Vec<TimeScaleFamily>),
}

impl TimeScaleFamily {
    fn points(&self) -> Result<Vec<f64>> {
        let invalid = |msg: String| Err(Error::InvalidFamily(msg));
        match *self {
            TimeScaleFamily::Uniform { a, b, h } => {
                if !(h > 0.0 && h.is_finite() && a.is_finite() && b.is_finite()) {
                    return invalid(format!("uniform needs finite a, b and h > 0 (h = {h})"));
                }
                if b < a {
                    return invalid(format!("uniform needs a <= b ({a} > {b})"));
                }
                let steps = ((b - a) / h + 1e-9).floor() as usize;
                Ok((0..=steps).map(|k| a + k as f64 * h).collect())
            }
            TimeScaleFamily::QScale { t0, q, n } => {
                if !(t0 > 0.0 && t0.is_finite() && q > 1.0 && q.is_finite()) || n < 2 {
                    return invalid(format!(
                        "q_scale needs t0 > 0, q > 1, n >= 2 (t0 = {t0}, q = {q}, n = {n})"
                    ));
                }
                Ok((0..n).map(|k| t0 * q.powi(k as i32)).collect())
            }
            TimeScaleFamily::Sample { a, b, n } => {
                if !(a.is_finite() && b.is_finite() && b > a) || n < 2 {
                    return invalid(format!(
                        "sample needs a < b and n >= 2 (a = {a}, b = {b}, n = {n})"
                    ));
                }
                let last = (n - 1) as f64;
                Ok((0..n)
                    .map(|k| {
                        if k + 1 == n {
                            b
                        } else {
                            a + (b - a) * k as f64 / last
                        }
                    })
                    .collect())
            }
            TimeScaleFamily::Points(ref pts) => Ok(pts.clone()),
            TimeScaleFamily::Mixed(ref segments) => {
                if segments.is_empty() {
                    return invalid("mixed needs at least one segment".into());
                }
                let mut out = Vec::new();
                for seg in segments {
                    out.extend(seg.points()?);
                }
                Ok(out)
            }
        }
    }
}

/// Instantiates a family as a validated time scale.
pub fn make_timescale(family: &TimeScaleFamily) -> Result<TimeScale> {
    TimeScale::new(family.points()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Independent uniform offsets in `[-m, m]` at every point.
    PointwiseUniform,
    /// One offset of exactly `+-m` at a random interior point.
    SingleSpike,
    /// A Gaussian bump of height `m` at a random centre.
    SmoothBump,
    /// Defects of size at most `m` (one of them exactly `m`) added as extra
    /// forcing, so the residual of the result is exactly `m`.
    ResidualTargeted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub magnitude: f64,
    pub seed: u64,
    #[serde(default)]
    pub pin_endpoints: bool,
}

impl PerturbationSpec {
    pub fn new(kind: PerturbationKind, magnitude: f64, seed: u64, pin_endpoints: bool) -> Self {
        PerturbationSpec {
            kind,
            magnitude,
            seed,
            pin_endpoints,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        PerturbationSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.magnitude >= 0.0 && self.magnitude.is_finite()) {
            return Err(Error::InvalidPerturbation(format!(
                "magnitude must be finite and non-negative, got {}",
                self.magnitude
            )));
        }
        Ok(())
    }
}

/// Builds an approximate solution from `exact` (the solution of `eq`
/// through its initial data). Deterministic in `(exact, spec)`.
///
/// With `pin_endpoints` the initial data (`y[0]`, plus `y[1]` for second
/// order) keep their exact values.
pub fn perturb(exact: &GridFunction, spec: &PerturbationSpec, eq: &EquationSpec) -> Result<GridFunction> {
    spec.validate()?;
    exact.ensure_aligned(&GridFunction::zeros(eq.timescale()))?;
    let m = spec.magnitude;
    if m == 0.0 {
        return Ok(exact.clone());
    }
    let ts = exact.timescale();
    let n = ts.len();
    let pinned = if spec.pin_endpoints { eq.order() } else { 0 };
    let mut rng = SplitMix64::new(spec.seed);
    let x = exact.values();

    let values = match spec.kind {
        PerturbationKind::PointwiseUniform => (0..n)
            .map(|i| {
                let off = rng.uniform(-m, m);
                if i < pinned {
                    x[i]
                } else {
                    x[i] + off
                }
            })
            .collect(),
        PerturbationKind::SingleSpike => {
            let lo = pinned.max(1);
            if lo >= n - 1 {
                return Err(Error::InvalidPerturbation(format!(
                    "no free interior point for a spike on {n} points"
                )));
            }
            let k = rng.index(lo, n - 1);
            let mut v = x.to_vec();
            v[k] += rng.sign() * m;
            v
        }
        PerturbationKind::SmoothBump => {
            let (a, b) = (ts.start(), ts.end());
            let centre = rng.uniform(a, b);
            let width = (b - a) * rng.uniform(0.1, 0.3);
            let sign = rng.sign();
            let pts = ts.points();
            (0..n)
                .map(|i| {
                    if i < pinned {
                        x[i]
                    } else {
                        let s = (pts[i] - centre) / width;
                        x[i] + sign * m * (-s * s).exp()
                    }
                })
                .collect()
        }
        PerturbationKind::ResidualTargeted => return residual_targeted(exact, m, pinned, &mut rng, eq),
    };
    GridFunction::new(ts, values)
}

fn defects(count: usize, m: f64, rng: &mut SplitMix64) -> Vec<f64> {
    let mut delta: Vec<f64> = (0..count).map(|_| m * rng.uniform(-1.0, 1.0)).collect();
    let k = rng.index(0, count);
    delta[k] = rng.sign() * m;
    delta
}

fn residual_targeted(
    exact: &GridFunction,
    m: f64,
    pinned: usize,
    rng: &mut SplitMix64,
    eq: &EquationSpec,
) -> Result<GridFunction> {
    let ts: &Arc<TimeScale> = exact.timescale();
    let n = ts.len();
    let mut start = [exact[0], exact[1]];
    for (i, s) in start.iter_mut().enumerate().take(eq.order()) {
        let off = rng.uniform(-m, m);
        if i >= pinned {
            *s += off;
        }
    }
    match eq.equation() {
        Equation::FirstOrder { d, f } => {
            let delta = defects(n - 1, m, rng);
            let mu = ts.graininess_all();
            let mut y = vec![start[0]; n];
            for i in 0..n - 1 {
                y[i + 1] = y[i] + mu[i] * (d[i] * y[i] + f[i] + delta[i]);
            }
            GridFunction::new(ts, y)
        }
        _ => {
            let (p, q, f) = eq.second_order_coefficients().ok_or(Error::MisalignedGrids)?;
            let mut delta = defects(n - 2, m, rng);
            delta.extend([0.0, 0.0]);
            let forced = GridFunction::new(ts, f.values().iter().zip(&delta).map(|(a, b)| a + b).collect())?;
            recurrence_oracle_second_order(&p, &q, &forced, start[0], start[1])
        }
    }
}

/// One certified trial of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub epsilon: f64,
    pub analytic_constant: Option<f64>,
    pub empirical_constant: f64,
    pub sup_deviation: f64,
    pub solution_residual: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub trials: usize,
    pub pass_count: usize,
    pub max_empirical_constant: f64,
    pub max_analytic_constant: Option<f64>,
    /// Seed of the first trial attaining `max_empirical_constant`.
    pub worst_trial_seed: u64,
    pub rows: Vec<TrialRow>,
}

impl CampaignReport {
    pub fn all_pass(&self) -> bool {
        self.pass_count == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("trial with seed {seed} failed: {source}")]
pub struct CampaignError {
    pub seed: u64,
    #[source]
    pub source: Error,
}

/// Runs `trials` certifications with seeds `seed, seed+1, ...`.
pub fn run_campaign(
    eq: &EquationSpec,
    pert: &PerturbationSpec,
    trials: usize,
) -> std::result::Result<CampaignReport, CampaignError> {
    run_campaign_with(eq, pert, trials, Execution::default())
}

/// As [`run_campaign`]; trials are scheduled by `exec` and the report does
/// not depend on the schedule.
pub fn run_campaign_with(
    eq: &EquationSpec,
    pert: &PerturbationSpec,
    trials: usize,
    exec: Execution,
) -> std::result::Result<CampaignReport, CampaignError> {
    let exact = eq.exact_solution().map_err(|source| CampaignError {
        seed: pert.seed,
        source,
    })?;
    let results = exec.map_coarse(trials, |t| {
        let seed = pert.seed.wrapping_add(t as u64);
        let run = || -> Result<TrialRow> {
            let y = perturb(&exact, &pert.with_seed(seed), eq)?;
            let c = eq.certify_with(&y, Execution::Sequential)?.certificate;
            Ok(TrialRow {
                seed,
                epsilon: c.epsilon,
                analytic_constant: c.analytic_constant,
                empirical_constant: c.empirical_constant,
                sup_deviation: c.sup_deviation,
                solution_residual: c.solution_residual.value,
                verdict: c.verdict,
            })
        };
        run().map_err(|source| CampaignError { seed, source })
    });
    let rows = results.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;

    let mut report = CampaignReport {
        trials,
        pass_count: rows.iter().filter(|r| r.verdict.is_pass()).count(),
        max_empirical_constant: 0.0,
        max_analytic_constant: None,
        worst_trial_seed: pert.seed,
        rows: Vec::new(),
    };
    for row in &rows {
        if row.empirical_constant > report.max_empirical_constant {
            report.max_empirical_constant = row.empirical_constant;
            report.worst_trial_seed = row.seed;
        }
        if let Some(k) = row.analytic_constant {
            report.max_analytic_constant = Some(report.max_analytic_constant.map_or(k, |m| m.max(k)));
        }
    }
    report.rows = rows;
    Ok(report)
}
