//! Exact solvers for linear dynamic equations on isolated time scales.

use std::sync::Arc;

use serde::Serialize;

use crate::calculus::delta_derivative;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Coefficient, GridFunction};
use crate::timescale::TimeScale;
use crate::tolerance::{self, magnitude};

/// Real roots of `lambda^2 + alpha lambda + beta = 0`, ascending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicRoots {
    pub lambda1: f64,
    pub lambda2: f64,
    pub distinct: bool,
    pub both_positive: bool,
}

/// Solves the characteristic equation with the cancellation-free form of the
/// quadratic formula. Complex roots are an error; a double root is reported
/// with `distinct == false`.
pub fn characteristic_roots(alpha: f64, beta: f64) -> Result<CharacteristicRoots> {
    let mut disc = alpha * alpha - 4.0 * beta;
    let tol = tolerance::DISCRIMINANT * (alpha * alpha).max((4.0 * beta).abs()).max(1.0);
    if disc < -tol {
        return Err(Error::ComplexRoots { discriminant: disc });
    }
    disc = disc.max(0.0);
    let sq = disc.sqrt();
    let big = if alpha >= 0.0 {
        -0.5 * (alpha + sq)
    } else {
        0.5 * (sq - alpha)
    };
    let small = if big != 0.0 { beta / big } else { 0.0 };
    let (lambda1, lambda2) = if big <= small { (big, small) } else { (small, big) };
    let sep = tolerance::ROOT_SEPARATION * lambda1.abs().max(lambda2.abs()).max(1.0);
    Ok(CharacteristicRoots {
        lambda1,
        lambda2,
        distinct: (lambda2 - lambda1).abs() > sep,
        both_positive: lambda1 > 0.0 && lambda2 > 0.0,
    })
}

/// Solution of `x^Delta = d x + f`, `x(a) = x0`, by variation of constants:
///
/// `x(t_i) = e_d(t_i, a) x0 + sum_{k<i} e_d(t_i, sigma(t_k)) f(t_k) mu(t_k)`.
pub fn solve_first_order_ivp(d: &Coefficient, f: &GridFunction, x0: f64) -> Result<GridFunction> {
    solve_first_order_ivp_with(d, f, x0, Execution::default())
}

pub fn solve_first_order_ivp_with(
    d: &Coefficient,
    f: &GridFunction,
    x0: f64,
    exec: Execution,
) -> Result<GridFunction> {
    d.function().ensure_aligned(f)?;
    let ts = d.timescale();
    let n = ts.len();
    d.require_regressive(0..n - 1)?;
    let mu = ts.graininess_all();
    let factors: Vec<f64> = (0..n).map(|k| d.factor(k)).collect();
    let fv = f.values();
    let values = exec.map_indices(n, |i| {
        // Walk s = t_{i-1}, ..., t_0 keeping prod = e_d(t_i, sigma(s)).
        let mut prod = 1.0;
        let mut acc = 0.0;
        for k in (0..i).rev() {
            acc += prod * fv[k] * mu[k];
            prod *= factors[k];
        }
        prod * x0 + acc
    });
    GridFunction::new(ts, values)
}

/// Max of `|x^Delta - d x - f|` over `i <= n-2`, with the magnitude of the
/// combined terms.
pub fn residual_first_order(x: &GridFunction, d: &Coefficient, f: &GridFunction) -> Result<Residual> {
    x.ensure_aligned(d.function())?;
    x.ensure_aligned(f)?;
    let dx = delta_derivative(x)?;
    let n = x.len();
    let mut res = Residual::zero();
    for i in 0..n - 1 {
        let terms = [dx[i], d[i] * x[i], f[i]];
        res.absorb(terms[0] - terms[1] - terms[2], &terms);
    }
    Ok(res)
}

/// A sup-norm defect together with the magnitude of the terms it was
/// computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub(crate) fn zero() -> Self {
        Residual {
            value: 0.0,
            scale: 1.0,
        }
    }

    pub(crate) fn absorb(&mut self, defect: f64, terms: &[f64]) {
        self.value = self.value.max(defect.abs());
        self.scale = self.scale.max(magnitude(terms));
    }

    /// `value <= rel * scale`.
    pub fn within(&self, rel: f64) -> bool {
        self.value <= rel * self.scale
    }
}

/// Max of `|y^DD + p y^D + q y - f|` over `i <= n-3` (the indices where the
/// second delta derivative only uses grid values).
pub fn residual_second_order(
    y: &GridFunction,
    p: &GridFunction,
    q: &GridFunction,
    f: &GridFunction,
) -> Result<Residual> {
    for g in [p, q, f] {
        y.ensure_aligned(g)?;
    }
    y.timescale().require_len(3)?;
    let dy = delta_derivative(y)?;
    let ddy = delta_derivative(&dy)?;
    let mut res = Residual::zero();
    for i in 0..y.len() - 2 {
        let terms = [ddy[i], p[i] * dy[i], q[i] * y[i], f[i]];
        res.absorb(terms[0] + terms[1] + terms[2] - terms[3], &terms);
    }
    Ok(res)
}

/// Forward three-term recurrence for `x^DD + p x^D + q x = f` from `x(t_0)`
/// and `x(t_1)`.
///
/// Writing `x^D(t_i) = (x_{i+1} - x_i)/mu_i` and
/// `x^DD(t_i) = (x^D(t_{i+1}) - x^D(t_i))/mu_i`, the equation at `t_i` gives
/// `x_{i+2} = x_{i+1} + mu_{i+1} (x^D(t_i) + mu_i (f_i - p_i x^D(t_i) - q_i x_i))`.
pub fn recurrence_oracle_second_order(
    p: &GridFunction,
    q: &GridFunction,
    f: &GridFunction,
    x0: f64,
    x1: f64,
) -> Result<GridFunction> {
    p.ensure_aligned(q)?;
    p.ensure_aligned(f)?;
    let ts = p.timescale();
    ts.require_len(3)?;
    let mu = ts.graininess_all();
    let n = ts.len();
    let mut x = vec![0.0; n];
    x[0] = x0;
    x[1] = x1;
    for i in 0..n - 2 {
        let dx = (x[i + 1] - x[i]) / mu[i];
        let ddx = f[i] - p[i] * dx - q[i] * x[i];
        x[i + 2] = x[i + 1] + mu[i + 1] * (dx + mu[i] * ddx);
    }
    GridFunction::new(ts, x)
}

/// A particular solution of `z^Delta + p z - z z^sigma = q` with the
/// factorization conditions checked pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    pub z: GridFunction,
    /// `1 + mu (z^sigma - p) != 0` at every `i <= n-2`.
    pub cond1_ok: bool,
    /// `1 - mu z != 0` everywhere.
    pub cond2_ok: bool,
    /// Max Riccati defect over `i <= n-2`.
    pub residual: Residual,
    first_violation: Option<(usize, &'static str)>,
}

impl RiccatiSolution {
    /// Evaluates an explicitly given `z` against the coefficients.
    pub fn from_values(z: GridFunction, p: &GridFunction, q: &GridFunction) -> Result<Self> {
        z.ensure_aligned(p)?;
        z.ensure_aligned(q)?;
        let ts = z.timescale();
        let mu = ts.graininess_all();
        let n = z.len();
        let dz = delta_derivative(&z)?;
        let mut residual = Residual::zero();
        let mut first_violation = None;
        let mut cond1_ok = true;
        let mut cond2_ok = true;
        for i in 0..n {
            if i + 1 < n {
                let terms = [dz[i], p[i] * z[i], z[i] * z[i + 1], q[i]];
                residual.absorb(terms[0] + terms[1] - terms[2] - terms[3], &terms);
                if !tolerance::is_regressive_factor(mu[i] * (z[i + 1] - p[i])) {
                    cond1_ok = false;
                    first_violation.get_or_insert((i, "1 + mu*(z^sigma - p) = 0"));
                }
            }
            if !tolerance::is_regressive_factor(-mu[i] * z[i]) {
                cond2_ok = false;
                first_violation.get_or_insert((i, "1 - mu*z = 0"));
            }
        }
        Ok(RiccatiSolution {
            z,
            cond1_ok,
            cond2_ok,
            residual,
            first_violation,
        })
    }

    /// Fails at the first index violating either factorization condition.
    pub fn check_conditions(&self) -> Result<()> {
        match self.first_violation {
            Some((index, condition)) => Err(Error::RiccatiCondition { index, condition }),
            None => Ok(()),
        }
    }
}

/// Solves the Riccati equation forward from `z(t_0) = z0`:
/// `z_{i+1} = (mu_i q_i - mu_i p_i z_i + z_i) / (1 - mu_i z_i)`.
pub fn riccati_forward(p: &GridFunction, q: &GridFunction, z0: f64) -> Result<RiccatiSolution> {
    p.ensure_aligned(q)?;
    let ts = p.timescale();
    ts.require_len(2)?;
    let mu = ts.graininess_all();
    let n = ts.len();
    let mut z = vec![0.0; n];
    z[0] = z0;
    for i in 0..n - 1 {
        let m = mu[i];
        if !tolerance::is_regressive_factor(-m * z[i]) {
            return Err(Error::RiccatiBreakdown { index: i });
        }
        z[i + 1] = (m * q[i] - m * p[i] * z[i] + z[i]) / (1.0 - m * z[i]);
    }
    if !tolerance::is_regressive_factor(-mu[n - 1] * z[n - 1]) {
        return Err(Error::RiccatiBreakdown { index: n - 1 });
    }
    RiccatiSolution::from_values(GridFunction::new(ts, z)?, p, q)
}

/// Default seed `z(a) = -lambda1` from the coefficients frozen at `t_0`.
/// Exact for constant coefficients.
pub fn suggested_riccati_seed(p: &GridFunction, q: &GridFunction) -> Result<f64> {
    Ok(-characteristic_roots(p[0], q[0])?.lambda1)
}

/// A first- or second-order linear dynamic equation with the initial data of
/// its reference solution.
#[derive(Debug, Clone)]
pub struct EquationSpec {
    timescale: Arc<TimeScale>,
    equation: Equation,
    x0: f64,
    x1: f64,
}

#[derive(Debug, Clone)]
pub enum Equation {
    /// `x^Delta = d x + f`.
    FirstOrder { d: Coefficient, f: GridFunction },
    /// `x^DD + alpha x^D + beta x = f`. Without forcing the homogeneous
    /// terminal-anchored certifier is used; with forcing, the composed
    /// first-order certifier.
    ConstantCoefficients {
        alpha: f64,
        beta: f64,
        forcing: Option<GridFunction>,
    },
    /// `x^DD + p x^D + q x = f`, factored by a Riccati solution.
    VariableCoefficients {
        p: GridFunction,
        q: GridFunction,
        f: GridFunction,
        riccati: RiccatiSolution,
    },
}

impl EquationSpec {
    pub fn first_order(d: Coefficient, f: GridFunction, x0: f64) -> Result<Self> {
        d.function().ensure_aligned(&f)?;
        Ok(EquationSpec {
            timescale: Arc::clone(d.timescale()),
            equation: Equation::FirstOrder { d, f },
            x0,
            x1: f64::NAN,
        })
    }

    pub fn constant(
        timescale: &Arc<TimeScale>,
        alpha: f64,
        beta: f64,
        forcing: Option<GridFunction>,
        x0: f64,
        x1: f64,
    ) -> Result<Self> {
        timescale.require_len(3)?;
        if let Some(f) = &forcing {
            GridFunction::zeros(timescale).ensure_aligned(f)?;
        }
        Ok(EquationSpec {
            timescale: Arc::clone(timescale),
            equation: Equation::ConstantCoefficients { alpha, beta, forcing },
            x0,
            x1,
        })
    }

    pub fn variable(
        p: GridFunction,
        q: GridFunction,
        f: GridFunction,
        riccati: RiccatiSolution,
        x0: f64,
        x1: f64,
    ) -> Result<Self> {
        p.timescale().require_len(3)?;
        for g in [&q, &f, &riccati.z] {
            p.ensure_aligned(g)?;
        }
        Ok(EquationSpec {
            timescale: Arc::clone(p.timescale()),
            equation: Equation::VariableCoefficients { p, q, f, riccati },
            x0,
            x1,
        })
    }

    pub fn timescale(&self) -> &Arc<TimeScale> {
        &self.timescale
    }

    pub fn equation(&self) -> &Equation {
        &self.equation
    }

    pub fn order(&self) -> usize {
        match self.equation {
            Equation::FirstOrder { .. } => 1,
            _ => 2,
        }
    }

    pub fn initial_values(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    /// `(p, q, f)` of a second-order equation as grid functions.
    pub fn second_order_coefficients(&self) -> Option<(GridFunction, GridFunction, GridFunction)> {
        let ts = &self.timescale;
        match &self.equation {
            Equation::FirstOrder { .. } => None,
            Equation::ConstantCoefficients { alpha, beta, forcing } => Some((
                GridFunction::constant(ts, *alpha).ok()?,
                GridFunction::constant(ts, *beta).ok()?,
                forcing.clone().unwrap_or_else(|| GridFunction::zeros(ts)),
            )),
            Equation::VariableCoefficients { p, q, f, .. } => Some((p.clone(), q.clone(), f.clone())),
        }
    }

    /// The exact solution through the stored initial data.
    pub fn exact_solution(&self) -> Result<GridFunction> {
        match &self.equation {
            Equation::FirstOrder { d, f } => solve_first_order_ivp(d, f, self.x0),
            _ => {
                let (p, q, f) = self.second_order_coefficients().ok_or(Error::MisalignedGrids)?;
                recurrence_oracle_second_order(&p, &q, &f, self.x0, self.x1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_grid(n: usize) -> Arc<TimeScale> {
        Arc::new(TimeScale::new((0..n).map(|k| k as f64).collect()).unwrap())
    }

    #[test]
    fn roots_of_factored_quadratic() {
        let r = characteristic_roots(-3.0, 2.0).unwrap();
        assert_eq!((r.lambda1, r.lambda2), (1.0, 2.0));
        assert!(r.distinct && r.both_positive);
    }

    #[test]
    fn double_root_is_not_distinct() {
        let r = characteristic_roots(-2.0, 1.0).unwrap();
        assert_eq!((r.lambda1, r.lambda2), (1.0, 1.0));
        assert!(!r.distinct);
    }

    #[test]
    fn complex_roots_error() {
        assert!(matches!(
            characteristic_roots(0.0, 1.0),
            Err(Error::ComplexRoots { discriminant }) if discriminant == -4.0
        ));
    }

    #[test]
    fn mixed_sign_roots() {
        let r = characteristic_roots(1.0, -6.0).unwrap();
        assert_eq!((r.lambda1, r.lambda2), (-3.0, 2.0));
        assert!(r.distinct && !r.both_positive);
        let r = characteristic_roots(0.0, 0.0).unwrap();
        assert_eq!((r.lambda1, r.lambda2), (0.0, 0.0));
    }

    #[test]
    fn roots_reconstruct_coefficients() {
        for &(a, b) in &[(-3.0, 2.0), (-1e4, 1.0), (5.0, -2.5), (-0.3, 0.0225 - 1e-6)] {
            let r = characteristic_roots(a, b).unwrap();
            assert!(((-(r.lambda1 + r.lambda2)) - a).abs() <= 1e-12 * a.abs().max(1.0));
            assert!((r.lambda1 * r.lambda2 - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn first_order_ivp_examples() {
        let ts = z_grid(6);
        let d = Coefficient::constant(&ts, 1.0).unwrap();
        let w = solve_first_order_ivp(&d, &GridFunction::zeros(&ts), 1.0).unwrap();
        assert_eq!(w.values(), &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);

        let ts = z_grid(4);
        let d = Coefficient::constant(&ts, 0.0).unwrap();
        let one = GridFunction::constant(&ts, 1.0).unwrap();
        assert_eq!(
            solve_first_order_ivp(&d, &one, 0.0).unwrap().values(),
            &[0.0, 1.0, 2.0, 3.0]
        );
        let c = solve_first_order_ivp(&d, &GridFunction::zeros(&ts), 7.5).unwrap();
        assert!(c.values().iter().all(|&v| v == 7.5));
    }

    #[test]
    fn first_order_ivp_rejects_non_regressive() {
        let ts = z_grid(4);
        let d = Coefficient::constant(&ts, -1.0).unwrap();
        assert!(matches!(
            solve_first_order_ivp(&d, &GridFunction::zeros(&ts), 1.0),
            Err(Error::NonRegressive { index: 0, .. })
        ));
    }

    #[test]
    fn recurrence_examples() {
        let ts = z_grid(6);
        let p = GridFunction::constant(&ts, -3.0).unwrap();
        let q = GridFunction::constant(&ts, 2.0).unwrap();
        let zero = GridFunction::zeros(&ts);
        let x = recurrence_oracle_second_order(&p, &q, &zero, 1.0, 2.0).unwrap();
        assert_eq!(x.values(), &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
        let x = recurrence_oracle_second_order(&p, &q, &zero, 0.0, 0.0).unwrap();
        assert!(x.values().iter().all(|&v| v == 0.0));
        let x = recurrence_oracle_second_order(&zero, &zero, &zero, 1.0, 1.0).unwrap();
        assert!(x.values().iter().all(|&v| v == 1.0));
        assert!(recurrence_oracle_second_order(
            &GridFunction::zeros(&z_grid(2)),
            &GridFunction::zeros(&z_grid(2)),
            &GridFunction::zeros(&z_grid(2)),
            0.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn residual_of_exact_and_perturbed() {
        let ts = z_grid(8);
        let p = GridFunction::constant(&ts, -3.0).unwrap();
        let q = GridFunction::constant(&ts, 2.0).unwrap();
        let zero = GridFunction::zeros(&ts);
        let x = recurrence_oracle_second_order(&p, &q, &zero, 1.0, 2.0).unwrap();
        let r = residual_second_order(&x, &p, &q, &zero).unwrap();
        assert!(r.value <= 1e-12 * r.scale);
        assert_eq!(residual_second_order(&zero, &p, &q, &zero).unwrap().value, 0.0);

        // The defect is linear in the spike; evaluate it by brute force.
        let delta = 1e-3;
        let mut v = x.values().to_vec();
        v[3] += delta;
        let y = GridFunction::new(&ts, v).unwrap();
        let r = residual_second_order(&y, &p, &q, &zero).unwrap();
        let brute = (0..6)
            .map(|i| {
                let e = |k: usize| if k == 3 { delta } else { 0.0 };
                ((e(i + 2) - 2.0 * e(i + 1) + e(i)) - 3.0 * (e(i + 1) - e(i)) + 2.0 * e(i)).abs()
            })
            .fold(0.0_f64, f64::max);
        assert!((r.value - brute).abs() < 1e-12);
    }

    #[test]
    fn riccati_examples() {
        let ts = z_grid(8);
        let p = GridFunction::constant(&ts, -3.0).unwrap();
        let q = GridFunction::constant(&ts, 2.0).unwrap();
        let sol = riccati_forward(&p, &q, -1.0).unwrap();
        assert!(sol.z.values().iter().all(|&z| z == -1.0));
        assert!(sol.cond1_ok && sol.cond2_ok);
        assert_eq!(sol.residual.value, 0.0);
        assert_eq!(suggested_riccati_seed(&p, &q).unwrap(), -1.0);

        let zero = GridFunction::zeros(&ts);
        let sol = riccati_forward(&zero, &zero, 0.0).unwrap();
        assert!(sol.z.values().iter().all(|&z| z == 0.0));

        assert_eq!(
            riccati_forward(&zero, &zero, 1.0),
            Err(Error::RiccatiBreakdown { index: 0 })
        );
    }

    #[test]
    fn riccati_flags_for_inline_values() {
        let ts = z_grid(4);
        let p = GridFunction::constant(&ts, -3.0).unwrap();
        let q = GridFunction::constant(&ts, 2.0).unwrap();
        let z = GridFunction::new(&ts, vec![-1.0, 1.0, -1.0, -1.0]).unwrap();
        let sol = RiccatiSolution::from_values(z, &p, &q).unwrap();
        assert!(!sol.cond2_ok);
        assert!(sol.residual.value > 1.0);
        assert!(matches!(
            sol.check_conditions(),
            Err(Error::RiccatiCondition { index: 1, .. })
        ));
    }
}
