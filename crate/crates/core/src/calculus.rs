//! Delta calculus on isolated time scales.
//!
//! On isolated points every operation is closed-form arithmetic:
//! `f^Delta(t) = (f(sigma(t)) - f(t)) / mu(t)`, the delta integral is a
//! graininess-weighted sum, and the generalized exponential is a product of
//! `1 + mu p` factors.

use crate::error::{Error, Result};
use crate::grid::{Coefficient, GridFunction};
use crate::timescale::TimeScale;

/// Forward jump `sigma(t_i)`.
pub fn sigma(ts: &TimeScale, i: usize) -> Result<f64> {
    ts.sigma(i)
}

/// Graininess `mu(t_i)`.
pub fn graininess(ts: &TimeScale, i: usize) -> Result<f64> {
    ts.graininess(i)
}

/// Delta derivative. The right endpoint has no forward difference; it
/// repeats the last interior value so the result stays aligned.
pub fn delta_derivative(f: &GridFunction) -> Result<GridFunction> {
    let ts = f.timescale();
    ts.require_len(2)?;
    let mu = ts.graininess_all();
    let v = f.values();
    let n = v.len();
    let mut out: Vec<f64> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / mu[i]).collect();
    out.push(out[n - 2]);
    GridFunction::new(ts, out)
}

/// Delta integral of `f` from `t_start` to `t_end`.
pub fn delta_integral(f: &GridFunction, start: usize, end: usize) -> Result<f64> {
    let n = f.len();
    if end >= n {
        return Err(Error::IndexOutOfRange { index: end, len: n });
    }
    if start > end {
        return Err(Error::ReversedInterval { start, end });
    }
    let mu = f.timescale().graininess_all();
    Ok((start..end).map(|k| mu[k] * f[k]).sum())
}

/// Additive inverse in the regressive group, `-p / (1 + mu p)`.
pub fn circle_minus(p: &Coefficient) -> Result<Coefficient> {
    p.require_regressive(0..p.len())?;
    let values = (0..p.len()).map(|i| -p[i] / p.factor(i)).collect();
    Ok(Coefficient::new(GridFunction::new(p.timescale(), values)?))
}

/// Generalized exponential `e_p(t_i, t_j)`.
///
/// For `i >= j` this is the product of `1 + mu(t_k) p(t_k)` over
/// `j <= k < i`; for `i < j` it is the reciprocal of `e_p(t_j, t_i)`.
pub fn ts_exponential(p: &Coefficient, i: usize, j: usize) -> Result<f64> {
    let n = p.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    let (lo, hi) = (i.min(j), i.max(j));
    p.require_regressive(lo..hi)?;
    let product: f64 = (lo..hi).map(|k| p.factor(k)).product();
    Ok(if i >= j { product } else { 1.0 / product })
}

/// `e_p(t_i, t_anchor)` for every index `i`, accumulated outward from the
/// anchor in O(n).
pub fn exponential_profile(p: &Coefficient, anchor: usize) -> Result<Vec<f64>> {
    let n = p.len();
    if anchor >= n {
        return Err(Error::IndexOutOfRange {
            index: anchor,
            len: n,
        });
    }
    p.require_regressive(0..n - 1)?;
    let mut out = vec![0.0; n];
    out[anchor] = 1.0;
    for i in anchor..n - 1 {
        out[i + 1] = out[i] * p.factor(i);
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] / p.factor(i);
    }
    if let Some(index) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid(points: &[f64]) -> Arc<TimeScale> {
        Arc::new(TimeScale::new(points.to_vec()).unwrap())
    }

    fn z_grid(n: usize) -> Arc<TimeScale> {
        grid(&(0..n).map(|k| k as f64).collect::<Vec<_>>())
    }

    #[test]
    fn derivative_of_square_on_integers() {
        let ts = z_grid(4);
        let f = GridFunction::from_fn(&ts, |t| t * t).unwrap();
        assert_eq!(delta_derivative(&f).unwrap().values(), &[1.0, 3.0, 5.0, 5.0]);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let ts = grid(&[0.0, 0.3, 1.0, 2.5]);
        let f = GridFunction::constant(&ts, 4.2).unwrap();
        assert!(delta_derivative(&f).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn power_of_two_is_its_own_derivative() {
        let ts = z_grid(6);
        let f = GridFunction::from_fn(&ts, |t| 2f64.powf(t)).unwrap();
        let df = delta_derivative(&f).unwrap();
        // Forward difference of 2^t at t is 2^{t+1} - 2^t = 2^t; the endpoint
        // copies the value at t = 4.
        for i in 0..5 {
            assert_eq!(df[i], f[i]);
        }
        assert_eq!(df[5], 16.0);
    }

    #[test]
    fn integral_examples() {
        let ts = grid(&[0.0, 1.0, 3.0]);
        let one = GridFunction::constant(&ts, 1.0).unwrap();
        assert_eq!(delta_integral(&one, 0, 2).unwrap(), 3.0);
        assert_eq!(delta_integral(&one, 1, 1).unwrap(), 0.0);
        assert_eq!(
            delta_integral(&one, 2, 1),
            Err(Error::ReversedInterval { start: 2, end: 1 })
        );

        let ts = z_grid(5);
        let t = GridFunction::from_fn(&ts, |t| t).unwrap();
        let brute: f64 = (0..4).map(|k| k as f64).sum();
        assert_eq!(delta_integral(&t, 0, 4).unwrap(), brute);
    }

    #[test]
    fn circle_minus_examples() {
        let ts = z_grid(4);
        let one = Coefficient::constant(&ts, 1.0).unwrap();
        assert_eq!(circle_minus(&one).unwrap().values(), &[-0.5, -0.5, -0.5, -1.0]);
        let zero = Coefficient::constant(&ts, 0.0).unwrap();
        assert!(circle_minus(&zero).unwrap().values().iter().all(|&v| v == 0.0));
        let two = Coefficient::constant(&ts, 2.0).unwrap();
        let m = circle_minus(&two).unwrap();
        for i in 0..3 {
            assert!((m[i] + 2.0 / 3.0).abs() < 1e-15);
        }
        let bad = Coefficient::constant(&ts, -1.0).unwrap();
        assert!(matches!(circle_minus(&bad), Err(Error::NonRegressive { .. })));
    }

    #[test]
    fn exponential_examples() {
        let ts = z_grid(4);
        let two = Coefficient::constant(&ts, 2.0).unwrap();
        assert_eq!(ts_exponential(&two, 2, 2).unwrap(), 1.0);
        let brute: f64 = (0..3).map(|_| 1.0 + 1.0 * 2.0).product();
        assert_eq!(ts_exponential(&two, 3, 0).unwrap(), brute);
        assert_eq!(ts_exponential(&two, 0, 3).unwrap(), 1.0 / 27.0);

        let q = grid(&[1.0, 2.0, 4.0, 8.0]);
        let one = Coefficient::constant(&q, 1.0).unwrap();
        let brute = (1.0 + 1.0) * (1.0 + 2.0) * (1.0 + 4.0);
        assert_eq!(ts_exponential(&one, 3, 0).unwrap(), brute);
        assert_eq!(brute, 30.0);
    }

    #[test]
    fn exponential_rejects_vanishing_factor() {
        let ts = z_grid(5);
        let mut v = vec![0.5; 5];
        v[2] = -1.0;
        let p = Coefficient::new(GridFunction::new(&ts, v).unwrap());
        assert!(matches!(
            ts_exponential(&p, 4, 0),
            Err(Error::NonRegressive { index: 2, .. })
        ));
        // The bad factor lies outside [0, 2).
        assert_eq!(ts_exponential(&p, 2, 0).unwrap(), 2.25);
    }

    #[test]
    fn profile_matches_pointwise_exponential() {
        let ts = grid(&[0.0, 0.5, 0.7, 1.5, 3.0]);
        let p = Coefficient::new(GridFunction::new(&ts, vec![0.3, -1.2, 2.0, -0.1, 0.0]).unwrap());
        let prof = exponential_profile(&p, 2).unwrap();
        for (i, e) in prof.iter().enumerate() {
            let direct = ts_exponential(&p, i, 2).unwrap();
            assert!((e - direct).abs() <= 1e-14 * direct.abs());
        }
    }
}
