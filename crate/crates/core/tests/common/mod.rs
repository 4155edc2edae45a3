#![allow(dead_code)]

use std::sync::Arc;

use tempus_core::{Coefficient, GridFunction, SplitMix64, TimeScale};

pub fn z_grid(lo: i32, hi: i32) -> Arc<TimeScale> {
    Arc::new(TimeScale::new((lo..=hi).map(f64::from).collect()).unwrap())
}

/// A random grid of `n` points: uniform, geometric, or a mix of both with
/// random gaps.
pub fn random_grid(rng: &mut SplitMix64, n: usize) -> Arc<TimeScale> {
    let pts: Vec<f64> = match rng.index(0, 3) {
        0 => {
            let h = rng.uniform(0.01, 1.0);
            let a = rng.uniform(-5.0, 5.0);
            (0..n).map(|k| a + k as f64 * h).collect()
        }
        1 => {
            let q = rng.uniform(1.0005, 1.0 + 4.0 / n as f64);
            let t0 = rng.uniform(0.1, 2.0);
            (0..n).map(|k| t0 * q.powi(k as i32)).collect()
        }
        _ => {
            let mut t = rng.uniform(-1.0, 1.0);
            (0..n)
                .map(|_| {
                    let cur = t;
                    t += if rng.next_f64() < 0.5 {
                        0.01
                    } else {
                        rng.uniform(0.001, 0.5)
                    };
                    cur
                })
                .collect()
        }
    };
    Arc::new(TimeScale::new(pts).unwrap())
}

/// A regressive coefficient with `mu p` mostly in `[-0.5, 0.5]` and the
/// occasional factor below zero.
pub fn random_coefficient(rng: &mut SplitMix64, ts: &Arc<TimeScale>) -> Coefficient {
    let mu = ts.graininess_all();
    let values = (0..ts.len())
        .map(|i| {
            let m = if mu[i] > 0.0 { mu[i] } else { 1.0 };
            let mp = if rng.next_f64() < 0.05 {
                rng.uniform(-2.5, -1.5)
            } else {
                rng.uniform(-0.5, 0.5)
            };
            mp / m
        })
        .collect();
    Coefficient::new(GridFunction::new(ts, values).unwrap())
}

pub fn random_function(rng: &mut SplitMix64, ts: &Arc<TimeScale>, amp: f64) -> GridFunction {
    GridFunction::new(ts, (0..ts.len()).map(|_| rng.uniform(-amp, amp)).collect()).unwrap()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Forward recurrence `x_{i+1} = (1 + mu_i d_i) x_i + mu_i f_i`, the direct
/// discretization of `x^Delta = d x + f`.
pub fn first_order_recurrence(d: &Coefficient, f: &GridFunction, x0: f64) -> Vec<f64> {
    let mu = d.timescale().graininess_all();
    let mut x = vec![x0; d.len()];
    for i in 0..d.len() - 1 {
        x[i + 1] = (1.0 + mu[i] * d[i]) * x[i] + mu[i] * f[i];
    }
    x
}

/// `L` straight from its definition, one exponential at a time.
pub fn lemma_constant_by_definition(d: &Coefficient) -> f64 {
    let n = d.len();
    let mu = d.timescale().graininess_all();
    (0..n)
        .map(|i| {
            let outer = tempus_core::ts_exponential(d, i, 0).unwrap().abs();
            let inner: f64 = (0..i)
                .map(|k| tempus_core::ts_exponential(d, 0, k + 1).unwrap().abs() * mu[k])
                .sum();
            outer * inner
        })
        .fold(0.0, f64::max)
}

/// `n` points with random gaps spanning `[0, span]`.
pub fn random_grid_spanning(rng: &mut SplitMix64, n: usize, span: f64) -> Arc<TimeScale> {
    let gaps: Vec<f64> = (0..n - 1).map(|_| rng.uniform(0.2, 1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let mut pts = Vec::with_capacity(n);
    let mut t = 0.0;
    pts.push(t);
    for g in gaps {
        t += g * span / total;
        pts.push(t);
    }
    Arc::new(TimeScale::new(pts).unwrap())
}
