//! Functions sampled on a time scale and regressivity-tagged coefficients.

use std::ops::Index;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::timescale::TimeScale;
use crate::tolerance;

/// Real values aligned one-to-one with the points of a [`TimeScale`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    timescale: Arc<TimeScale>,
    values: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.aligned_with(other) && self.values == other.values
    }
}

impl GridFunction {
    pub fn new(timescale: &Arc<TimeScale>, values: Vec<f64>) -> Result<Self> {
        if values.len() != timescale.len() {
            return Err(Error::LengthMismatch {
                expected: timescale.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFunction {
            timescale: Arc::clone(timescale),
            values,
        })
    }

    pub fn constant(timescale: &Arc<TimeScale>, value: f64) -> Result<Self> {
        Self::new(timescale, vec![value; timescale.len()])
    }

    pub fn zeros(timescale: &Arc<TimeScale>) -> Self {
        GridFunction {
            timescale: Arc::clone(timescale),
            values: vec![0.0; timescale.len()],
        }
    }

    /// Samples `f` at every point of the time scale.
    pub fn from_fn(timescale: &Arc<TimeScale>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = timescale.points().iter().map(|&t| f(t)).collect();
        Self::new(timescale, values)
    }

    pub fn timescale(&self) -> &Arc<TimeScale> {
        &self.timescale
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn aligned_with(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.timescale, &other.timescale) || self.timescale == other.timescale
    }

    pub fn ensure_aligned(&self, other: &GridFunction) -> Result<()> {
        if self.aligned_with(other) {
            Ok(())
        } else {
            Err(Error::MisalignedGrids)
        }
    }

    /// Pointwise combination of two aligned functions.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_aligned(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(&self.timescale, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(&self.timescale, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Forward shift `f^sigma`; the right endpoint maps to itself.
    pub fn shifted(&self) -> Self {
        let n = self.values.len();
        let values = (0..n).map(|i| self.values[(i + 1).min(n - 1)]).collect();
        GridFunction {
            timescale: Arc::clone(&self.timescale),
            values,
        }
    }

    /// Restriction to the first `len` points, on a fresh prefix time scale.
    pub fn restrict(&self, prefix: &Arc<TimeScale>) -> Result<Self> {
        let len = prefix.len();
        if len > self.values.len() || prefix.points() != &self.timescale.points()[..len] {
            return Err(Error::MisalignedGrids);
        }
        Self::new(prefix, self.values[..len].to_vec())
    }

    /// Largest `|f - g|` over all points.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_aligned(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// A grid function together with its pointwise regressivity record
/// `1 + mu(t) p(t) != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    function: GridFunction,
    regressive: Vec<bool>,
}

impl Coefficient {
    pub fn new(function: GridFunction) -> Self {
        let mu = function.timescale().graininess_all();
        let regressive = function
            .values()
            .iter()
            .zip(mu)
            .map(|(&p, &m)| tolerance::is_regressive_factor(m * p))
            .collect();
        Coefficient { function, regressive }
    }

    pub fn constant(timescale: &Arc<TimeScale>, value: f64) -> Result<Self> {
        Ok(Self::new(GridFunction::constant(timescale, value)?))
    }

    pub fn function(&self) -> &GridFunction {
        &self.function
    }

    pub fn values(&self) -> &[f64] {
        self.function.values()
    }

    pub fn timescale(&self) -> &Arc<TimeScale> {
        self.function.timescale()
    }

    pub fn len(&self) -> usize {
        self.function.len()
    }

    pub fn is_empty(&self) -> bool {
        self.function.is_empty()
    }

    pub fn regressive_flags(&self) -> &[bool] {
        &self.regressive
    }

    pub fn is_regressive(&self) -> bool {
        self.regressive.iter().all(|&r| r)
    }

    /// `1 + mu(t_i) p(t_i)`.
    pub fn factor(&self, i: usize) -> f64 {
        1.0 + self.timescale().graininess_all()[i] * self.function[i]
    }

    /// Fails on the first index in `range` where the coefficient is not
    /// regressive.
    pub fn require_regressive(&self, range: std::ops::Range<usize>) -> Result<()> {
        match range.clone().find(|&i| !self.regressive[i]) {
            Some(index) => Err(Error::NonRegressive {
                index,
                factor: self.factor(index),
            }),
            None => Ok(()),
        }
    }

    /// Restriction to a prefix time scale.
    pub fn restrict(&self, prefix: &Arc<TimeScale>) -> Result<Self> {
        Ok(Coefficient::new(self.function.restrict(prefix)?))
    }
}

impl Index<usize> for Coefficient {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.function[i]
    }
}
