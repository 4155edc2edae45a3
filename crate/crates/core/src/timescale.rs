//! Finite time scales: strictly increasing sets of isolated points.

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite time scale `{t_0 < t_1 < ... < t_{n-1}}`.
///
/// Every point except the right endpoint is right-scattered, so the forward
/// jump is the next point and the graininess is the gap to it. The right
/// endpoint is its own jump and has zero graininess.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeScale {
    points: Vec<f64>,
    #[serde(skip)]
    graininess: Vec<f64>,
}

impl TimeScale {
    /// Validates `points` (finite, strictly increasing, at least two).
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if let Some(index) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                required: 2,
                actual: points.len(),
            });
        }
        if let Some(index) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NonMonotone { index: index + 1 });
        }
        let mut graininess: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
        graininess.push(0.0);
        Ok(TimeScale { points, graininess })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a valid time scale has at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.points.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            })
        }
    }

    /// Forward jump operator at index `i`.
    pub fn sigma(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.points[(i + 1).min(self.points.len() - 1)])
    }

    /// Graininess `sigma(t_i) - t_i`.
    pub fn graininess(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.graininess[i])
    }

    /// Graininess at every point; the last entry is zero.
    pub fn graininess_all(&self) -> &[f64] {
        &self.graininess
    }

    /// The first `len` points as a time scale of their own.
    pub fn prefix(&self, len: usize) -> Result<TimeScale> {
        if len > self.points.len() {
            return Err(Error::IndexOutOfRange {
                index: len,
                len: self.points.len(),
            });
        }
        TimeScale::new(self.points[..len].to_vec())
    }

    pub(crate) fn require_len(&self, required: usize) -> Result<()> {
        if self.points.len() < required {
            Err(Error::TooFewPoints {
                required,
                actual: self.points.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Validates raw points into a [`TimeScale`].
pub fn validate_timescale(points: Vec<f64>) -> Result<TimeScale> {
    TimeScale::new(points)
}
