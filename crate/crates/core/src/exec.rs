//! Sequential or rayon-backed evaluation of independent per-index work.

use serde::{Deserialize, Serialize};

/// Below this many items the parallel path is not worth the fork-join cost.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 64;

/// How independent per-index or per-trial work is scheduled.
///
/// Results never depend on the choice: every item is computed independently
/// and collected in index order. Without the `parallel` feature,
/// `Parallel` runs sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0), ..., f(n-1)` and returns the results in order.
    pub fn map_indices<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel if n >= PARALLEL_THRESHOLD => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Execution::map_indices`] but with no size threshold, for coarse
    /// work items such as whole certification trials.
    pub fn map_coarse<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}
