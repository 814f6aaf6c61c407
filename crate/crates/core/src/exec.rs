//! Execution mode for copy- and instance-level loops.

use serde::{Deserialize, Serialize};

/// How data-parallel loops are executed.
///
/// `Parallel` uses the ambient rayon pool when the `parallel` feature is
/// enabled and silently falls back to sequential otherwise. Outputs are
/// returned in index order either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluate `f(0..n)` and collect the results in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel => par_map(n, f),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sum values with a fixed pairwise tree over their order.
///
/// The tree shape depends only on `values.len()`, which keeps floating-point
/// reductions reproducible across thread counts.
pub fn pairwise_reduce<T: Clone>(values: &[T], zero: T, add: impl Fn(&T, &T) -> T + Copy) -> T {
    match values.len() {
        0 => zero,
        1 => values[0].clone(),
        len => {
            let (lo, hi) = values.split_at(len / 2);
            add(
                &pairwise_reduce(lo, zero.clone(), add),
                &pairwise_reduce(hi, zero, add),
            )
        }
    }
}
