//! Execution policy for the data-parallel loops (per-node estimation,
//! Monte Carlo seeds, sweeps).
//!
//! With the `parallel` feature (default) `Execution::Parallel` maps onto a
//! rayon indexed parallel iterator. Without it every policy runs
//! sequentially. Results are always returned in index order, so output does
//! not depend on the policy.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this policy will actually fan out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluates `f(i)` for `i in 0..len` and collects in index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Same as [`map_indexed`](Self::map_indexed) over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        self.map_indexed(items.len(), |i| f(&items[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_preserve_order() {
        let seq = Execution::Sequential.map_indexed(1000, |i| (i * i) as u64);
        let par = Execution::Parallel.map_indexed(1000, |i| (i * i) as u64);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }
}
