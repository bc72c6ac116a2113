//! Execution policy for the sampling loops.
//!
//! Every sampled check folds per-sample results into an accumulator whose
//! merge is associative and commutative, so the parallel and sequential
//! paths produce identical output. Without the `parallel` feature the
//! parallel policy silently runs sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

#[cfg(feature = "parallel")]
const MIN_BLOCK: usize = 512;

/// Fold `f(i)` for `i in 0..n` into an accumulator.
#[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
pub fn fold_indexed<A, F, G>(exec: Execution, n: usize, init: fn() -> A, f: F, merge: G) -> A
where
    A: Send,
    F: Fn(A, usize) -> A + Sync + Send,
    G: Fn(A, A) -> A + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .with_min_len(MIN_BLOCK)
                .fold(init, &f)
                .reduce(init, &merge)
        }
        _ => (0..n).fold(init(), f),
    }
}

/// Map `f` over `0..n`, preserving index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().with_min_len(MIN_BLOCK).map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
