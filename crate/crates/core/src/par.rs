//! Data-parallel helpers with a sequential fallback.
//!
//! Reductions are chunked with a fixed chunk size and the partial sums are
//! combined in index order, so results are bit-identical whichever execution
//! mode runs them and whether or not the `parallel` feature is enabled.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel inner loops are executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is on; otherwise
    /// identical to `Sequential`.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

const CHUNK: usize = 256;

/// Sum `f(item)` over `items` with a fixed reduction order.
pub fn chunked_sum<T, F>(items: &[T], exec: Execution, f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partial = |chunk: &[T]| chunk.iter().map(&f).sum::<f64>();
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && items.len() > CHUNK {
        let parts: Vec<f64> = items.par_chunks(CHUNK).map(partial).collect();
        return parts.iter().sum();
    }
    let _ = exec;
    items.chunks(CHUNK).map(partial).sum()
}

/// `(0..n).map(f).collect()` preserving index order.
pub fn map_indexed<R, F>(n: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Apply `f(index, slot)` to every element of `out`.
pub fn fill_indexed<R, F>(out: &mut [R], exec: Execution, f: F)
where
    R: Send,
    F: Fn(usize, &mut R) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_iter_mut().enumerate().for_each(|(i, r)| f(i, r));
        return;
    }
    let _ = exec;
    out.iter_mut().enumerate().for_each(|(i, r)| f(i, r));
}
