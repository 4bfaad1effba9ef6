//! Execution strategy for the embarrassingly parallel inner loops.
//!
//! Every sweep in this crate (decay-curve samples, visibility-grid cells,
//! delay-trace families) is a pure map over an index range, so the parallel
//! and sequential strategies produce bit-identical output in the same order.
//! The `parallel` feature (on by default) routes the map through rayon; when
//! disabled the same code runs on a plain iterator with no rayon dependency.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, returning results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, returning results in index order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
