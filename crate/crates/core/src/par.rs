//! Node-parallel helpers.
//!
//! With the `parallel` feature the maps run on the current rayon pool;
//! without it they are plain sequential iterators. Results are collected in
//! index order and reductions are max/min only, so output does not depend on
//! the pool size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Fallible indexed map. On failure the error of the lowest failing index
/// is returned.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    let out: Vec<Result<T, E>> = map_indexed(n, f);
    out.into_iter().collect()
}

/// Maximum of `f(i)` over `0..n` (`f64::NEG_INFINITY` when empty, NaN propagates).
pub fn max_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let vals = map_indexed(n, f);
    vals.into_iter().fold(f64::NEG_INFINITY, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

/// Number of worker threads the helpers will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
