//! Work distribution.
//!
//! With the `parallel` feature (on by default) independent work items are
//! spread over the rayon pool; without it, or with [`Workers::Sequential`],
//! they run in order on the calling thread. Every helper here returns results
//! in index order, so callers that reduce them along a fixed tree get output
//! that does not depend on the worker count.

/// How independent work items are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Run on the calling thread.
    Sequential,
    /// Use the current rayon pool (falls back to sequential without the
    /// `parallel` feature).
    #[default]
    Parallel,
}

impl Workers {
    /// `Parallel` only when the crate was built with rayon support.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Workers::Parallel
    }
}

/// Evaluates `f(i)` for `i in 0..len`, returning results in index order.
pub fn map_range<T, F>(workers: Workers, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = workers;
    (0..len).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(workers: Workers, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_range(workers, items.len(), |i| f(&items[i]))
}

/// Runs `f` inside a dedicated pool of `threads` workers.
///
/// `threads == 0` means "use the default pool". Without the `parallel`
/// feature this simply calls `f`.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}
