//! Execution policy for the data-parallel kernels.
//!
//! Every kernel produces bit-identical output under both policies; the
//! parallel path only partitions independent work items (rows, trials,
//! scenes) and collects them in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Calls `f(row_index, row)` for every `row_len`-sized chunk of `data`.
    pub fn rows_mut<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        if row_len == 0 {
            return;
        }
        match self {
            Exec::Sequential => data
                .chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row)),
            #[cfg(feature = "parallel")]
            Exec::Parallel => data
                .par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row)),
        }
    }
}

/// Runs `f` inside a pool limited to `workers` threads.
///
/// Without the `parallel` feature the closure simply runs on the caller.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}
