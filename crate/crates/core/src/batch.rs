//! Deterministic fan-out of independent tasks.
//!
//! Task `t` always receives `root.split(t)`, so results depend only on the
//! root stream and the task index, never on the worker count.

use rayon::prelude::*;

use crate::rng::RandomStream;

/// Runs `f(t, stream_t)` for `t in 0..count` on `workers` threads and
/// returns the results in task order.
pub fn map_tasks<T, F>(root: &RandomStream, count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, RandomStream) -> T + Sync + Send,
{
    if workers <= 1 {
        return (0..count).map(|t| f(t, root.split(t as u64))).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction");
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|t| f(t, root.split(t as u64)))
            .collect()
    })
}
