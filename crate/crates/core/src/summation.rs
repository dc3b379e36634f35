//! Deterministic, optionally parallel summation of long oscillating series.
//!
//! A range of `n` terms is cut into blocks of [`BLOCK_TERMS`] consecutive
//! indices. Each block is summed in two-word arithmetic by a caller-supplied
//! kernel, and the block sums are then added in index order. Neither the
//! block boundaries nor the order of the final reduction depend on the number
//! of workers, so one worker and many workers give bit-identical results.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::xprec::ExtendedReal;

/// Number of consecutive terms handled by one kernel call.
pub const BLOCK_TERMS: u64 = 4096;

static DEFAULT_WORKERS: AtomicUsize = AtomicUsize::new(0);

/// Sets the worker count used by the convenience entry points
/// (`rs_main_sum`, `ms_sum`, ...). Zero means "all available cores".
pub fn set_default_workers(workers: usize) {
    DEFAULT_WORKERS.store(workers, Ordering::Relaxed);
}

/// The worker count currently used by the convenience entry points.
pub fn default_workers() -> usize {
    match DEFAULT_WORKERS.load(Ordering::Relaxed) {
        0 => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        n => n,
    }
}

fn pool(workers: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap_or_else(|e| e.into_inner());
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .thread_name(|i| format!("zsum-{i}"))
                    .build()
                    .expect("failed to start summation worker pool"),
            )
        })
        .clone()
}

/// Sums `n_terms` terms with `kernel(first, count)`, which must return the
/// two-word sum of terms `first .. first + count` (indices relative to the
/// start of the range).
pub fn blocked_sum<F>(n_terms: u64, workers: usize, kernel: F) -> ExtendedReal
where
    F: Fn(u64, u64) -> ExtendedReal + Sync,
{
    if n_terms == 0 {
        return ExtendedReal::ZERO;
    }
    let n_blocks = n_terms.div_ceil(BLOCK_TERMS);
    let block = |k: u64| {
        let first = k * BLOCK_TERMS;
        kernel(first, BLOCK_TERMS.min(n_terms - first))
    };
    let partials: Vec<ExtendedReal> = if workers <= 1 || n_blocks == 1 {
        (0..n_blocks).map(block).collect()
    } else {
        pool(workers).install(|| (0..n_blocks).into_par_iter().map(block).collect())
    };
    partials.into_iter().fold(ExtendedReal::ZERO, |acc, p| acc + p)
}
