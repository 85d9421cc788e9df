//! Ordered parallel maps with one integrator per worker.

use rayon::prelude::*;
use sharpconvex_core::{Integrator, IntegratorConfig};

/// Maps `f` over `items` in parallel; results come back in input order.
pub fn par_map<T, R, F>(items: &[T], config: IntegratorConfig, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&Integrator, &T) -> R + Sync,
{
    items
        .par_iter()
        .map_init(|| Integrator::new(config), |integ, item| f(integ, item))
        .collect()
}

/// Runs `op` on a dedicated pool of `jobs` threads, or on the global pool.
pub fn with_jobs<R: Send>(jobs: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        },
        None => op(),
    }
}
