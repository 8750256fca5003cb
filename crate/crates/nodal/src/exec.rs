use nodal_core::experiments::Executor;
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Trial-parallel executor on a dedicated thread pool. Results are collected
/// by trial index, so the thread count never changes them.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `None` uses one thread per available core.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        if threads == Some(0) {
            return Err(CliError::config("--threads must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_trials<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nodal_core::experiments::Sequential;

    #[test]
    fn matches_sequential_order() {
        let f = |i: usize| (i * 7919) % 101;
        let seq = Sequential.map_trials(500, f);
        for threads in [1, 3] {
            assert_eq!(RayonExecutor::new(Some(threads)).unwrap().map_trials(500, f), seq);
        }
    }

    #[test]
    fn zero_threads_is_a_config_error() {
        assert!(matches!(RayonExecutor::new(Some(0)), Err(CliError::Config(_))));
    }
}
