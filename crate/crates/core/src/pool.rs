//! In-process work queue for fitness evaluation.
//!
//! Tasks are pure and results are gathered by task index, so the output is
//! the same for any worker count.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

pub struct WorkerPool {
    workers: usize,
    pool: ThreadPool,
}

impl WorkerPool {
    pub fn new(workers: usize) -> Result<Self> {
        let workers = workers.max(1);
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(WorkerPool { workers, pool })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Evaluates `f` over `items`; `out[i] = f(&items[i])`.
    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        if self.workers == 1 {
            return items.iter().map(f).collect();
        }
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    /// Runs `f` inside the pool so nested `map` calls share its threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

impl std::fmt::Debug for WorkerPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkerPool").field("workers", &self.workers).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keyed_by_index() {
        let items: Vec<u64> = (0..100).collect();
        let one = WorkerPool::new(1).unwrap().map(&items, |x| x * x);
        let four = WorkerPool::new(4).unwrap().map(&items, |x| x * x);
        assert_eq!(one, four);
        assert_eq!(one[9], 81);
    }
}
