//! Data-parallel evaluation hook.
//!
//! The engine hands independent evaluations (corner sets × start times of a
//! robust cost, admissible successor edges of an expanded vertex) to an
//! [`Executor`]. Implementations must return results in input order; all
//! reductions downstream are done sequentially on that ordered output, so
//! results never depend on the executor.

use alloc::vec::Vec;

pub trait Executor: Sync {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}
