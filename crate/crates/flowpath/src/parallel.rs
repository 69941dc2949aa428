use flowpath_core::Executor;
use rayon::prelude::*;

/// Maps on the rayon pool the caller is running in. Output order matches
/// input order.
#[derive(Clone, Copy, Debug, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        if items.len() < 2 {
            return items.iter().map(f).collect();
        }
        items.par_iter().map(f).collect()
    }
}

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_on_any_pool_size() {
        let items: Vec<u64> = (0..1000).collect();
        let want: Vec<u64> = items.iter().map(|v| v * v).collect();
        for w in [1, 3, 8] {
            let got = pool(w).unwrap().install(|| RayonExecutor.map(&items, |v| v * v));
            assert_eq!(got, want);
        }
    }
}
