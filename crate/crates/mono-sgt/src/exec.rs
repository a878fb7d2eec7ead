use mono_sgt_core::exec::Executor;
use rayon::prelude::*;

/// Environment variable capping the worker count (0 or unset means one
/// worker per available core).
pub const THREADS_ENV: &str = "MONO_SGT_THREADS";

/// Rayon-backed [`Executor`]. Results are collected in index order, so the
/// output does not depend on the number of workers.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn with_threads(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Self { pool })
    }

    pub fn from_env() -> Result<Self, String> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(s) if !s.trim().is_empty() => s
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("{THREADS_ENV} must be a nonnegative integer, got `{s}`"))?,
            _ => 0,
        };
        Self::with_threads(threads).map_err(|e| e.to_string())
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn run<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync,
    {
        self.pool.install(|| (0..n).into_par_iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mono_sgt_core::exec::Sequential;

    #[test]
    fn matches_sequential_order() {
        let p = Parallel::with_threads(3).unwrap();
        assert_eq!(p.threads(), 3);
        let f = |i: usize| i * i + 1;
        assert_eq!(p.run(1000, f), Sequential.run(1000, f));
    }
}
