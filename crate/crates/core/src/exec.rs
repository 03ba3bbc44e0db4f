//! Execution policy for the data-parallel loops.
//!
//! Every parallel map collects results in index order and every reduction
//! is done sequentially over fixed-size chunks, so results are bit-identical
//! whatever the thread count. Without the `parallel` feature
//! [`Exec::Parallel`] silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "STRATO_MOYAL_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `f(0), …, f(n-1)` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Map over a slice, preserving order.
    pub fn map_slice<'a, A, T, F>(self, items: &'a [A], f: F) -> Vec<T>
    where
        A: Sync,
        T: Send,
        F: Fn(&'a A) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Apply `f` to consecutive chunks of `items` and return the per-chunk
    /// results in chunk order.
    pub fn map_chunks<'a, A, T, F>(self, items: &'a [A], chunk: usize, f: F) -> Vec<T>
    where
        A: Sync,
        T: Send,
        F: Fn(&'a [A]) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_chunks(chunk).map(f).collect(),
            _ => items.chunks(chunk).map(f).collect(),
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Size the global pool from [`THREADS_ENV`] if set. Returns the thread
/// count in effect (1 without the `parallel` feature).
pub fn configure_threads_from_env() -> Result<usize, String> {
    let requested = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("{THREADS_ENV}={v:?}: {e}"))?,
        ),
        Err(_) => None,
    };
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = requested {
            // a pool that is already built keeps its size
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(rayon::current_num_threads())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = requested;
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = Exec::Sequential.map(100, |i| i * i);
        let b = Exec::Parallel.map(100, |i| i * i);
        assert_eq!(a, b);
        let v: Vec<u64> = (0..1000).collect();
        let s1 = Exec::Sequential.map_chunks(&v, 64, |c| c.iter().sum::<u64>());
        let s2 = Exec::Parallel.map_chunks(&v, 64, |c| c.iter().sum::<u64>());
        assert_eq!(s1, s2);
    }
}
