//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] runs
//! sequentially, so results never depend on the feature set.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch of independent work items is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work actually fans out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel; order is preserved.
pub fn map_range<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Fills `out[k] = f(k)` in chunks of at least `min_len` items.
pub fn fill_indexed<T, F>(exec: Execution, out: &mut [T], min_len: usize, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_iter_mut().with_min_len(min_len.max(1)).enumerate().for_each(|(k, o)| *o = f(k));
        return;
    }
    let _ = (exec, min_len);
    for (k, o) in out.iter_mut().enumerate() {
        *o = f(k);
    }
}

/// Maximum of `f(k)` over `0..n`, ignoring NaN.
pub fn max_range<F>(exec: Execution, n: usize, min_len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().with_min_len(min_len.max(1)).map(f).reduce(|| 0.0, f64::max);
    }
    let _ = (exec, min_len);
    (0..n).map(f).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(Execution::Sequential, 1000, |k| (k as f64).sqrt());
        let b = map_range(Execution::Parallel, 1000, |k| (k as f64).sqrt());
        assert_eq!(a, b);
        let mut x = vec![0.0; 257];
        fill_indexed(Execution::Parallel, &mut x, 16, |k| k as f64 * 2.0);
        assert_eq!(x[256], 512.0);
        assert_eq!(max_range(Execution::Parallel, 100, 8, |k| k as f64), 99.0);
    }
}
