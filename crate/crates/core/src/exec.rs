//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the [`Execution::Parallel`] strategy
//! dispatches onto the rayon global pool. Without it, both strategies run on
//! the calling thread. Results never depend on the strategy: maps preserve
//! input order and sums are reduced over fixed-size chunks in index order.

use rug::Float;

/// How batch work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `true` when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..len`.
pub fn map_range<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

pub(crate) const SUM_CHUNK: usize = 1024;

/// Sum of `f(i)` for `i in 0..len`, accumulated chunk by chunk in index
/// order so that the rounding is identical under every strategy.
pub fn chunked_sum<T, F, A>(exec: Execution, len: usize, zero: T, f: F, add: A) -> T
where
    T: Clone + Send + Sync,
    F: Fn(usize) -> T + Sync + Send,
    A: Fn(&mut T, &T) + Sync + Send,
{
    let chunks = len.div_ceil(SUM_CHUNK);
    let partial = |c: usize| {
        let mut acc = zero.clone();
        for i in c * SUM_CHUNK..((c + 1) * SUM_CHUNK).min(len) {
            add(&mut acc, &f(i));
        }
        acc
    };
    let partials = map_range(exec, chunks, partial);
    let mut total = zero;
    for p in &partials {
        add(&mut total, p);
    }
    total
}

/// Real specialisation of [`chunked_sum`].
pub fn sum_floats<F>(exec: Execution, len: usize, prec: u32, f: F) -> Float
where
    F: Fn(usize) -> Float + Sync + Send,
{
    chunked_sum(exec, len, Float::new(prec), f, |acc, x| *acc += x)
}
