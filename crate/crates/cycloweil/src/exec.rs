//! Thin execution helpers: data-parallel when the `parallel` feature is on
//! (the default), plain iteration otherwise. All reductions used through
//! here are order-independent, so both paths produce identical results.

/// Runs `f` inside a rayon pool of the requested size; `None` uses the
/// default pool. Without the `parallel` feature the closure just runs.
#[cfg(feature = "parallel")]
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R: Send>(_workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// `filter_map` over `0..n` collecting into a vector (unordered).
#[cfg(feature = "parallel")]
pub fn range_filter_map<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().filter_map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn range_filter_map<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    (0..n).filter_map(f).collect()
}

/// Sequential twin of [`range_filter_map`], kept unconditionally for the
/// benchmark suite comparing both paths.
pub fn range_filter_map_seq<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> Option<T>,
{
    (0..n).filter_map(f).collect()
}

/// Fold `0..n` into an additive accumulator vector of fixed width; `f`
/// returns the bucket index to increment.
#[cfg(feature = "parallel")]
pub fn range_fold_counts<F>(n: u64, width: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize + Sync + Send,
{
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, x| {
                acc[f(x)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
pub fn range_fold_counts<F>(n: u64, width: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize + Sync + Send,
{
    range_fold_counts_seq(n, width, f)
}

/// Sequential twin of [`range_fold_counts`].
pub fn range_fold_counts_seq<F>(n: u64, width: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize,
{
    let mut acc = vec![0u64; width];
    for x in 0..n {
        acc[f(x)] += 1;
    }
    acc
}
