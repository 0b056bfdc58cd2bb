//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over rayon; without it, or
//! when a width of 1 is requested, items are processed in order on the
//! calling thread. Output order always matches input order.

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs `job` with at most `width` worker threads. `None` uses the global
/// pool; `Some(1)` runs sequentially on the current thread.
pub fn with_width<R, F>(width: Option<usize>, job: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match width {
            None => job(),
            Some(w) => match rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
            {
                Ok(pool) => pool.install(job),
                Err(_) => job(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = width;
        job()
    }
}

/// Number of worker threads `map` would use at the current call site.
pub fn current_width() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let out = map(&items, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn width_one_is_single_threaded() {
        assert_eq!(with_width(Some(1), current_width), 1);
    }
}
