//! Data-parallel helpers. With the `parallel` feature they run on rayon; without it, or
//! when a single worker is requested, they fall back to plain iteration.

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs != 1 {
        use rayon::prelude::*;
        return with_pool(jobs, || items.par_iter().map(&f).collect());
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(jobs: usize, op: impl FnOnce() -> R + Send) -> R {
    if jobs == 0 {
        return op();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

/// Whether work is actually spread over threads for this `jobs` setting.
pub fn is_parallel(jobs: usize) -> bool {
    cfg!(feature = "parallel") && jobs != 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u32> = (0..1000).collect();
        let seq = map_ordered(&v, 1, |x| x * 3);
        let par = map_ordered(&v, 0, |x| x * 3);
        assert_eq!(seq, par);
        assert_eq!(par[999], 2997);
    }
}
