//! Shard scheduling. With the `parallel` feature shards run on rayon;
//! without it, or with a single worker, they run in order on the caller's
//! thread. Callers only merge with associative, commutative operations, so
//! the schedule never shows up in results.

/// Maps every shard index in `0..shards` and merges the results.
///
/// `workers`: `None` uses the global pool, `Some(1)` runs sequentially,
/// `Some(w)` runs on a dedicated pool of `w` threads.
pub(crate) fn map_reduce<T, M, R, I>(
    shards: u64,
    workers: Option<usize>,
    map: M,
    identity: I,
    reduce: R,
) -> T
where
    T: Send,
    M: Fn(u64) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let par = || {
            (0..shards)
                .into_par_iter()
                .map(&map)
                .reduce(&identity, &reduce)
        };
        match workers {
            Some(1) => {}
            Some(w) => {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
                    return pool.install(par);
                }
            }
            None => return par(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;

    (0..shards).map(map).fold(identity(), reduce)
}

/// Whether this build can run shards concurrently.
pub const PARALLEL: bool = cfg!(feature = "parallel");
