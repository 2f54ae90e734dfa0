//! Data-parallel helpers over state-pair rows.
//!
//! With the `parallel` feature these dispatch to rayon; without it they run
//! the same closures sequentially. Every closure writes only to its own
//! output chunk and reads shared state immutably, so results do not depend
//! on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements a row loop stays on the calling thread; task
/// dispatch would cost more than the work.
#[cfg(feature = "parallel")]
const SEQUENTIAL_BELOW: usize = 4096;

/// Calls `f(row, chunk)` for each `width`-sized chunk of `data`.
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if data.len() >= SEQUENTIAL_BELOW {
        data.par_chunks_mut(width).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(width).enumerate().for_each(|(i, c)| f(i, c));
}

/// Collects `f(i)` for `i in 0..n`, in index order.
pub(crate) fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= 64 {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// True when the crate was built with rayon support.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
