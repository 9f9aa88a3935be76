//! Data-parallel helpers. With the `parallel` feature the sweeps run on the
//! rayon pool; without it every strategy degrades to a sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent jobs (summands, sample points) are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

pub fn map_range<T, F>(strategy: Strategy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

pub fn map_slice<S, T, F>(strategy: Strategy, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Maximum of `f` over the items; `0.0` for an empty slice.
pub fn max_over<S, F>(strategy: Strategy, items: &[S], f: F) -> f64
where
    S: Sync,
    F: Fn(&S) -> f64 + Sync + Send,
{
    map_slice(strategy, items, f).into_iter().fold(0.0, f64::max)
}
