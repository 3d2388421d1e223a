//! Execution strategy for the data-parallel loops.
//!
//! Every parallel loop in the crate is a map over an integer index range
//! followed by an associative, commutative merge of integer accumulators,
//! so results are bit-identical for any worker count. Without the
//! `parallel` feature, [`Exec::Parallel`] silently runs sequentially.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// `threads == 0` uses rayon's global pool.
    Parallel { threads: usize },
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel { threads: 0 }
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps a thread count from the command line: 1 is sequential, 0 is auto.
    pub fn with_threads(threads: usize) -> Self {
        match threads {
            1 => Exec::Sequential,
            t => Exec::Parallel { threads: t },
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && matches!(self, Exec::Parallel { .. })
    }

    pub(crate) fn map_reduce<T, I, M, R>(self, range: Range<u64>, identity: I, map: M, reduce: R) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        M: Fn(u64) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel { threads } => {
                let run = || range.into_par_iter().map(&map).reduce(&identity, &reduce);
                if threads == 0 {
                    run()
                } else {
                    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                        Ok(pool) => pool.install(run),
                        Err(_) => run(),
                    }
                }
            }
            _ => range.map(map).fold(identity(), reduce),
        }
    }
}
