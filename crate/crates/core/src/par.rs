//! Execution strategy for the data-parallel loops (ideal chains, verification
//! grids). With the `parallel` feature these run on rayon; without it, or with
//! [`Exec::Sequential`], they run in order on the calling thread. Results are
//! always returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn map<T, U, F>(self, items: Vec<T>, op: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.into_par_iter().map(op).collect(),
            _ => items.into_iter().map(op).collect(),
        }
    }

    /// Number of blocks to cut a loop of `len` iterations into.
    #[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
    pub fn blocks(self, len: usize) -> usize {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (rayon::current_num_threads() * 2).clamp(1, len.max(1)),
            _ => 1,
        }
    }
}
