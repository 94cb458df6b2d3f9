//! Index-space execution for law sweeps.
//!
//! Every sweep is a function of an instance index. Results are always
//! reported in index order so parallel and sequential runs print the same
//! thing; without the `parallel` feature both modes run on one thread.

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
    /// `f(0), ..., f(n-1)` in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// The lowest index at which `f` reports something.
    pub fn find_first<W, F>(self, n: usize, f: F) -> Option<(usize, W)>
    where
        W: Send,
        F: Fn(usize) -> Option<W> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().find_map_first(|i| f(i).map(|w| (i, w))),
            _ => (0..n).find_map(|i| f(i).map(|w| (i, w))),
        }
    }

    /// Sum of `f` over all indices.
    pub fn sum<F>(self, n: usize, f: F) -> u64
    where
        F: Fn(usize) -> u64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).sum(),
            _ => (0..n).map(f).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map(5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(exec.find_first(1000, |i| (i % 7 == 6).then_some(i * 2)), Some((6, 12)));
            assert_eq!(exec.find_first(10, |_| None::<()>), None);
            assert_eq!(exec.sum(101, |i| i as u64), 5050);
        }
    }
}
