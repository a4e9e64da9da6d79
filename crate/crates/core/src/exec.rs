//! Execution policy for the data-parallel loops (Gram entries, pair residuals,
//! probe evaluations, torus samples).
//!
//! With the `parallel` feature the `Parallel` policy runs on rayon's pool;
//! without it every policy runs sequentially. Results are collected in index
//! order either way, so reductions downstream see the same sequence.

/// How an embarrassingly parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this policy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `(0..len).map(f).collect()`, order preserved.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// `items.iter().map(f).collect()`, order preserved.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let seq = Exec::Sequential.map_range(1000, |i| i * i);
        let par = Exec::Parallel.map_range(1000, |i| i * i);
        assert_eq!(seq, par);
        let items: Vec<u32> = (0..50).collect();
        assert_eq!(
            Exec::Sequential.map_slice(&items, |x| x + 1),
            Exec::Parallel.map_slice(&items, |x| x + 1)
        );
    }
}
