//! Execution strategy for the data-parallel loops.
//!
//! Work is always cut into fixed-size blocks and the per-block results are
//! returned in ascending block order, so a reduction folded left over the
//! returned vector is bit-identical whichever strategy ran it. With the
//! `parallel` feature disabled, [`Execution::Parallel`] runs sequentially.

use std::ops::Range;

/// Number of items (columns, Monte Carlo draws) handled per block.
pub const BLOCK_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this strategy will actually use worker threads.
    pub fn is_threaded(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

fn block_ranges(len: usize, block: usize) -> Vec<Range<usize>> {
    (0..len.div_ceil(block))
        .map(|b| b * block..((b + 1) * block).min(len))
        .collect()
}

/// Maps `f` over consecutive blocks of `0..len`, results in block order.
pub fn map_blocks<T, F>(len: usize, block: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let ranges = block_ranges(len, block.max(1));
    map_items(ranges, exec, f)
}

/// Maps `f` over `items`, preserving order.
pub fn map_items<I, T, F>(items: Vec<I>, exec: Execution, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}
