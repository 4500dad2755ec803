//! Block-parallel execution.
//!
//! Work of `total` items is cut into contiguous blocks of a fixed size. Block
//! `b` always sees the same items and the same random stream, so the output
//! is identical for any number of worker threads and for the sequential path.

use std::ops::Range;

/// How block work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon work stealing. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

fn block_ranges(total: usize, block: usize) -> impl Iterator<Item = (u64, Range<usize>)> + Clone {
    let block = block.max(1);
    (0..total.div_ceil(block)).map(move |b| (b as u64, b * block..((b + 1) * block).min(total)))
}

/// Maps `f` over blocks and returns the results in block order.
pub fn map_blocks<T, F>(mode: ExecMode, total: usize, block: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Range<usize>) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            let blocks: Vec<_> = block_ranges(total, block).collect();
            blocks.into_par_iter().map(|(b, r)| f(b, r)).collect()
        }
        _ => block_ranges(total, block).map(|(b, r)| f(b, r)).collect(),
    }
}
