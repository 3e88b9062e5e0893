//! Dense indexing of the window and integer scaling of vectors.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::space::{SpaceConfig, SparseVector};

/// Position of every block coordinate in one dense array, block by block.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub offsets: Vec<usize>,
    pub total: usize,
    pub last_coord: usize,
}

impl Layout {
    pub fn new(cfg: &SpaceConfig) -> Self {
        let mut offsets = Vec::with_capacity(cfg.block_count());
        let mut total = 0;
        for b in cfg.blocks() {
            offsets.push(total);
            total += b.len();
        }
        let last_coord = cfg
            .blocks()
            .iter()
            .filter_map(|b| b.max_elem())
            .max()
            .unwrap_or(0);
        Layout {
            offsets,
            total,
            last_coord,
        }
    }
}

/// `x` multiplied by the common denominator of its entries.
#[derive(Clone, Debug)]
pub(crate) struct Scaled {
    pub denom: BigInt,
    /// Entries on block coordinates, indexed by [`Layout`] position.
    pub dense: Vec<BigInt>,
    /// `(coordinate, value)` for every nonzero entry.
    pub entries: Vec<(usize, BigInt)>,
    pub max_abs: BigInt,
}

pub(crate) fn scale_vector(x: &SparseVector, cfg: &SpaceConfig, layout: &Layout) -> Result<Scaled> {
    if let Some(c) = x.support().max_elem().filter(|&c| c > layout.last_coord) {
        return Err(Error::Structural(format!(
            "coordinate {c} lies beyond the window, which ends at {}",
            layout.last_coord
        )));
    }
    let (denom, entries) = x.to_integers();
    let mut dense = vec![BigInt::zero(); layout.total];
    let mut max_abs = BigInt::zero();
    for (c, v) in &entries {
        if let Some((n, r)) = cfg.locate(*c) {
            dense[layout.offsets[n - 1] + r - 1] = v.clone();
        }
        max_abs = max_abs.max(v.abs());
    }
    Ok(Scaled {
        denom,
        dense,
        entries,
        max_abs,
    })
}

/// Bound on every sum the kernels form: `(blocks + 2)·scale·max|y|`.
pub(crate) fn magnitude_bound(cfg: &SpaceConfig, scaled: &Scaled) -> BigInt {
    BigInt::from(cfg.block_count() + 2) * &cfg.weights().scale * &scaled.max_abs
}
