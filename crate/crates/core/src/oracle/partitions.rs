//! Pair partitions of `{0, ..., m2 - 1}`.

use crate::error::{Error, Result};
use crate::numeric::double_factorial_odd;

/// Largest ground set accepted by [`enumerate_pair_partitions`].
pub const MAX_PARTITION_SIZE: usize = 16;

/// A partition of `{0, ..., 2m - 1}` into blocks of size two. Each block is
/// stored as `(r, s)` with `r < s`, blocks ordered by their first element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairPartition {
    blocks: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Builds a partition from blocks, checking that they cover `0..2m`
    /// exactly once.
    pub fn new(mut blocks: Vec<(usize, usize)>) -> Result<Self> {
        let size = 2 * blocks.len();
        let mut seen = vec![false; size];
        for b in blocks.iter_mut() {
            if b.0 > b.1 {
                *b = (b.1, b.0);
            }
            for x in [b.0, b.1] {
                if x >= size || seen[x] {
                    return Err(Error::InvalidParameter(format!("blocks do not partition 0..{size}")));
                }
                seen[x] = true;
            }
        }
        blocks.sort_unstable();
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Size of the ground set.
    pub fn size(&self) -> usize {
        2 * self.blocks.len()
    }
}

/// `#P2(m2)`: `(m2 - 1)!!` for even `m2`, zero for odd `m2`.
pub fn pair_partition_count(m2: usize) -> u128 {
    if m2 % 2 == 1 {
        0
    } else {
        double_factorial_odd(m2 / 2)
    }
}

fn check_size(m2: usize) -> Result<()> {
    if m2 % 2 == 1 {
        return Err(Error::InvalidParameter(format!("pair partitions need an even ground set, got {m2}")));
    }
    if m2 > MAX_PARTITION_SIZE {
        return Err(Error::OversizedInstance(format!("pair partitions of {m2} points (limit {MAX_PARTITION_SIZE})")));
    }
    Ok(())
}

/// Calls `visit` once per pair partition of `{0, ..., m2 - 1}`; blocks are
/// passed in the order they were formed (first element ascending).
pub fn visit_pair_partitions(m2: usize, mut visit: impl FnMut(&[(usize, usize)])) -> Result<()> {
    check_size(m2)?;
    type Visitor<'a> = dyn FnMut(&[(usize, usize)]) + 'a;
    fn rec(remaining: u32, stack: &mut Vec<(usize, usize)>, visit: &mut Visitor<'_>) {
        if remaining == 0 {
            visit(stack);
            return;
        }
        let first = remaining.trailing_zeros() as usize;
        let rest = remaining & !(1 << first);
        let mut others = rest;
        while others != 0 {
            let s = others.trailing_zeros() as usize;
            others &= others - 1;
            stack.push((first, s));
            rec(rest & !(1 << s), stack, visit);
            stack.pop();
        }
    }
    let full = if m2 == 0 { 0 } else { (1u32 << m2) - 1 };
    let mut stack = Vec::with_capacity(m2 / 2);
    rec(full, &mut stack, &mut visit);
    Ok(())
}

/// All pair partitions of `{0, ..., m2 - 1}`; there are `(m2 - 1)!!`.
pub fn enumerate_pair_partitions(m2: usize) -> Result<Vec<PairPartition>> {
    let mut out = Vec::with_capacity(pair_partition_count(m2).min(1 << 20) as usize);
    visit_pair_partitions(m2, |blocks| out.push(PairPartition { blocks: blocks.to_vec() }))?;
    Ok(out)
}
