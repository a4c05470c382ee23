//! Ordering of the index pairs `(i, j)`, `i < j`, that label the entries of
//! a generalized cross product.
//!
//! The order is `(1,2), (1,3), (2,3), (1,4), (2,4), (3,4), ...`: pairs are
//! grouped by their larger index `j`, and within a group sorted by `i`. The
//! public functions here use 1-based indices like the mathematical notation;
//! [`pair_offset`] and [`offset_pair`] are the 0-based pair used everywhere
//! inside the crate.

use crate::error::{Error, Result};

/// `n(n-1)/2`, the number of pairs `i < j` in `1..=n`.
pub fn cross_dim(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
    }
    Ok(n * (n - 1) / 2)
}

/// Inverse of [`cross_dim`]: the `n >= 2` with `n(n-1)/2 == len`, if any.
pub fn dim_from_cross_len(len: usize) -> Result<usize> {
    // n = (1 + sqrt(1 + 8 len)) / 2, corrected for rounding
    let guess = ((1.0 + (1.0 + 8.0 * len as f64).sqrt()) / 2.0).round() as usize;
    for n in guess.saturating_sub(1)..=guess + 1 {
        if n >= 2 && n * (n - 1) / 2 == len {
            return Ok(n);
        }
    }
    Err(Error::domain(format!(
        "length {len} is not of the form n(n-1)/2 with n >= 2"
    )))
}

/// 1-based linear index `k = (j-1)(j-2)/2 + i` of the pair `(i, j)`.
pub fn pair_to_index(n: usize, i: usize, j: usize) -> Result<usize> {
    if n < 2 || i < 1 || i >= j || j > n {
        return Err(Error::domain(format!(
            "invalid pair ({i}, {j}) for dimension {n}: need 1 <= i < j <= n"
        )));
    }
    Ok(pair_offset(i - 1, j - 1) + 1)
}

/// 1-based inverse of [`pair_to_index`].
pub fn index_to_pair(n: usize, k: usize) -> Result<(usize, usize)> {
    let len = cross_dim(n)?;
    if k < 1 || k > len {
        return Err(Error::domain(format!(
            "index {k} out of range 1..={len} for dimension {n}"
        )));
    }
    let (i, j) = offset_pair(k - 1);
    Ok((i + 1, j + 1))
}

/// 0-based offset of the 0-based pair `(i, j)`, `i < j`. No bounds checks.
#[inline]
pub fn pair_offset(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// 0-based inverse of [`pair_offset`].
#[inline]
pub fn offset_pair(k: usize) -> (usize, usize) {
    let mut j = 1;
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    (k - j * (j - 1) / 2, j)
}

/// Precomputed forward/backward tables for a fixed dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIndexMap {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndexMap {
    pub fn new(n: usize) -> Result<Self> {
        let len = cross_dim(n)?;
        let pairs = (0..len).map(offset_pair).collect();
        Ok(Self { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// 0-based pair for 0-based offset `k`.
    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }

    /// 0-based offset for the 0-based pair `(i, j)`.
    pub fn offset(&self, i: usize, j: usize) -> usize {
        pair_offset(i, j)
    }

    /// All 0-based pairs in storage order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}
