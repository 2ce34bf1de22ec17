//! Lexicographic ranking and unranking of k-subsets of `{0, .., n-1}`.

use crate::error::{Error, Result};

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn checked_binomial(n: usize, k: usize) -> Result<u64> {
    binomial(n, k).ok_or_else(|| Error::InvalidPool(format!("C({n}, {k}) overflows u64")))
}

/// The `index`-th `k`-subset of `{0, .., n-1}` in lexicographic order.
pub fn unrank_combination(index: u64, n: usize, k: usize) -> Result<Vec<usize>> {
    let count = checked_binomial(n, k)?;
    if index >= count {
        return Err(Error::RankOutOfRange { index, n, k, count });
    }
    let mut out = Vec::with_capacity(k);
    let mut rest = index;
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            // subsets whose current element is `next`
            let block = checked_binomial(n - next - 1, remaining)?;
            if rest < block {
                break;
            }
            rest -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    Ok(out)
}

/// Inverse of [`unrank_combination`]. `subset` must be strictly increasing.
pub fn rank_combination(subset: &[usize], n: usize) -> Result<u64> {
    let k = subset.len();
    if subset.windows(2).any(|w| w[0] >= w[1]) || subset.last().is_some_and(|&x| x >= n) {
        return Err(Error::InvalidPattern(format!(
            "{subset:?} is not a strictly increasing subset of 0..{n}"
        )));
    }
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (slot, &x) in subset.iter().enumerate() {
        let remaining = k - slot - 1;
        for skipped in prev..x {
            rank += checked_binomial(n - skipped - 1, remaining)?;
        }
        prev = x + 1;
    }
    Ok(rank)
}
