//! Exact binomial coefficients and colexicographic k-subset enumeration.
//!
//! Bin and cell sizes reach `C(127, 63) ≈ 10^37`, so counts are `BigUint`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` for signed arguments; zero outside `0 <= k <= n`.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    binomial(n as u64, k as u64)
}

/// The `rank`-th `k`-subset of `{0, ..., n-1}` in colexicographic order,
/// returned in ascending order. `rank` must be below `C(n, k)`.
pub fn unrank_colex(n: usize, k: usize, rank: &BigUint) -> Vec<usize> {
    debug_assert!(*rank < binomial(n as u64, k as u64));
    let mut rank = rank.clone();
    let mut out = vec![0usize; k];
    let mut upper = n;
    for slot in (0..k).rev() {
        // largest c < upper with C(c, slot + 1) <= rank
        let mut c = upper - 1;
        loop {
            let b = binomial(c as u64, slot as u64 + 1);
            if b <= rank {
                rank -= b;
                break;
            }
            c -= 1;
        }
        out[slot] = c;
        upper = c;
    }
    out
}

/// Colexicographic rank of an ascending subset; inverse of [`unrank_colex`].
pub fn rank_colex(subset: &[usize]) -> BigUint {
    subset.iter().enumerate().map(|(i, &c)| binomial(c as u64, i as u64 + 1)).sum()
}

/// Streams the `k`-subsets of `{0, ..., n-1}` in colexicographic order.
#[derive(Debug, Clone)]
pub struct ColexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl ColexSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.as_mut()?;
        let out = cur.clone();
        let k = cur.len();
        // bump the lowest element that has room, reset everything below it
        let mut j = 0;
        loop {
            if j == k {
                self.current = None;
                break;
            }
            let limit = if j + 1 < k { cur[j + 1] } else { self.n };
            if cur[j] + 1 < limit {
                cur[j] += 1;
                for (i, v) in cur.iter_mut().enumerate().take(j) {
                    *v = i;
                }
                break;
            }
            j += 1;
        }
        Some(out)
    }
}
