//! Pair counts as integer intervals and the logarithmic evaluator of `P_n`.
//!
//! `pairs(n)` is the set of values `p(w) = |w|_00 + |w|_11` over the factors of
//! length `n`; the pure variant (written `PAIRS` in tables) restricts to even
//! lengths and to words whose odd frame starts at the first letter. Both are
//! intervals and obey, for `n ≥ 4`,
//!
//! ```text
//! PAIRS(2n)   = n − pairs(n+1)
//! pairs(2n+1) = PAIRS(2n)
//! pairs(2n)   = PAIRS(2n) ∪ PAIRS(2n−2)
//! ```
//!
//! Both `pairs(2n)` and `pairs(2n+1)` depend only on `pairs(n)` and
//! `pairs(n+1)`, and `(pairs(2n+1), pairs(2n+2))` only on `pairs(n+1)` and
//! `pairs(n+2)`. So the pair `(pairs(k), pairs(k+1))` descends along a single
//! chain of about `log₂ k` states and no memo table is needed.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::factor_windows;
use crate::frames::extensible_2frame;

/// Indices from here on are rejected.
pub const INDEX_LIMIT: u64 = 1 << 62;

/// A nonempty integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntInterval {
    pub lo: i64,
    pub hi: i64,
}

impl IntInterval {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty interval [{lo},{hi}]");
        IntInterval { lo, hi }
    }

    pub fn point(x: i64) -> Self {
        IntInterval { lo: x, hi: x }
    }

    /// Smallest interval containing every element; `None` for an empty set.
    pub fn hull<I: IntoIterator<Item = i64>>(xs: I) -> Option<Self> {
        xs.into_iter().fold(None, |acc, x| {
            Some(match acc {
                None => IntInterval::point(x),
                Some(IntInterval { lo, hi }) => IntInterval::new(lo.min(x), hi.max(x)),
            })
        })
    }

    pub fn card(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    /// Number of even elements.
    pub fn even_count(&self) -> u64 {
        (self.hi.div_euclid(2) - (self.lo + 1).div_euclid(2) + 1) as u64
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn shift(&self, k: i64) -> Self {
        IntInterval::new(self.lo + k, self.hi + k)
    }

    /// `{c − x : x ∈ self}`.
    pub fn reflect(&self, c: i64) -> Self {
        IntInterval::new(c - self.hi, c - self.lo)
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lo, hi) = (self.lo.max(other.lo), self.hi.min(other.hi));
        (lo <= hi).then_some(IntInterval { lo, hi })
    }

    /// Union, provided it is again an interval.
    pub fn union(&self, other: &Self) -> Option<Self> {
        let touching = self.lo <= other.hi.saturating_add(1) && other.lo <= self.hi.saturating_add(1);
        touching.then(|| IntInterval::new(self.lo.min(other.lo), self.hi.max(other.hi)))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// The small-value table: `pairs(n)` and the measured `P_n` for `n ≤ 9`, and
/// the pure pair sets at even `n ≤ 8`.
pub const BASE_MAX: u64 = 9;
const BASE_PAIRS: [(i64, i64); 10] = [
    (0, 0),
    (0, 0),
    (0, 1),
    (0, 1),
    (0, 2),
    (1, 2),
    (1, 3),
    (1, 3),
    (1, 3),
    (2, 3),
];
const BASE_PURE: [(i64, i64); 5] = [(0, 0), (0, 1), (1, 2), (1, 3), (2, 3)];
const BASE_P: [u64; 10] = [1, 2, 4, 6, 8, 6, 8, 10, 8, 6];

/// One row of the small-value table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BaseRow {
    pub n: u64,
    pub pure_pairs: Option<IntInterval>,
    pub pairs: IntInterval,
    pub p: u64,
}

pub fn base_table() -> Vec<BaseRow> {
    (0..=BASE_MAX)
        .map(|n| BaseRow {
            n,
            pure_pairs: (n % 2 == 0).then(|| base_pure(n)),
            pairs: base_pairs(n),
            p: BASE_P[n as usize],
        })
        .collect()
}

fn base_pairs(n: u64) -> IntInterval {
    let (lo, hi) = BASE_PAIRS[n as usize];
    IntInterval::new(lo, hi)
}

fn base_pure(m: u64) -> IntInterval {
    let (lo, hi) = BASE_PURE[(m / 2) as usize];
    IntInterval::new(lo, hi)
}

fn check_index(n: u64) -> Result<()> {
    if n >= INDEX_LIMIT {
        Err(Error::Overflow(n))
    } else {
        Ok(())
    }
}

fn joined(a: IntInterval, b: IntInterval) -> IntInterval {
    a.union(&b)
        .unwrap_or_else(|| panic!("pure pair sets {a} and {b} are not adjacent"))
}

/// `(pairs(2n), pairs(2n+1))` from `(pairs(n), pairs(n+1))`.
pub fn double_step(n: i64, pairs_n: IntInterval, pairs_n1: IntInterval) -> (IntInterval, IntInterval) {
    let upper = pairs_n1.reflect(n);
    let lower = pairs_n.reflect(n - 1);
    (joined(upper, lower), upper)
}

/// `(pairs(k), pairs(k+1))`.
fn state(k: u64) -> (IntInterval, IntInterval) {
    if k < BASE_MAX {
        return (base_pairs(k), base_pairs(k + 1));
    }
    let n = (k / 2) as i64;
    let (a, b) = if k % 2 == 0 {
        let (pn, pn1) = state(k / 2);
        double_step(n, pn, pn1)
    } else {
        // (pairs(2n+1), pairs(2n+2)) from (pairs(n+1), pairs(n+2))
        let (pn1, pn2) = state(k / 2 + 1);
        let odd = pn1.reflect(n);
        (odd, joined(pn2.reflect(n + 1), odd))
    };
    let a = if k <= BASE_MAX { base_pairs(k) } else { a };
    (a, b)
}

/// `pairs(n)`.
pub fn pairs_interval(n: u64) -> Result<IntInterval> {
    check_index(n)?;
    Ok(state(n).0)
}

/// The pure pair set at even length `m` (`PAIRS(m)`).
#[doc(alias = "PAIRS_interval")]
pub fn pure_pairs_interval(m: u64) -> Result<IntInterval> {
    if m % 2 != 0 {
        return Err(Error::OddArgument(m));
    }
    check_index(m)?;
    if m <= BASE_MAX {
        return Ok(base_pure(m));
    }
    let n = m / 2;
    Ok(pairs_interval(n + 1)?.reflect(n as i64))
}

/// `P_n`, the number of 2-abelian classes of length `n`, in `O(log n)`.
pub fn complexity_fast(n: u64) -> Result<u64> {
    check_index(n)?;
    if n < 4 {
        return Ok(BASE_P[n as usize]);
    }
    let h = n / 2;
    if n % 2 == 1 {
        let pure = pure_pairs_interval(2 * h)?;
        return Ok(2 * (2 * pure.card() - pure.even_count()));
    }
    let (upper, lower) = if 2 * h <= BASE_MAX {
        (base_pure(2 * h), base_pure(2 * h - 2))
    } else {
        let (pn, pn1) = state(h);
        (pn1.reflect(h as i64), pn.reflect(h as i64 - 1))
    };
    // consecutive pure sets always overlap, but an empty meet would add nothing
    debug_assert!(upper.intersect(&lower).is_some(), "disjoint pure sets at {n}");
    let shared = upper.intersect(&lower).map_or(0, |i| i.even_count());
    Ok(2 * (upper.card() + lower.card() - shared))
}

/// `pairs(n)` for every `n` in `[n_lo, n_hi]`, built by repeatedly doubling a
/// window of half the size.
pub fn pairs_window(n_lo: u64, n_hi: u64) -> Result<Vec<IntInterval>> {
    if n_hi < n_lo {
        return Ok(Vec::new());
    }
    check_index(n_hi.saturating_add(1))?;
    Ok(window(n_lo, n_hi))
}

fn window(lo: u64, hi: u64) -> Vec<IntInterval> {
    if hi <= BASE_MAX {
        return (lo..=hi).map(base_pairs).collect();
    }
    let (sub_lo, sub_hi) = (lo / 2, hi / 2 + 1);
    let sub = window(sub_lo, sub_hi);
    let at = |i: u64| sub[(i - sub_lo) as usize];
    (lo..=hi)
        .map(|k| {
            if k <= BASE_MAX {
                return base_pairs(k);
            }
            let n = k / 2;
            if k % 2 == 0 {
                double_step(n as i64, at(n), at(n + 1)).0
            } else {
                at(n + 1).reflect(n as i64)
            }
        })
        .collect()
}

/// Which of the four neighbour shapes `(pairs(n), pairs(n+1))` has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NeighbourCase {
    /// `[a,b]`, `[a,b]`
    Same,
    /// `[a,b]`, `[a+1,b]`
    LowerUp,
    /// `[a,b]`, `[a,b+1]`
    UpperUp,
    /// `[a,b]`, `[a+1,b+1]`; never realized
    BothUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairsState {
    pub n: u64,
    pub pairs_n: IntInterval,
    pub pairs_n_plus_1: IntInterval,
}

impl PairsState {
    pub fn at(n: u64) -> Result<Self> {
        check_index(n.saturating_add(1))?;
        let (pairs_n, pairs_n_plus_1) = state(n);
        Ok(PairsState {
            n,
            pairs_n,
            pairs_n_plus_1,
        })
    }

    /// `None` when the endpoints move by something other than 0 or 1.
    pub fn case(&self) -> Option<NeighbourCase> {
        let d = (
            self.pairs_n_plus_1.lo - self.pairs_n.lo,
            self.pairs_n_plus_1.hi - self.pairs_n.hi,
        );
        match d {
            (0, 0) => Some(NeighbourCase::Same),
            (1, 0) => Some(NeighbourCase::LowerUp),
            (0, 1) => Some(NeighbourCase::UpperUp),
            (1, 1) => Some(NeighbourCase::BothUp),
            _ => None,
        }
    }
}

/// Every set two doubling steps produce from `(pairs(n), pairs(n+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expansion {
    /// pure sets at `2n−2`, `2n`
    pub pure_2n: [IntInterval; 2],
    /// pairs at `2n−1`, `2n`, `2n+1`
    pub pairs_2n: [IntInterval; 3],
    /// pure sets at `4n−2`, `4n`
    pub pure_4n: [IntInterval; 2],
    /// pairs at `4n−1`, `4n`, `4n+1`
    pub pairs_4n: [IntInterval; 3],
}

/// Applies the recursion symbolically, without consulting the base table.
pub fn expand(n: i64, pairs_n: IntInterval, pairs_n1: IntInterval) -> Expansion {
    let pure_2n = [pairs_n.reflect(n - 1), pairs_n1.reflect(n)];
    let (p2n, p2n1) = double_step(n, pairs_n, pairs_n1);
    let pure_4n = [p2n.reflect(2 * n - 1), p2n1.reflect(2 * n)];
    let (p4n, p4n1) = double_step(2 * n, p2n, p2n1);
    Expansion {
        pure_2n,
        pairs_2n: [pure_2n[0], p2n, p2n1],
        pure_4n,
        pairs_4n: [pure_4n[0], p4n, p4n1],
    }
}

/// Pair count and odd-frame offset of every factor of length `n`, by direct counting.
fn window_stats(n: usize) -> Result<Vec<(u64, Option<usize>)>> {
    let windows = factor_windows(n)?;
    let text = &windows.text;
    // squares[i] = number of j < i with text[j] == text[j+1]
    let mut squares = vec![0u64; text.len() + 1];
    let mut next_square = vec![usize::MAX; text.len() + 1];
    for i in 0..text.len() {
        let sq = i + 1 < text.len() && text.get(i) == text.get(i + 1);
        squares[i + 1] = squares[i] + u64::from(sq);
    }
    for i in (0..text.len()).rev() {
        let sq = i + 1 < text.len() && text.get(i) == text.get(i + 1);
        next_square[i] = if sq { i } else { next_square[i + 1] };
    }
    windows
        .starts
        .iter()
        .map(|&i| {
            if n == 0 {
                return Ok((0, None));
            }
            let last = i + n - 1;
            let p = squares[last] - squares[i];
            let offset = if next_square[i] < last {
                Some((next_square[i] - i) % 2)
            } else if n >= 4 {
                Some(1 - extensible_2frame(&text.extract(i, n))?)
            } else {
                None
            };
            Ok((p, offset))
        })
        .collect()
}

/// `{p(w) : w ∈ T_n}` by enumeration.
pub fn pairs_brute(n: usize) -> Result<BTreeSet<u64>> {
    Ok(window_stats(n)?.into_iter().map(|(p, _)| p).collect())
}

/// `{p(w) : w ∈ T_m, odd frame starting at w_0}` by enumeration (`PAIRS(m)`).
#[doc(alias = "PAIRS_brute")]
pub fn pure_pairs_brute(m: usize) -> Result<BTreeSet<u64>> {
    if m % 2 != 0 {
        return Err(Error::OddArgument(m as u64));
    }
    if m < 4 {
        return Err(Error::TooShort { length: m, min: 4 });
    }
    Ok(window_stats(m)?
        .into_iter()
        .filter(|&(_, offset)| offset == Some(0))
        .map(|(p, _)| p)
        .collect())
}

/// Per-index export record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SequenceRow {
    pub n: u64,
    #[serde(rename = "P")]
    pub p: u64,
    pub pairs_lo: i64,
    pub pairs_hi: i64,
}

pub fn sequence_row(n: u64) -> Result<SequenceRow> {
    let pairs = pairs_interval(n)?;
    Ok(SequenceRow {
        n,
        p: complexity_fast(n)?,
        pairs_lo: pairs.lo,
        pairs_hi: pairs.hi,
    })
}
