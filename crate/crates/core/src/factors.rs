//! Factor sets `T_n` of the Thue-Morse word.
//!
//! Factors are collected by sliding a window of length `n` over a prefix of
//! length `C·n`, doubling `C` until the number of distinct windows reaches
//! the known factor complexity. Since every window is a factor, reaching
//! that count proves the set is complete.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{tm_prefix, Word};

const START_FACTOR: usize = 16;
const MAX_FACTOR: usize = 1024;

/// Number of factors of length `n`.
pub fn factor_complexity(n: u64) -> u64 {
    match n {
        0 => 1,
        1 => 2,
        2 => 4,
        _ => {
            // largest m with 2·2^m < n
            let m = 63 - (n - 1).leading_zeros() - 1;
            let p = 1u64 << m;
            if n <= 3 * p {
                4 * n - 2 * p - 4
            } else {
                2 * n + 4 * p - 2
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorSet {
    pub length: usize,
    pub members: BTreeSet<Word>,
}

impl FactorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.members.iter()
    }

    /// Sorted, newline separated.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.members {
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }
}

const MOD: u64 = (1 << 61) - 1;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let p = (a as u128) * (b as u128);
    let r = ((p & MOD as u128) + (p >> 61)) as u64;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

#[inline]
fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MOD - b
    }
}

/// Start positions of the pairwise distinct windows of length `n` in `text`,
/// distinguished by two polynomial hashes.
fn distinct_window_starts(text: &Word, n: usize) -> Vec<usize> {
    const BASES: [u64; 2] = [0x1f2e_3d4c_5b6a_7988 % MOD, 0x0123_4567_89ab_cdef % MOD];
    let count = text.len() + 1 - n;
    let mut top = [1u64; 2];
    for _ in 1..n {
        for k in 0..2 {
            top[k] = mulmod(top[k], BASES[k]);
        }
    }
    let letter = |i: usize| text.get(i) as u64 + 1;
    let mut h = [0u64; 2];
    for i in 0..n {
        for k in 0..2 {
            h[k] = addmod(mulmod(h[k], BASES[k]), letter(i));
        }
    }
    let mut seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(8 * n + 8);
    let mut starts = Vec::new();
    for i in 0..count {
        if seen.insert((h[0], h[1]), i).is_none() {
            starts.push(i);
        }
        if i + 1 < count {
            for k in 0..2 {
                let dropped = submod(h[k], mulmod(letter(i), top[k]));
                h[k] = addmod(mulmod(dropped, BASES[k]), letter(i + n));
            }
        }
    }
    starts
}

/// A prefix of `t` together with one start position per factor of length `length`.
#[derive(Debug, Clone)]
pub struct FactorWindows {
    pub length: usize,
    pub text: Word,
    pub starts: Vec<usize>,
}

impl FactorWindows {
    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.starts.iter().map(|&i| self.text.extract(i, self.length))
    }
}

/// Distinct windows of length `n`, without materializing them.
pub fn factor_windows(n: usize) -> Result<FactorWindows> {
    let expected = factor_complexity(n as u64) as usize;
    if n == 0 {
        return Ok(FactorWindows {
            length: 0,
            text: Word::new(),
            starts: vec![0],
        });
    }
    let mut factor = START_FACTOR;
    while factor <= MAX_FACTOR {
        let text = tm_prefix(factor * n);
        let starts = distinct_window_starts(&text, n);
        // A hash collision can only lower the count, so equality here is exact.
        if starts.len() == expected {
            return Ok(FactorWindows {
                length: n,
                text,
                starts,
            });
        }
        factor *= 2;
    }
    Err(Error::BudgetExceeded { length: n, factor })
}

/// Exactly `T_n`.
pub fn enumerate_factors(n: usize) -> Result<FactorSet> {
    let windows = factor_windows(n)?;
    let members: BTreeSet<Word> = windows.words().collect();
    debug_assert_eq!(members.len(), windows.len());
    Ok(FactorSet { length: n, members })
}

/// Sets up to this length stay cached; longer ones are rebuilt on every call.
pub const CACHE_MAX_LENGTH: usize = 1024;

fn cache() -> &'static RwLock<HashMap<usize, Arc<FactorSet>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<FactorSet>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `T_n`, memoized for `n <= CACHE_MAX_LENGTH`.
///
/// Results are identical to [`enumerate_factors`]; the cache only saves work.
pub fn factors_cached(n: usize) -> Result<Arc<FactorSet>> {
    if n > CACHE_MAX_LENGTH {
        return enumerate_factors(n).map(Arc::new);
    }
    if let Some(set) = cache().read().unwrap().get(&n) {
        return Ok(Arc::clone(set));
    }
    let set = Arc::new(enumerate_factors(n)?);
    let mut guard = cache().write().unwrap();
    Ok(Arc::clone(guard.entry(n).or_insert(set)))
}

/// Membership in `T`.
pub fn is_factor(w: &Word) -> bool {
    factors_cached(w.len())
        .map(|set| set.contains(w))
        .unwrap_or(false)
}

pub(crate) fn require_factor(w: &Word) -> Result<()> {
    if is_factor(w) {
        Ok(())
    } else {
        Err(Error::NotAFactor(w.to_string()))
    }
}
