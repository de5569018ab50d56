//! Shape of the complexity sequence: mirrored blocks between powers of two,
//! step sizes, an unbounded subsequence and two families of special indices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pairs::{pairs_interval, INDEX_LIMIT};
use crate::regularity::Evaluator;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PalindromeReport {
    pub q: u32,
    pub first_index: u64,
    pub block: Vec<u64>,
    pub is_palindrome: bool,
}

/// `P_{2^q+1}, …, P_{2^{q+1}+1}` and whether it reads the same backwards.
pub fn palindrome_block(q: u32, eval: &dyn Evaluator) -> Result<PalindromeReport> {
    assert!(q >= 1, "blocks start at q = 1");
    if q >= 61 {
        return Err(Error::Overflow(u64::MAX));
    }
    let (lo, hi) = ((1u64 << q) + 1, (1u64 << (q + 1)) + 1);
    let block = (lo..=hi).map(|n| eval.eval(n)).collect::<Result<Vec<_>>>()?;
    let is_palindrome = block.iter().eq(block.iter().rev());
    Ok(PalindromeReport {
        q,
        first_index: lo,
        block,
        is_palindrome,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub range: (u64, u64),
    /// `(n, P_{n+1} − P_n)` for every step outside `{−2, 0, 2}`.
    pub violations: Vec<(u64, i64)>,
    pub ok: bool,
}

/// Checks `P_{n+1} − P_n ∈ {−2, 0, 2}` for `n_lo ≤ n ≤ n_hi`.
pub fn step_check(n_lo: u64, n_hi: u64, eval: &dyn Evaluator) -> Result<StepReport> {
    let mut violations = Vec::new();
    if n_lo <= n_hi {
        let mut prev = eval.eval(n_lo)? as i64;
        for n in n_lo..=n_hi {
            let next = eval.eval(n + 1)? as i64;
            let d = next - prev;
            if !matches!(d, -2 | 0 | 2) {
                violations.push((n, d));
            }
            prev = next;
        }
    }
    Ok(StepReport {
        range: (n_lo, n_hi),
        ok: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub index: u64,
    pub value: u64,
    /// `pairs(index) = [a,b]`, `pairs(index+1) = [a,b+1]`, index and `b` odd, `a` even.
    pub hypotheses_hold: bool,
}

fn chain_hypotheses(n: u64) -> Result<bool> {
    let (p, next) = (pairs_interval(n)?, pairs_interval(n + 1)?);
    Ok(next.lo == p.lo
        && next.hi == p.hi + 1
        && n % 2 == 1
        && p.hi.rem_euclid(2) == 1
        && p.lo.rem_euclid(2) == 0)
}

/// The first `k` terms of `a_0 = 3`, `a_{i+1} = 16 a_i − 5`, with their values.
pub fn unbounded_witness(k: usize, eval: &dyn Evaluator) -> Result<Vec<WitnessEntry>> {
    let mut out = Vec::with_capacity(k);
    let mut a = 3u64;
    for i in 0..k {
        if i > 0 {
            a = a
                .checked_mul(16)
                .map(|x| x - 5)
                .filter(|&x| x < INDEX_LIMIT - 1)
                .ok_or(Error::Overflow(a))?;
        }
        out.push(WitnessEntry {
            index: a,
            value: eval.eval(a)?,
            hypotheses_hold: chain_hypotheses(a)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialRow {
    pub m: u32,
    /// `2^m + 1` and its value
    pub power_index: u64,
    pub power_value: u64,
    /// `(2·4^m + 4)/3` and its value, while the index is in range
    pub c_index: Option<u64>,
    pub c_value: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialPoints {
    pub rows: Vec<SpecialRow>,
    pub powers_all_six: bool,
    pub c_nondecreasing: bool,
    /// `P` at the last computed `c_m` minus `P` at `c_1`; reported, not asserted.
    pub c_growth: i64,
}

pub fn c_index(m: u32) -> Option<u64> {
    let four = 1u128.checked_shl(2 * m)?;
    let c = (2 * four + 4) / 3;
    u64::try_from(c).ok().filter(|&c| c < INDEX_LIMIT)
}

/// Values at `2^m + 1` and at `(2·4^m + 4)/3` for `1 ≤ m ≤ m_max`.
pub fn special_points(m_max: u32, eval: &dyn Evaluator) -> Result<SpecialPoints> {
    let mut rows = Vec::new();
    for m in 1..=m_max {
        if m >= 62 {
            return Err(Error::Overflow(m as u64));
        }
        let power_index = (1u64 << m) + 1;
        let c = c_index(m);
        rows.push(SpecialRow {
            m,
            power_index,
            power_value: eval.eval(power_index)?,
            c_index: c,
            c_value: c.map(|c| eval.eval(c)).transpose()?,
        });
    }
    let cs: Vec<u64> = rows.iter().filter_map(|r| r.c_value).collect();
    Ok(SpecialPoints {
        powers_all_six: rows.iter().all(|r| r.power_value == 6),
        c_nondecreasing: cs.windows(2).all(|w| w[0] <= w[1]),
        c_growth: match (cs.first(), cs.last()) {
            (Some(&a), Some(&b)) => b as i64 - a as i64,
            _ => 0,
        },
        rows,
    })
}
