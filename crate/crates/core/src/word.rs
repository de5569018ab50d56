//! Finite binary words, the Thue-Morse word and its morphism.
//!
//! A [`Word`] stores its letters packed 64 to a `u64`, letter `i` in bit
//! `i % 64` of block `i / 64`. Bits past the end are always zero, so the
//! derived equality and hashing compare content only.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    blocks: Vec<u64>,
    len: usize,
}

#[inline]
fn blocks_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(len: usize) -> Self {
        Word {
            blocks: Vec::with_capacity(blocks_for(len)),
            len: 0,
        }
    }

    /// Builds a word from letters; any nonzero value counts as `1`.
    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        let mut w = Word::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "index {i} out of bounds for word of length {}", self.len);
        ((self.blocks[i / 64] >> (i % 64)) & 1) as u8
    }

    #[inline]
    pub fn first(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.get(0))
    }

    #[inline]
    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.get(self.len - 1))
    }

    pub fn push(&mut self, bit: u8) {
        if self.len % 64 == 0 {
            self.blocks.push(0);
        }
        if bit != 0 {
            self.blocks[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn extend_from(&mut self, other: &Word) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u8> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// The factor of length `len` starting at `start`, extracted a block at a time.
    pub fn extract(&self, start: usize, len: usize) -> Word {
        assert!(
            start + len <= self.len,
            "window {start}+{len} exceeds word of length {}",
            self.len
        );
        let nblocks = blocks_for(len);
        let mut blocks = Vec::with_capacity(nblocks);
        let (q, r) = (start / 64, start % 64);
        for k in 0..nblocks {
            let lo = self.blocks[q + k] >> r;
            let hi = if r == 0 {
                0
            } else {
                self.blocks.get(q + k + 1).map_or(0, |b| b << (64 - r))
            };
            blocks.push(lo | hi);
        }
        let mut w = Word { blocks, len };
        w.clear_tail();
        w
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        assert!(range.start <= range.end);
        self.extract(range.start, range.end - range.start)
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.extract(0, len.min(self.len))
    }

    pub fn suffix(&self, len: usize) -> Word {
        let len = len.min(self.len);
        self.extract(self.len - len, len)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    /// Flips every letter.
    pub fn complement(&self) -> Word {
        let mut w = Word {
            blocks: self.blocks.iter().map(|b| !b).collect(),
            len: self.len,
        };
        w.clear_tail();
        w
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Block `k` shifted so that bit `i` is the letter at position `64k + i + 1`.
    #[inline]
    fn next_letters(&self, k: usize) -> u64 {
        let nxt = self.blocks.get(k + 1).map_or(0, |b| b << 63);
        (self.blocks[k] >> 1) | nxt
    }

    /// Mask of the positions `i` in block `k` with `i + 1 < len`.
    #[inline]
    fn adjacent_mask(&self, k: usize) -> u64 {
        let valid = self.len.saturating_sub(1);
        let start = 64 * k;
        if valid <= start {
            0
        } else if valid - start >= 64 {
            u64::MAX
        } else {
            (1u64 << (valid - start)) - 1
        }
    }

    /// Occurrence counts of `00`, `01`, `10` and `11`, in that order.
    pub fn adjacent_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for k in 0..self.blocks.len() {
            let m = self.adjacent_mask(k);
            if m == 0 {
                break;
            }
            let x = self.blocks[k];
            let y = self.next_letters(k);
            counts[0] += (!x & !y & m).count_ones() as usize;
            counts[1] += (!x & y & m).count_ones() as usize;
            counts[2] += (x & !y & m).count_ones() as usize;
            counts[3] += (x & y & m).count_ones() as usize;
        }
        counts
    }

    /// First position `j` with `w[j] == w[j + 1]`.
    pub fn first_square_letter(&self) -> Option<usize> {
        for k in 0..self.blocks.len() {
            let m = self.adjacent_mask(k);
            if m == 0 {
                break;
            }
            let eq = !(self.blocks[k] ^ self.next_letters(k)) & m;
            if eq != 0 {
                return Some(64 * k + eq.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Number of occurrences of `factor` (possibly overlapping).
    pub fn occurrences(&self, factor: &Word) -> usize {
        if factor.len() > self.len {
            return 0;
        }
        (0..=self.len - factor.len())
            .filter(|&i| self.extract(i, factor.len()) == *factor)
            .count()
    }

    pub fn find(&self, factor: &Word) -> Option<usize> {
        if factor.len() > self.len {
            return None;
        }
        (0..=self.len - factor.len()).find(|&i| self.extract(i, factor.len()) == *factor)
    }
}

impl Ord for Word {
    /// Lexicographic on letters, a proper prefix sorting first.
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        for k in 0..blocks_for(common) {
            let bits = (common - 64 * k).min(64);
            let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
            let diff = (self.blocks[k] ^ other.blocks[k]) & mask;
            if diff != 0 {
                let i = diff.trailing_zeros();
                return ((self.blocks[k] >> i) & 1).cmp(&((other.blocks[k] >> i) & 1));
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b == 0 { '0' } else { '1' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Word::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(Error::Parse(format!("invalid letter {c:?} at position {i}"))),
            }
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Letter of a pattern over `{α, ᾱ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternSymbol {
    Alpha,
    AlphaBar,
}

/// A literal pattern; it stands for a word and its complement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pattern(pub Vec<PatternSymbol>);

impl Pattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The two words obtained from `α ↦ 0` and `α ↦ 1`.
    pub fn assignments(&self) -> [Word; 2] {
        let zero = Word::from_bits(self.0.iter().map(|s| match s {
            PatternSymbol::Alpha => 0,
            PatternSymbol::AlphaBar => 1,
        }));
        let one = zero.complement();
        [zero, one]
    }

    pub fn matches(&self, w: &Word) -> bool {
        pattern_of(w) == *self || pattern_of(&w.complement()) == *self
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                PatternSymbol::Alpha => "α",
                PatternSymbol::AlphaBar => "ᾱ",
            })?;
        }
        Ok(())
    }
}

/// Letterwise `0 ↦ α`, `1 ↦ ᾱ`.
pub fn pattern_of(w: &Word) -> Pattern {
    Pattern(
        w.iter()
            .map(|b| if b == 0 { PatternSymbol::Alpha } else { PatternSymbol::AlphaBar })
            .collect(),
    )
}

pub fn complement(w: &Word) -> Word {
    w.complement()
}

/// `t_i`: parity of the number of ones in the binary expansion of `i`.
#[inline]
pub fn tm_letter(i: u64) -> u8 {
    (i.count_ones() & 1) as u8
}

/// The first `n` letters of the Thue-Morse word.
pub fn tm_prefix(n: usize) -> Word {
    // t_{64k + j} = t_k xor t_j for j < 64, so every block is one of two patterns.
    const BLOCK: u64 = {
        let mut b = 0u64;
        let mut j = 0;
        while j < 64 {
            b |= ((j as u64).count_ones() as u64 & 1) << j;
            j += 1;
        }
        b
    };
    let blocks = (0..blocks_for(n) as u64)
        .map(|k| if tm_letter(k) == 0 { BLOCK } else { !BLOCK })
        .collect();
    let mut w = Word { blocks, len: n };
    w.clear_tail();
    w
}

/// `f_{2^q}`, the prefix of length `2^q`.
pub fn tm_block(q: u32) -> Word {
    tm_prefix(1usize << q)
}

/// Image under `0 ↦ 01`, `1 ↦ 10`.
pub fn morphism_image(w: &Word) -> Word {
    let mut out = Word::with_capacity(2 * w.len());
    for b in w.iter() {
        out.push(b);
        out.push(1 - b);
    }
    out
}

/// `m^k(w)`.
pub fn morphism_power(w: &Word, k: u32) -> Word {
    (0..k).fold(w.clone(), |acc, _| morphism_image(&acc))
}

pub fn morphism_preimage(w: &Word) -> Result<Word> {
    if w.len() % 2 != 0 {
        return Err(Error::OddLength(w.len()));
    }
    let mut out = Word::with_capacity(w.len() / 2);
    for i in (0..w.len()).step_by(2) {
        let (a, b) = (w.get(i), w.get(i + 1));
        if a == b {
            return Err(Error::NotInImage {
                position: i,
                block: format!("{a}{b}"),
            });
        }
        out.push(a);
    }
    Ok(out)
}
