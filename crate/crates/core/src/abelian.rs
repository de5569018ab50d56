//! ℓ-abelian equivalence, the 2-abelian class tuple, and the odd-frame
//! compression of a class into `(first letter, pairs, frame bit, length)`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{factor_windows, require_factor};
use crate::frames::extensible_2frame;
use crate::word::Word;

/// Counts of `00`, `01`, `10`, `11` plus the first and last letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassTuple {
    pub c00: u64,
    pub c01: u64,
    pub c10: u64,
    pub c11: u64,
    pub first: u8,
    pub last: u8,
}

impl fmt::Display for ClassTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{},{})",
            self.c00, self.c01, self.c10, self.c11, self.first, self.last
        )
    }
}

impl FromStr for ClassTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("class tuple {s:?}"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(bad)?;
        let v: Vec<u64> = inner
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match v[..] {
            [c00, c01, c10, c11, first @ 0..=1, last @ 0..=1] => Ok(ClassTuple {
                c00,
                c01,
                c10,
                c11,
                first: first as u8,
                last: last as u8,
            }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for ClassTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `(w_0, p(w), r(w))` together with `|w|`, which the reconstruction needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VectTuple {
    pub first: u8,
    pub p: u64,
    pub r: u8,
    pub length: u64,
}

impl fmt::Display for VectTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}; length {})", self.first, self.p, self.r, self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodingSymbol {
    /// `01` or `10`
    D,
    /// `00` or `11`
    E,
    /// a dangling single letter
    S,
}

impl CodingSymbol {
    fn as_char(self) -> char {
        match self {
            CodingSymbol::D => 'D',
            CodingSymbol::E => 'E',
            CodingSymbol::S => 'S',
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ShortCoding(pub Vec<CodingSymbol>);

impl ShortCoding {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with_single(&self) -> bool {
        self.0.first() == Some(&CodingSymbol::S)
    }

    /// Whether the symbol string contains `pattern` (e.g. `"DEED"`).
    pub fn contains(&self, pattern: &str) -> bool {
        self.to_string().contains(pattern)
    }

    /// Structural check: at most one leading and one trailing `S`, none inside.
    pub fn validate(&self) -> Result<()> {
        let malformed = |reason| Error::MalformedCoding {
            coding: self.to_string(),
            reason,
        };
        let n = self.0.len();
        if n == 0 {
            return Err(malformed("empty coding"));
        }
        for (i, s) in self.0.iter().enumerate() {
            if *s == CodingSymbol::S && i != 0 && i != n - 1 {
                return Err(malformed("single letter inside the coding"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ShortCoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|c| c.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for ShortCoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'D' => Ok(CodingSymbol::D),
                'E' => Ok(CodingSymbol::E),
                'S' => Ok(CodingSymbol::S),
                _ => Err(Error::Parse(format!("invalid coding symbol {c:?}"))),
            })
            .collect::<Result<_>>()
            .map(ShortCoding)
    }
}

impl Serialize for ShortCoding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sorted occurrence counts of the length-`l` factors of `w`.
fn gram_counts(w: &Word, l: usize) -> Vec<(Word, u64)> {
    let mut counts: HashMap<Word, u64> = HashMap::new();
    if l <= w.len() {
        for i in 0..=w.len() - l {
            *counts.entry(w.extract(i, l)).or_default() += 1;
        }
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_unstable();
    v
}

/// Same `(ℓ−1)`-prefix, `(ℓ−1)`-suffix and counts of all length-`ℓ` factors.
pub fn l_abelian_equivalent(u: &Word, v: &Word, l: usize) -> bool {
    assert!(l >= 1, "order must be at least 1");
    if u.len() != v.len() {
        return false;
    }
    u.prefix(l - 1) == v.prefix(l - 1)
        && u.suffix(l - 1) == v.suffix(l - 1)
        && gram_counts(u, l) == gram_counts(v, l)
}

pub fn class_of(w: &Word) -> Result<ClassTuple> {
    let (first, last) = w.first().zip(w.last()).ok_or(Error::EmptyWord)?;
    let [c00, c01, c10, c11] = w.adjacent_counts().map(|c| c as u64);
    Ok(ClassTuple {
        c00,
        c01,
        c10,
        c11,
        first,
        last,
    })
}

/// Offset (0 or 1) of the first odd-frame boundary.
fn odd_frame_offset(w: &Word) -> Result<usize> {
    // pairs only ever sit in the odd frame
    if let Some(j) = w.first_square_letter() {
        return Ok(j % 2);
    }
    if w.len() < 4 {
        return Err(Error::FrameAmbiguous(w.to_string()));
    }
    Ok(1 - extensible_2frame(w)?)
}

fn code_with_offset(w: &Word, offset: usize) -> ShortCoding {
    let mut out = Vec::with_capacity(w.len() / 2 + 2);
    if offset == 1 {
        out.push(CodingSymbol::S);
    }
    let mut i = offset;
    while i + 1 < w.len() {
        out.push(if w.get(i) == w.get(i + 1) {
            CodingSymbol::E
        } else {
            CodingSymbol::D
        });
        i += 2;
    }
    if i < w.len() {
        out.push(CodingSymbol::S);
    }
    ShortCoding(out)
}

/// Coding of `w` in its odd frame.
pub fn short_coding(w: &Word) -> Result<ShortCoding> {
    require_factor(w)?;
    if w.len() < 2 {
        return Err(Error::TooShort {
            length: w.len(),
            min: 2,
        });
    }
    Ok(code_with_offset(w, odd_frame_offset(w)?))
}

/// Inverse of [`short_coding`] given the first letter.
pub fn decode_short_coding(c: &ShortCoding, first: u8) -> Result<Word> {
    c.validate()?;
    let mut w = Word::with_capacity(2 * c.len());
    let mut next = first & 1;
    for s in &c.0 {
        // every odd-frame block starts with the complement of the previous letter
        match s {
            CodingSymbol::S => w.push(next),
            CodingSymbol::D => {
                w.push(next);
                w.push(1 - next);
            }
            CodingSymbol::E => {
                w.push(next);
                w.push(next);
            }
        }
        next = 1 - w.last().unwrap();
    }
    Ok(w)
}

pub fn vect_of(w: &Word) -> Result<VectTuple> {
    require_factor(w)?;
    if w.len() < 4 {
        return Err(Error::TooShort {
            length: w.len(),
            min: 4,
        });
    }
    let [c00, _, _, c11] = w.adjacent_counts();
    let r = u8::from(odd_frame_offset(w)? == 1);
    Ok(VectTuple {
        first: w.get(0),
        p: (c00 + c11) as u64,
        r,
        length: w.len() as u64,
    })
}

/// Rebuilds the class tuple from a vect tuple.
///
/// Deleting one letter from every pair leaves an alternating word of length
/// `|w| − p` starting with `w_0`; it fixes the `01`/`10` counts and the last
/// letter. The pairs alternate, the first one being `w_0 w_0` in the odd
/// frame and `w̄_0 w̄_0` otherwise.
pub fn class_from_vect(v: &VectTuple) -> Result<ClassTuple> {
    let inconsistent = || Error::InconsistentTuple(v.to_string());
    if v.length == 0 || v.first > 1 || v.r > 1 {
        return Err(inconsistent());
    }
    let r = v.r as u64;
    if v.length < r || v.p > (v.length - r) / 2 {
        return Err(inconsistent());
    }
    let alt = v.length - v.p;
    let steps = alt - 1;
    let (up, down) = (steps.div_ceil(2), steps / 2);
    let (c01, c10) = if v.first == 0 { (up, down) } else { (down, up) };
    let last = v.first ^ (steps % 2) as u8;

    let pair_letter = v.first ^ v.r;
    let (lead, other) = (v.p.div_ceil(2), v.p / 2);
    let (c00, c11) = if pair_letter == 0 { (lead, other) } else { (other, lead) };
    Ok(ClassTuple {
        c00,
        c01,
        c10,
        c11,
        first: v.first,
        last,
    })
}

/// Canonical bucket key: prefix, suffix and the sorted `ℓ`-gram count vector.
fn class_key(w: &Word, l: usize) -> Vec<u8> {
    let mut key = Vec::new();
    let put_word = |key: &mut Vec<u8>, x: &Word| {
        key.extend_from_slice(&(x.len() as u32).to_le_bytes());
        key.extend(x.iter());
    };
    put_word(&mut key, &w.prefix(l - 1));
    put_word(&mut key, &w.suffix(l - 1));
    match l {
        1 => {
            let ones = w.iter().filter(|&b| b == 1).count() as u64;
            key.extend_from_slice(&ones.to_le_bytes());
        }
        2 => {
            for c in w.adjacent_counts() {
                key.extend_from_slice(&(c as u64).to_le_bytes());
            }
        }
        _ => {
            for (g, c) in gram_counts(w, l) {
                put_word(&mut key, &g);
                key.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    key
}

/// Number of `ℓ`-abelian classes among the factors of length `n`.
pub fn complexity_brute(n: usize, l: usize) -> Result<u64> {
    assert!(l >= 1, "order must be at least 1");
    let windows = factor_windows(n)?;
    if n == 0 {
        return Ok(1);
    }
    let keys: HashSet<Vec<u8>> = if l <= 2 {
        // Counts straight from prefix sums over the text; the key layout is
        // the same as `class_key`.
        let text = &windows.text;
        let mut sums = vec![[0u64; 4]; text.len()];
        for i in 1..text.len() {
            sums[i] = sums[i - 1];
            sums[i][(2 * text.get(i - 1) + text.get(i)) as usize] += 1;
        }
        windows
            .starts
            .iter()
            .map(|&i| {
                let j = i + n - 1;
                let mut key = Vec::with_capacity(48);
                let edge = if l == 1 { Vec::new() } else { vec![text.get(i)] };
                let tail = if l == 1 { Vec::new() } else { vec![text.get(j)] };
                for part in [edge, tail] {
                    key.extend_from_slice(&(part.len() as u32).to_le_bytes());
                    key.extend(part);
                }
                let counts: [u64; 4] = std::array::from_fn(|k| sums[j][k] - sums[i][k]);
                if l == 1 {
                    let ones = counts[2] + counts[3] + text.get(j) as u64;
                    key.extend_from_slice(&ones.to_le_bytes());
                } else {
                    for c in counts {
                        key.extend_from_slice(&c.to_le_bytes());
                    }
                }
                key
            })
            .collect()
    } else {
        windows.words().map(|w| class_key(&w, l)).collect()
    };
    Ok(keys.len() as u64)
}
