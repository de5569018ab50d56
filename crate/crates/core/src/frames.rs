//! Reading frames, maximal extensible reading frames (MERF) and the
//! unique-extension bounds.
//!
//! A `2^q`-reading frame is described by its *offset*: the position in the
//! word of the first block boundary, in `[0, 2^q)`. Letter `j` then sits at
//! position `(j + 2^q - offset) mod 2^q` of its frame word, and each frame
//! word must equal `f_{2^q}` or its complement there.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{factors_cached, is_factor, require_factor};
use crate::word::{morphism_power, morphism_preimage, tm_letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameFactorization {
    pub q: u32,
    pub offset: usize,
    /// Letters before the first boundary. If the word ends before that
    /// boundary this is the whole word, an interior segment of one frame word.
    pub prefix: Word,
    pub blocks: Vec<Word>,
    pub suffix: Word,
}

impl FrameFactorization {
    pub fn reconstruct(&self) -> Word {
        let mut w = self.prefix.clone();
        for b in &self.blocks {
            w.extend_from(b);
        }
        w.extend_from(&self.suffix);
        w
    }
}

/// Block index and in-block position of letter `j`.
#[inline]
fn frame_position(j: usize, q: u32, offset: usize) -> (usize, usize) {
    let size = 1usize << q;
    let shifted = j + size - offset;
    (shifted >> q, shifted & (size - 1))
}

/// Whether `w` reads consistently in the `2^q`-frame at `offset`, ignoring factorhood.
pub fn frame_is_valid(w: &Word, q: u32, offset: usize) -> bool {
    assert!(offset < 1 << q);
    let mut current: Option<(usize, u8)> = None;
    for j in 0..w.len() {
        let (block, pos) = frame_position(j, q, offset);
        let flip = w.get(j) ^ tm_letter(pos as u64);
        match current {
            Some((b, f)) if b == block => {
                if f != flip {
                    return false;
                }
            }
            _ => current = Some((block, flip)),
        }
    }
    true
}

fn frame_offsets(w: &Word, q: u32) -> Vec<usize> {
    (0..1usize << q).filter(|&o| frame_is_valid(w, q, o)).collect()
}

/// All offsets at which `w` admits a `2^q`-reading frame.
pub fn reading_frames(w: &Word, q: u32) -> Result<Vec<usize>> {
    require_factor(w)?;
    Ok(frame_offsets(w, q))
}

pub fn frame_factorization(w: &Word, q: u32, offset: usize) -> Option<FrameFactorization> {
    if offset >= 1 << q || !frame_is_valid(w, q, offset) {
        return None;
    }
    let size = 1usize << q;
    let head = offset.min(w.len());
    let full = (w.len() - head) / size;
    let blocks = (0..full).map(|k| w.extract(head + k * size, size)).collect();
    let tail_start = head + full * size;
    Some(FrameFactorization {
        q,
        offset,
        prefix: w.prefix(head),
        blocks,
        suffix: w.slice(tail_start..w.len()),
    })
}

/// Completes the partial frame words at both ends of `w` in the given frame.
///
/// Returns the filled word and the number of letters added on the left.
/// The caller guarantees that the frame is valid.
pub fn fill_in_frame(w: &Word, q: u32, offset: usize) -> (Word, usize) {
    debug_assert!(frame_is_valid(w, q, offset));
    if w.is_empty() {
        return (Word::new(), 0);
    }
    let size = 1usize << q;
    let (_, first_pos) = frame_position(0, q, offset);
    let (_, last_pos) = frame_position(w.len() - 1, q, offset);
    let lead_flip = w.get(0) ^ tm_letter(first_pos as u64);
    let tail_flip = w.get(w.len() - 1) ^ tm_letter(last_pos as u64);
    let mut out = Word::with_capacity(w.len() + 2 * size);
    for pos in 0..first_pos {
        out.push(tm_letter(pos as u64) ^ lead_flip);
    }
    out.extend_from(w);
    for pos in last_pos + 1..size {
        out.push(tm_letter(pos as u64) ^ tail_flip);
    }
    (out, first_pos)
}

/// Frames of `w` whose filled word is still a factor: the mechanical
/// criterion for extensibility.
pub fn extensible_frames_by_fill(w: &Word, q: u32) -> Vec<usize> {
    frame_offsets(w, q)
        .into_iter()
        .filter(|&o| is_factor(&fill_in_frame(w, q, o).0))
        .collect()
}

/// One row of the lookup table of MERFs for words of length at most 4,
/// keyed by the pattern normalized to start with `α`.
#[derive(Debug, Clone, Copy)]
pub struct LookupRow {
    pub pattern: &'static str,
    /// Size exponent of the MERF.
    pub merf_q: u32,
    /// Offset of the extensible 2-reading frame, if there is one.
    pub two_frame: Option<usize>,
    /// For lengths up to 3: the filled MERF word (as a pattern) and the
    /// position of the input inside it.
    pub extended: Option<(&'static str, usize)>,
}

const fn row(
    pattern: &'static str,
    merf_q: u32,
    two_frame: Option<usize>,
    extended: Option<(&'static str, usize)>,
) -> LookupRow {
    LookupRow {
        pattern,
        merf_q,
        two_frame,
        extended,
    }
}

/// `a` stands for `α`, `b` for `ᾱ`.
pub const LOOKUP: [LookupRow; 11] = [
    row("a", 0, None, Some(("a", 0))),
    row("aa", 1, Some(1), Some(("baab", 1))),
    row("ab", 0, None, Some(("ab", 0))),
    row("aab", 1, Some(1), Some(("baab", 1))),
    row("aba", 0, None, Some(("aba", 0))),
    row("abb", 1, Some(0), Some(("abba", 0))),
    row("aaba", 2, Some(1), None),
    row("aabb", 1, Some(1), None),
    row("abaa", 2, Some(1), None),
    row("abab", 2, Some(0), None),
    row("abba", 1, Some(0), None),
];

fn normalized_key(w: &Word) -> String {
    let flip = w.first().unwrap_or(0);
    w.iter().map(|b| if b ^ flip == 0 { 'a' } else { 'b' }).collect()
}

/// Table row for a nonempty word of length at most 4.
pub fn lookup(w: &Word) -> Option<&'static LookupRow> {
    if w.is_empty() || w.len() > 4 {
        return None;
    }
    let key = normalized_key(w);
    LOOKUP.iter().find(|r| r.pattern == key)
}

fn realize(pattern: &str, first: u8) -> Word {
    Word::from_bits(pattern.chars().map(|c| if c == 'a' { first } else { 1 - first }))
}

/// Offset of the 2-frame, read off the table at the first four letters.
fn two_frame_offset(w: &Word) -> Result<usize> {
    let head = w.prefix(4);
    lookup(&head)
        .and_then(|r| r.two_frame)
        .ok_or_else(|| Error::NoExtensibleFrame(w.to_string()))
}

/// Offset (0 or 1) of the extensible 2-reading frame of a factor of length at least 4.
pub fn extensible_2frame(w: &Word) -> Result<usize> {
    require_factor(w)?;
    if w.len() < 4 {
        return Err(Error::TooShort {
            length: w.len(),
            min: 4,
        });
    }
    two_frame_offset(w)
}

/// Fills the extensible 2-reading frame; also returns the number of letters added on the left.
fn fill_two_frame(w: &Word) -> Result<(Word, usize)> {
    let offset = two_frame_offset(w)?;
    Ok(fill_in_frame(w, 1, offset))
}

/// `w` with its partial frame words completed in the extensible 2-reading frame.
pub fn fill_frame(w: &Word) -> Result<Word> {
    require_factor(w)?;
    if w.len() < 2 {
        return Err(Error::TooShort {
            length: w.len(),
            min: 2,
        });
    }
    fill_two_frame(w).map(|(filled, _)| filled)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MerfStep {
    pub q: u32,
    pub filled: Word,
    pub preimage: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MerfResult {
    pub extended: Word,
    pub q: u32,
    pub frame_size: u64,
    pub original_offset: usize,
    pub trace: Vec<MerfStep>,
}

fn has_nontrivial_frame(w: &Word) -> bool {
    w.len() >= 4 || lookup(w).is_some_and(|r| r.merf_q > 0)
}

/// Runs the fill / preimage loop without the factor check or the table shortcut.
pub fn merf_loop(w: &Word) -> Result<MerfResult> {
    let mut current = w.clone();
    let mut q = 0u32;
    let mut offset = 0usize;
    let mut trace = Vec::new();
    while has_nontrivial_frame(&current) {
        let (filled, left) = fill_two_frame(&current)?;
        offset += left << q;
        q += 1;
        let preimage = morphism_preimage(&filled)?;
        trace.push(MerfStep {
            q,
            filled,
            preimage: preimage.clone(),
        });
        current = preimage;
    }
    Ok(MerfResult {
        extended: morphism_power(&current, q),
        q,
        frame_size: 1 << q,
        original_offset: offset,
        trace,
    })
}

/// The maximal extensible reading frame of a factor and its filled word.
pub fn merf(w: &Word) -> Result<MerfResult> {
    if w.is_empty() {
        return Err(Error::TooShort { length: 0, min: 1 });
    }
    require_factor(w)?;
    if w.len() <= 3 {
        let row = lookup(w).expect("every factor of length <= 3 is tabulated");
        let (pattern, original_offset) = row.extended.expect("short rows carry their extension");
        return Ok(MerfResult {
            extended: realize(pattern, w.get(0)),
            q: row.merf_q,
            frame_size: 1 << row.merf_q,
            original_offset,
            trace: Vec::new(),
        });
    }
    merf_loop(w)
}

/// Letters uniquely forced by `w`.
pub fn determined_letters(w: &Word) -> Result<usize> {
    Ok(merf(w)?.extended.len() - w.len())
}

/// `(u_min(n), u_max(n))`.
pub fn unique_extension_bounds(n: u64) -> (u64, u64) {
    assert!(n >= 1, "bounds are defined for n >= 1");
    match n {
        1 => (0, 0),
        2 => (0, 2),
        3 => (0, 1),
        _ => {
            let q = 63 - n.leading_zeros();
            let block = 1u64 << (q - 1);
            let u_min = (block - n % block) % block;
            let lg = 63 - (n - 2).leading_zeros();
            let u_max = (1u64 << (lg + 2)) - n;
            (u_min, u_max)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminedExtrema {
    pub length: usize,
    pub min: usize,
    pub min_witness: Word,
    pub max: usize,
    pub max_witness: Word,
}

/// Smallest and largest number of determined letters over `T_n`.
pub fn determined_extrema(n: usize) -> Result<DeterminedExtrema> {
    if n == 0 {
        return Err(Error::TooShort { length: 0, min: 1 });
    }
    let set = factors_cached(n)?;
    let mut best: Option<DeterminedExtrema> = None;
    for w in set.iter() {
        let d = determined_letters(w)?;
        match best.as_mut() {
            None => {
                best = Some(DeterminedExtrema {
                    length: n,
                    min: d,
                    min_witness: w.clone(),
                    max: d,
                    max_witness: w.clone(),
                })
            }
            Some(b) => {
                if d < b.min {
                    b.min = d;
                    b.min_witness = w.clone();
                }
                if d > b.max {
                    b.max = d;
                    b.max_witness = w.clone();
                }
            }
        }
    }
    Ok(best.expect("T_n is nonempty"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioExtrema {
    pub min: Ratio<u64>,
    pub min_witness: Word,
    pub max: Ratio<u64>,
    pub max_witness: Word,
}

/// Extremes of `|merf(w).extended| / |w|` over all factors with `1 <= |w| <= n_max`.
pub fn extension_ratio_extrema(n_max: usize) -> Result<RatioExtrema> {
    let mut best: Option<RatioExtrema> = None;
    for n in 1..=n_max {
        for w in factors_cached(n)?.iter() {
            let r = Ratio::new(merf(w)?.extended.len() as u64, n as u64);
            match best.as_mut() {
                None => {
                    best = Some(RatioExtrema {
                        min: r,
                        min_witness: w.clone(),
                        max: r,
                        max_witness: w.clone(),
                    })
                }
                Some(b) => {
                    if r < b.min {
                        b.min = r;
                        b.min_witness = w.clone();
                    }
                    if r > b.max {
                        b.max = r;
                        b.max_witness = w.clone();
                    }
                }
            }
        }
    }
    best.ok_or(Error::TooShort { length: 0, min: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::enumerate_factors;
    use crate::word::tm_prefix;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reading_frame_examples() {
        assert_eq!(reading_frames(&w("0101"), 1).unwrap(), vec![0, 1]);
        assert_eq!(reading_frames(&w("0101"), 2).unwrap(), vec![2]);
        assert_eq!(reading_frames(&w("0"), 0).unwrap(), vec![0]);
        assert!(matches!(reading_frames(&w("000"), 1), Err(Error::NotAFactor(_))));
    }

    #[test]
    fn factorization_reconstructs() {
        let x = w("0110010");
        for q in 0..4 {
            for o in reading_frames(&x, q).unwrap() {
                let f = frame_factorization(&x, q, o).unwrap();
                assert_eq!(f.reconstruct(), x);
                assert!(f.blocks.iter().all(|b| b.len() == 1 << q));
            }
        }
        let f = frame_factorization(&w("0101"), 2, 2).unwrap();
        assert_eq!(f.prefix, w("01"));
        assert!(f.blocks.is_empty());
        assert_eq!(f.suffix, w("01"));
    }

    #[test]
    fn extensible_frame_examples() {
        assert_eq!(extensible_2frame(&w("0101")).unwrap(), 0);
        assert_eq!(extensible_2frame(&w("0110")).unwrap(), 0);
        assert_eq!(extensible_2frame(&w("1001")).unwrap(), 0);
        assert!(matches!(extensible_2frame(&w("011")), Err(Error::TooShort { .. })));
        // fill-check oracle: the shifted frame of 0110 forces 101101 which is not a factor
        assert_eq!(extensible_frames_by_fill(&w("0110"), 1), vec![0]);
        assert_eq!(extensible_frames_by_fill(&w("1001"), 1), vec![0]);
        assert_eq!(extensible_frames_by_fill(&w("0101"), 1), vec![0]);
    }

    #[test]
    fn table_agrees_with_fill_check_on_all_factors() {
        for n in 4..=40 {
            for x in enumerate_factors(n).unwrap().iter() {
                assert_eq!(
                    extensible_frames_by_fill(x, 1),
                    vec![extensible_2frame(x).unwrap()],
                    "{x}"
                );
            }
        }
    }

    #[test]
    fn fill_examples() {
        assert_eq!(fill_frame(&w("0110010")).unwrap(), w("01100101"));
        assert_eq!(fill_frame(&w("0110")).unwrap(), w("0110"));
        // both frames of 0100 checked against T: only the left-filled one survives
        assert_eq!(extensible_frames_by_fill(&w("0100"), 1), vec![1]);
        assert_eq!(fill_frame(&w("0100")).unwrap(), w("101001"));
        assert!(matches!(fill_frame(&w("01")), Err(Error::NoExtensibleFrame(_))));
    }

    #[test]
    fn merf_examples() {
        let r = merf(&w("0110010")).unwrap();
        assert_eq!(r.extended, w("0110100110010110"));
        assert_eq!(r.frame_size, 8);
        assert_eq!(r.original_offset, 6);
        let steps: Vec<(String, String)> = r
            .trace
            .iter()
            .map(|s| (s.filled.to_string(), s.preimage.to_string()))
            .collect();
        assert_eq!(
            steps,
            [
                ("01100101".to_string(), "0100".to_string()),
                ("101001".to_string(), "110".to_string()),
                ("0110".to_string(), "01".to_string()),
            ]
        );
        let r = merf(&w("011")).unwrap();
        assert_eq!((r.extended, r.frame_size), (w("0110"), 2));
        let r = merf(&w("01")).unwrap();
        assert_eq!((r.extended, r.frame_size), (w("01"), 1));
        assert!(matches!(merf(&Word::new()), Err(Error::TooShort { .. })));
        assert!(matches!(merf(&w("0000")), Err(Error::NotAFactor(_))));
    }

    #[test]
    fn short_words_table_matches_loop() {
        for n in 1..=4 {
            for x in enumerate_factors(n).unwrap().iter() {
                let looped = merf_loop(x).unwrap();
                let tabled = merf(x).unwrap();
                assert_eq!(looped.extended, tabled.extended, "{x}");
                assert_eq!(looped.original_offset, tabled.original_offset, "{x}");
                assert_eq!(looped.q, lookup(x).unwrap().merf_q, "{x}");
            }
        }
    }

    #[test]
    fn determined_letter_examples() {
        assert_eq!(determined_letters(&w("0110010")).unwrap(), 9);
        assert_eq!(determined_letters(&tm_prefix(8)).unwrap(), 0);
        assert_eq!(determined_letters(&w("001101")).unwrap(), 10);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(unique_extension_bounds(2), (0, 2));
        assert_eq!(unique_extension_bounds(6), (0, 10));
        assert_eq!(unique_extension_bounds(8), (0, 8));
        assert_eq!(unique_extension_bounds(1), (0, 0));
        assert_eq!(unique_extension_bounds(3), (0, 1));
        // n = 2^q + r: u_min = (-n) mod 2^{q-1}
        assert_eq!(unique_extension_bounds(11).0, 1);
        assert_eq!(unique_extension_bounds(13).0, 3);
    }

    #[test]
    fn ratio_examples() {
        let r = extension_ratio_extrema(6).unwrap();
        assert_eq!(r.max, Ratio::new(16, 6));
        assert_eq!(r.min, Ratio::from_integer(1));
        let r = extension_ratio_extrema(8).unwrap();
        assert_eq!(r.min, Ratio::from_integer(1));
        let f4 = tm_prefix(4);
        let v = f4.concat(&f4.complement());
        assert_eq!(merf(&v).unwrap().extended.len(), v.len());
        let r = extension_ratio_extrema(10).unwrap();
        assert!(r.max >= Ratio::new(16, 6) && r.max < Ratio::from_integer(4));
    }
}
