//! Linear relations between the subsequences `P_{2^e n + c}` of the complexity
//! sequence: the catalog, its numerical verification, residue coverage, closure
//! of a generating set, and rediscovery from samples.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::complexity_brute;
use crate::error::{Error, Result};
use crate::nullspace::{integer_nullspace, normalize};
use crate::pairs::complexity_fast;

/// The subsequence `n ↦ P_{modulus·n + residue}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subsequence {
    pub modulus: u64,
    pub residue: u64,
}

impl Subsequence {
    pub fn new(modulus: u64, residue: u64) -> Self {
        assert!(modulus.is_power_of_two(), "modulus {modulus} is not a power of two");
        assert!(residue < modulus, "residue {residue} not below modulus {modulus}");
        Subsequence { modulus, residue }
    }

    pub fn index(&self, n: u64) -> u64 {
        self.modulus * n + self.residue
    }

    /// The two subsequences one level down: `2^{e+1} n + c` and `2^{e+1} n + 2^e + c`.
    pub fn children(&self) -> [Subsequence; 2] {
        let m = 2 * self.modulus;
        [
            Subsequence::new(m, self.residue),
            Subsequence::new(m, self.residue + self.modulus),
        ]
    }

    /// Whether every index of `self` is an index of `other`.
    pub fn within(&self, other: &Subsequence) -> bool {
        other.modulus <= self.modulus && self.residue % other.modulus == other.residue
    }

    /// All subsequences with modulus at most `max_modulus`, coarsest first.
    pub fn all_up_to(max_modulus: u64) -> Vec<Subsequence> {
        let mut out = Vec::new();
        let mut m = 1;
        while m <= max_modulus {
            out.extend((0..m).map(|c| Subsequence::new(m, c)));
            m *= 2;
        }
        out
    }
}

impl fmt::Display for Subsequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead = if self.modulus == 1 {
            String::from("n")
        } else {
            format!("{}n", self.modulus)
        };
        if self.residue == 0 {
            write!(f, "P[{lead}]")
        } else {
            write!(f, "P[{lead}+{}]", self.residue)
        }
    }
}

impl FromStr for Subsequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("subsequence {s:?}"));
        let inner = s
            .trim()
            .strip_prefix("P[")
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (lead, residue) = match inner.split_once('+') {
            Some((l, r)) => (l.trim(), r.trim().parse::<u64>().map_err(|_| bad())?),
            None => (inner.trim(), 0),
        };
        let modulus = match lead.strip_suffix('n').ok_or_else(bad)? {
            "" => 1,
            m => m.parse::<u64>().map_err(|_| bad())?,
        };
        if !modulus.is_power_of_two() || residue >= modulus {
            return Err(bad());
        }
        Ok(Subsequence::new(modulus, residue))
    }
}

/// `coefficient · P_{modulus·n + residue}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KernelTerm {
    pub coefficient: i64,
    pub sub: Subsequence,
}

impl KernelTerm {
    pub fn new(coefficient: i64, modulus: u64, residue: u64) -> Self {
        KernelTerm {
            coefficient,
            sub: Subsequence::new(modulus, residue),
        }
    }
}

/// `lhs = Σ rhs`, meant to hold for every `n ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KernelRelation {
    pub lhs: KernelTerm,
    pub rhs: Vec<KernelTerm>,
}

impl KernelRelation {
    /// Largest index touched at `n`.
    pub fn max_index(&self, n: u64) -> u64 {
        std::iter::once(&self.lhs)
            .chain(&self.rhs)
            .map(|t| t.sub.index(n))
            .max()
            .unwrap()
    }

    /// Largest `n` for which every touched index stays within `limit`.
    pub fn n_limit(&self, limit: u64) -> Option<u64> {
        std::iter::once(&self.lhs)
            .chain(&self.rhs)
            .map(|t| limit.checked_sub(t.sub.residue).map(|x| x / t.sub.modulus))
            .min()
            .flatten()
    }

    /// `lhs − Σ rhs` evaluated at `n`.
    pub fn defect(&self, n: u64, eval: &dyn Evaluator) -> Result<i128> {
        let mut d = self.lhs.coefficient as i128 * eval.eval(self.lhs.sub.index(n))? as i128;
        for t in &self.rhs {
            d -= t.coefficient as i128 * eval.eval(t.sub.index(n))? as i128;
        }
        Ok(d)
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: i64, sub: &Subsequence) -> fmt::Result {
    match c.abs() {
        1 => write!(f, "{sub}"),
        a => write!(f, "{a}*{sub}"),
    }
}

impl fmt::Display for KernelRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lhs.coefficient < 0 {
            f.write_str("-")?;
        }
        write_coefficient(f, self.lhs.coefficient, &self.lhs.sub)?;
        f.write_str(" =")?;
        if self.rhs.is_empty() {
            return f.write_str(" 0");
        }
        for (i, t) in self.rhs.iter().enumerate() {
            let sign = if t.coefficient < 0 { "-" } else { "+" };
            if i == 0 {
                if t.coefficient < 0 {
                    f.write_str(" -")?;
                } else {
                    f.write_str(" ")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write_coefficient(f, t.coefficient, &t.sub)?;
        }
        Ok(())
    }
}

fn parse_term(s: &str, negative: bool) -> Result<KernelTerm> {
    let s = s.trim();
    let (coefficient, sub) = match s.split_once('*') {
        Some((c, rest)) => (
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("coefficient in {s:?}")))?,
            rest,
        ),
        None => (1, s),
    };
    let sub: Subsequence = sub.parse()?;
    Ok(KernelTerm {
        coefficient: if negative { -coefficient } else { coefficient },
        sub,
    })
}

/// Splits `a + 2*b - c` into signed terms.
fn parse_sum(s: &str) -> Result<Vec<KernelTerm>> {
    let s = s.trim();
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut negative = false;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '+' | '-' if current.trim_end().ends_with(']') || current.trim().is_empty() => {
                if !current.trim().is_empty() {
                    terms.push(parse_term(&current, negative)?);
                    current.clear();
                    negative = false;
                }
                if ch == '-' {
                    negative = !negative;
                }
            }
            _ => current.push(ch),
        }
    }
    if current.trim().is_empty() {
        return Err(Error::Parse(format!("dangling sign in {s:?}")));
    }
    terms.push(parse_term(&current, negative)?);
    Ok(terms)
}

impl FromStr for KernelRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("relation without '=': {s:?}")))?;
        let lhs = parse_sum(l)?;
        let [lhs] = lhs[..] else {
            return Err(Error::Parse(format!("left side must be one term: {l:?}")));
        };
        Ok(KernelRelation {
            lhs,
            rhs: parse_sum(r)?,
        })
    }
}

impl Serialize for KernelRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KernelRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

const CATALOG: [&str; 13] = [
    "P[4n+1] = P[2n+1]",
    "P[8n+4] = P[8n+3] + P[4n+3] - P[4n+2]",
    "P[16n] = P[8n]",
    "P[16n+2] = P[8n+2]",
    "P[16n+6] = -P[16n+3] + P[8n+3] + 3*P[8n+2] + P[4n+3] - 2*P[4n+2] - P[2n+1]",
    "P[16n+7] = -P[16n+3] + P[8n+3] + 3*P[8n+2] + 2*P[4n+3] - 3*P[4n+2] - P[2n+1]",
    "P[16n+8] = P[8n+2] + P[4n+3] - P[2n+1]",
    "P[16n+10] = P[8n+2] + P[4n+3] - P[2n+1]",
    "P[16n+11] = -P[16n+3] + 3*P[8n+2] + P[4n+3] - 2*P[2n+1]",
    "P[16n+14] = P[16n+3] + P[8n+7] - P[8n+3] - P[8n+2] - P[4n+3] + 3*P[4n+2] - P[2n+1]",
    "P[16n+15] = P[16n+3] + 2*P[8n+7] - 3*P[8n+6] - 2*P[8n+3] + 6*P[4n+2] - 3*P[2n+1]",
    "P[32n+3] = P[8n+3]",
    "P[32n+19] = -P[16n+3] + P[8n+3] + 3*P[8n+2] + 2*P[4n+3] - 3*P[4n+2] - P[2n+1]",
];

/// The thirteen relations generating the kernel module.
pub fn relations_catalog() -> Vec<KernelRelation> {
    CATALOG
        .iter()
        .map(|s| s.parse().expect("catalog entries parse"))
        .collect()
}

/// The nine subsequences every kernel element reduces to.
pub fn standard_basis() -> Vec<Subsequence> {
    [(2, 1), (4, 2), (4, 3), (8, 0), (8, 2), (8, 3), (8, 6), (8, 7), (16, 3)]
        .into_iter()
        .map(|(m, c)| Subsequence::new(m, c))
        .collect()
}

/// Something that computes `P_n`.
pub trait Evaluator: Sync {
    fn eval(&self, n: u64) -> Result<u64>;
    fn name(&self) -> &'static str;
}

/// The logarithmic interval evaluator.
#[derive(Debug, Clone, Copy, Default)]
pub struct FastEvaluator;

impl Evaluator for FastEvaluator {
    fn eval(&self, n: u64) -> Result<u64> {
        complexity_fast(n)
    }

    fn name(&self) -> &'static str {
        "fast"
    }
}

/// Class counting over enumerated factors, memoized per index.
#[derive(Debug, Default)]
pub struct BruteEvaluator {
    memo: Mutex<HashMap<u64, u64>>,
}

impl BruteEvaluator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Evaluator for BruteEvaluator {
    fn eval(&self, n: u64) -> Result<u64> {
        if let Some(&v) = self.memo.lock().unwrap().get(&n) {
            return Ok(v);
        }
        let len = usize::try_from(n).map_err(|_| Error::Overflow(n))?;
        let v = complexity_brute(len, 2)?;
        self.memo.lock().unwrap().insert(n, v);
        Ok(v)
    }

    fn name(&self) -> &'static str {
        "brute"
    }
}

/// Values precomputed for `0..table.len()`, falling back to the fast evaluator.
#[derive(Debug, Clone)]
pub struct TableEvaluator {
    table: Vec<u64>,
}

impl TableEvaluator {
    pub fn fast_up_to(max_index: u64) -> Result<Self> {
        Ok(TableEvaluator {
            table: (0..=max_index).map(complexity_fast).collect::<Result<_>>()?,
        })
    }
}

impl Evaluator for TableEvaluator {
    fn eval(&self, n: u64) -> Result<u64> {
        match self.table.get(n as usize) {
            Some(&v) => Ok(v),
            None => complexity_fast(n),
        }
    }

    fn name(&self) -> &'static str {
        "table"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub relation: KernelRelation,
    pub range: (u64, u64),
    pub holds: bool,
    pub first_failure: Option<u64>,
}

/// Checks `rel` for every `n` in `[n_lo, n_hi]`, stopping at the first failure.
pub fn verify_relation(
    rel: &KernelRelation,
    n_lo: u64,
    n_hi: u64,
    eval: &dyn Evaluator,
) -> Result<VerifyReport> {
    let mut first_failure = None;
    for n in n_lo..=n_hi {
        if rel.defect(n, eval)? != 0 {
            first_failure = Some(n);
            break;
        }
    }
    Ok(VerifyReport {
        relation: rel.clone(),
        range: (n_lo, n_hi),
        holds: first_failure.is_none(),
        first_failure,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub modulus: u64,
    pub covered: BTreeSet<u64>,
    pub complete: bool,
}

/// Residues mod `modulus` hit by the left-hand sides of `rels`.
pub fn residue_coverage(rels: &[KernelRelation], modulus: u64) -> Result<Coverage> {
    let mut covered = BTreeSet::new();
    for rel in rels {
        let m = rel.lhs.sub.modulus;
        if m > modulus || modulus % m != 0 {
            return Err(Error::ModulusMismatch {
                relation: m,
                modulus,
            });
        }
        covered.extend((rel.lhs.sub.residue..modulus).step_by(m as usize));
    }
    Ok(Coverage {
        modulus,
        complete: covered.len() as u64 == modulus,
        covered,
    })
}

/// Rewrites `term` in terms of `basis`, substituting relations whose left side
/// contains it. Prefers the finest matching relation.
fn reduce(
    term: Subsequence,
    rels: &[KernelRelation],
    basis: &[Subsequence],
    budget: &mut u32,
    out: &mut HashMap<Subsequence, i64>,
    factor: i64,
) -> Result<()> {
    if basis.contains(&term) {
        *out.entry(term).or_default() += factor;
        return Ok(());
    }
    let fail = || Error::NonClosure(term.to_string());
    if *budget == 0 {
        return Err(fail());
    }
    *budget -= 1;
    let rel = rels
        .iter()
        .filter(|r| r.lhs.coefficient.abs() == 1 && term.within(&r.lhs.sub))
        .max_by_key(|r| r.lhs.sub.modulus)
        .ok_or_else(fail)?;
    // term(n) = lhs(k n + s) with k = M/m and s = (c − d)/m
    let (big, small) = (term.modulus, rel.lhs.sub.modulus);
    let k = big / small;
    let s = (term.residue - rel.lhs.sub.residue) / small;
    for t in &rel.rhs {
        let sub = Subsequence::new(t.sub.modulus * k, t.sub.modulus * s + t.sub.residue);
        let f = factor * t.coefficient * rel.lhs.coefficient;
        reduce(sub, rels, basis, budget, out, f)?;
    }
    Ok(())
}

/// Writes a subsequence as a ℤ-combination of `basis` using `rels`.
pub fn reduce_to_basis(
    term: Subsequence,
    rels: &[KernelRelation],
    basis: &[Subsequence],
) -> Result<Vec<KernelTerm>> {
    let mut budget = 256;
    let mut out = HashMap::new();
    reduce(term, rels, basis, &mut budget, &mut out, 1)?;
    let mut terms: Vec<KernelTerm> = out
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(sub, coefficient)| KernelTerm { coefficient, sub })
        .collect();
    terms.sort_by_key(|t| std::cmp::Reverse(t.sub));
    Ok(terms)
}

/// Confirms that every descendant of the basis, down to `depth` levels,
/// reduces to the basis through `rels`.
pub fn basis_closure_check(
    rels: &[KernelRelation],
    basis: &[Subsequence],
    depth: u32,
) -> Result<bool> {
    let mut level: Vec<Subsequence> = basis.to_vec();
    for _ in 0..depth {
        level = level.iter().flat_map(|s| s.children()).collect();
        for &s in &level {
            reduce_to_basis(s, rels, basis)?;
        }
    }
    Ok(true)
}

fn relation_from_vector(v: &[BigInt], columns: &[Subsequence]) -> Option<KernelRelation> {
    let lead = v.iter().rposition(|x| !x.is_zero())?;
    let lhs = KernelTerm {
        coefficient: v[lead].to_i64()?,
        sub: columns[lead],
    };
    let mut rhs = Vec::new();
    for i in (0..lead).rev() {
        if !v[i].is_zero() {
            rhs.push(KernelTerm {
                coefficient: (-&v[i]).to_i64()?,
                sub: columns[i],
            });
        }
    }
    Some(KernelRelation { lhs, rhs })
}

fn rank_key(rel: &KernelRelation) -> (u64, usize, i64, String) {
    let magnitude = std::iter::once(&rel.lhs)
        .chain(&rel.rhs)
        .map(|t| t.coefficient.abs())
        .max()
        .unwrap_or(0);
    (
        rel.lhs.sub.modulus,
        rel.rhs.len() + 1,
        magnitude,
        rel.to_string(),
    )
}

/// Searches for linear relations among the subsequences of modulus at most
/// `max_modulus`, sampling `n = 0..=n_max`. Candidates with more than
/// `max_terms` terms are dropped; the rest must also hold on
/// `[n_max + 1, 8 n_max]` to be reported.
pub fn discover_relations(
    n_max: u64,
    max_modulus: u64,
    max_terms: usize,
) -> Result<Vec<KernelRelation>> {
    if !max_modulus.is_power_of_two() {
        return Err(Error::ModulusMismatch {
            relation: max_modulus,
            modulus: max_modulus.next_power_of_two(),
        });
    }
    let columns = Subsequence::all_up_to(max_modulus);
    let rows = n_max as usize + 1;
    if rows <= columns.len() {
        return Err(Error::InsufficientSamples {
            rows,
            columns: columns.len(),
        });
    }
    let check_hi = 8 * n_max.max(1);
    let values = TableEvaluator::fast_up_to(max_modulus * (check_hi + 1))?;
    let matrix: Vec<Vec<BigInt>> = (0..=n_max)
        .map(|n| {
            columns
                .iter()
                .map(|s| values.eval(s.index(n)).map(BigInt::from))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let basis = integer_nullspace(&matrix);

    // Sparse relations are often a difference of two basis vectors that share
    // their pivot part, so pairwise eliminations are tried as well.
    let mut candidates: BTreeSet<Vec<BigInt>> = basis.iter().cloned().collect();
    for (i, u) in basis.iter().enumerate() {
        for v in &basis[i + 1..] {
            for k in 0..columns.len() {
                if u[k].is_zero() || v[k].is_zero() {
                    continue;
                }
                let mut w: Vec<BigInt> = u.iter().zip(v).map(|(a, b)| a * &v[k] - b * &u[k]).collect();
                if w.iter().all(Zero::is_zero) {
                    continue;
                }
                normalize(&mut w);
                candidates.insert(w);
            }
        }
    }

    let mut found: Vec<KernelRelation> = Vec::new();
    for v in candidates {
        let terms = v.iter().filter(|x| !x.is_zero()).count();
        if terms == 0 || terms > max_terms {
            continue;
        }
        let Some(rel) = relation_from_vector(&v, &columns) else {
            continue;
        };
        if verify_relation(&rel, n_max + 1, check_hi, &values)?.holds {
            found.push(rel);
        }
    }
    found.sort_by_cached_key(rank_key);
    found.dedup();
    Ok(found)
}
