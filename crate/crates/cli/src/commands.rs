use std::fmt;
use std::io;

use serde::Serialize;
use serde_json::json;

use tmab::abelian::{complexity_brute, decode_short_coding, short_coding, ShortCoding};
use tmab::analysis::{palindrome_block, step_check, unbounded_witness};
use tmab::factors::{enumerate_factors, factor_complexity};
use tmab::frames::{determined_extrema, merf, unique_extension_bounds};
use tmab::pairs::{complexity_fast, pairs_brute, pairs_interval, IntInterval};
use tmab::regularity::{
    basis_closure_check, discover_relations, relations_catalog, residue_coverage,
    standard_basis, verify_relation, BruteEvaluator, Evaluator, FastEvaluator,
};
use tmab::word::tm_prefix;
use tmab::Word;

use crate::output::{Format, Sink, Status};
use crate::{Command, ComplexityMethod, EvaluatorKind, PairsMethod, Verify};

/// Longest length for which `bounds` also searches all factors.
const EXHAUSTIVE_BOUNDS_MAX: u64 = 64;
/// Depth of the closure check run by `verify coverage`.
const CLOSURE_DEPTH: u32 = 4;

#[derive(Debug)]
pub enum Failure {
    Lib(tmab::Error),
    Usage(String),
    Io(io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => e.fmt(f),
            Failure::Usage(s) => f.write_str(s),
            Failure::Io(e) => e.fmt(f),
        }
    }
}

impl From<tmab::Error> for Failure {
    fn from(e: tmab::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// 2 for anything the caller got wrong, 1 for everything else.
pub fn exit_code(f: &Failure) -> u8 {
    use tmab::Error::*;
    match f {
        Failure::Usage(_) => 2,
        Failure::Io(_) => 1,
        Failure::Lib(e) => match e {
            Parse(_) | NotAFactor(_) | TooShort { .. } | FrameAmbiguous(_) | MalformedCoding { .. }
            | OddArgument(_) | Overflow(_) | ModulusMismatch { .. } | InsufficientSamples { .. } => 2,
            _ => 1,
        },
    }
}

type Out = Result<(), Failure>;

pub fn run(cmd: Command, sink: &mut Sink) -> Out {
    match cmd {
        Command::Word { length } => word(length, sink),
        Command::Factors { length } => factors(length, sink),
        Command::Complexity { n, l, method } => complexity(n, l, method, sink),
        Command::Pairs { n, method } => pairs(n, method, sink),
        Command::Merf { word, trace } => merf_cmd(&word, trace, sink),
        Command::Bounds { length } => bounds(length, sink),
        Command::Coding { word } => coding(&word, sink),
        Command::Decode { coding, first } => decode(&coding, first, sink),
        Command::Verify(v) => match v.what {
            Verify::Relations { n_max, evaluator } => verify_relations(n_max, evaluator, sink),
            Verify::Palindromes { q_max } => verify_palindromes(q_max, sink),
            Verify::Steps { n_max } => verify_steps(n_max, sink),
            Verify::Coverage => verify_coverage(sink),
        },
        Command::Witness { steps } => witness(steps, sink),
        Command::Discover {
            n_max,
            modulus,
            max_terms,
        } => discover(n_max, modulus, max_terms, sink),
    }
}

fn word(length: usize, sink: &mut Sink) -> Out {
    let w = tm_prefix(length);
    let text = w.to_string();
    sink.emit("word", &json!({ "length": length, "word": w }), Status::Ok, &text, None)?;
    Ok(())
}

fn factors(length: usize, sink: &mut Sink) -> Out {
    let set = enumerate_factors(length)?;
    let expected = factor_complexity(length as u64);
    let words: Vec<&Word> = set.iter().collect();
    for w in &words {
        sink.note(&w.to_string())?;
    }
    let ok = words.len() as u64 == expected;
    sink.emit(
        "factors",
        &json!({ "length": length, "count": words.len(), "expected": expected, "factors": words }),
        Status::from_ok(ok),
        &format!("{} factors of length {length} (formula: {expected})", words.len()),
        None,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ComplexityRow {
    n: u64,
    l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fast: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute: Option<u64>,
}

fn brute_len(n: u64) -> Result<usize, Failure> {
    usize::try_from(n).map_err(|_| Failure::Lib(tmab::Error::Overflow(n)))
}

fn complexity(range: (u64, u64), l: usize, method: ComplexityMethod, sink: &mut Sink) -> Out {
    if l == 0 {
        return Err(Failure::Usage("--l must be at least 1".into()));
    }
    if l != 2 && method != ComplexityMethod::Brute {
        return Err(Failure::Usage(format!(
            "the fast method only covers l = 2; use --method brute for l = {l}"
        )));
    }
    for n in range.0..=range.1 {
        let fast = match method {
            ComplexityMethod::Brute => None,
            _ => Some(complexity_fast(n)?),
        };
        let brute = match method {
            ComplexityMethod::Fast => None,
            _ => Some(complexity_brute(brute_len(n)?, l)?),
        };
        let ok = fast.zip(brute).is_none_or(|(a, b)| a == b);
        let (text, csv) = match (fast, brute) {
            (Some(a), Some(b)) => (
                format!("P({n}) = {a}  brute {b}"),
                ("index,fast,brute", format!("{n},{a},{b}")),
            ),
            (Some(v), None) | (None, Some(v)) => {
                (format!("P({n}) = {v}"), ("index,value", format!("{n},{v}")))
            }
            (None, None) => unreachable!(),
        };
        let row = ComplexityRow { n, l, fast, brute };
        sink.emit("complexity", &row, Status::from_ok(ok), &text, Some(csv))?;
    }
    Ok(())
}

fn set_text(set: &std::collections::BTreeSet<u64>) -> String {
    let items: Vec<String> = set.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn pairs(range: (u64, u64), method: PairsMethod, sink: &mut Sink) -> Out {
    for n in range.0..=range.1 {
        let interval = match method {
            PairsMethod::Brute => None,
            _ => Some(pairs_interval(n)?),
        };
        let brute = match method {
            PairsMethod::Interval => None,
            _ => Some(pairs_brute(brute_len(n)?)?),
        };
        let hull = brute
            .as_ref()
            .and_then(|s| IntInterval::hull(s.iter().map(|&x| x as i64)));
        // the brute set must be gap-free and equal to the interval
        let ok = match (&interval, &brute) {
            (Some(i), Some(s)) => hull == Some(*i) && i.card() == s.len() as u64,
            _ => true,
        };
        let mut text = format!("pairs({n})");
        if let Some(i) = interval {
            text += &format!(" = {i}");
        }
        if let Some(s) = &brute {
            text += &format!("  brute {}", set_text(s));
        }
        let csv = match (interval, &brute) {
            (Some(i), _) => ("index,lo,hi", format!("{n},{},{}", i.lo, i.hi)),
            (None, Some(_)) => {
                let h = hull.expect("pair sets are nonempty");
                ("index,lo,hi", format!("{n},{},{}", h.lo, h.hi))
            }
            (None, None) => unreachable!(),
        };
        let payload = json!({ "n": n, "interval": interval, "brute": brute });
        sink.emit("pairs", &payload, Status::from_ok(ok), &text, Some(csv))?;
    }
    Ok(())
}

fn merf_cmd(w: &Word, trace: bool, sink: &mut Sink) -> Out {
    let mut r = merf(w)?;
    if trace {
        for s in &r.trace {
            sink.note(&format!("  q={}  filled {}  preimage {}", s.q, s.filled, s.preimage))?;
        }
    } else {
        r.trace.clear();
    }
    let text = format!(
        "{}, frame {} (q = {}, offset {})",
        r.extended, r.frame_size, r.q, r.original_offset
    );
    sink.emit("merf", &json!({ "word": w, "merf": r }), Status::Ok, &text, None)?;
    Ok(())
}

fn bounds(length: u64, sink: &mut Sink) -> Out {
    if length == 0 {
        return Err(tmab::Error::TooShort { length: 0, min: 1 }.into());
    }
    let (lo, hi) = unique_extension_bounds(length);
    if length > EXHAUSTIVE_BOUNDS_MAX {
        let text = format!("n = {length}: forced letters between {lo} and {hi}");
        sink.emit("bounds", &json!({ "length": length, "min": lo, "max": hi }), Status::Ok, &text, None)?;
        return Ok(());
    }
    let ex = determined_extrema(length as usize)?;
    let ok = ex.min as u64 == lo && ex.max as u64 == hi;
    let text = format!(
        "n = {length}: forced letters between {lo} and {hi}; attained by {} ({}) and {} ({})",
        ex.min_witness, ex.min, ex.max_witness, ex.max
    );
    let payload = json!({ "length": length, "min": lo, "max": hi, "exhaustive": ex });
    sink.emit("bounds", &payload, Status::from_ok(ok), &text, None)?;
    Ok(())
}

fn coding(w: &Word, sink: &mut Sink) -> Out {
    let c = short_coding(w)?;
    let text = c.to_string();
    sink.emit("coding", &json!({ "word": w, "coding": c }), Status::Ok, &text, None)?;
    Ok(())
}

fn decode(coding: &str, first: u8, sink: &mut Sink) -> Out {
    let c: ShortCoding = coding.parse()?;
    let w = decode_short_coding(&c, first)?;
    let text = w.to_string();
    sink.emit("decode", &json!({ "coding": c, "first": first, "word": w }), Status::Ok, &text, None)?;
    Ok(())
}

fn verify_relations(n_max: u64, kind: EvaluatorKind, sink: &mut Sink) -> Out {
    let fast = FastEvaluator;
    let brute = BruteEvaluator::new();
    let eval: &dyn Evaluator = match kind {
        EvaluatorKind::Fast => &fast,
        EvaluatorKind::Brute => &brute,
    };
    let catalog = relations_catalog();
    let mut held = 0;
    for rel in &catalog {
        let report = verify_relation(rel, 0, n_max, eval)?;
        held += report.holds as usize;
        let text = match report.first_failure {
            None => format!("{rel}  for 0 <= n <= {n_max}"),
            Some(n) => format!("{rel}  fails at n = {n}"),
        };
        sink.emit("verify relations", &report, Status::from_ok(report.holds), &text, None)?;
    }
    sink.note(&format!("{held}/{} relations hold ({} evaluator)", catalog.len(), eval.name()))?;
    Ok(())
}

fn verify_palindromes(q_max: u32, sink: &mut Sink) -> Out {
    if q_max == 0 {
        return Err(Failure::Usage("--q-max must be at least 1".into()));
    }
    for q in 1..=q_max {
        let r = palindrome_block(q, &FastEvaluator)?;
        let last = r.first_index + r.block.len() as u64 - 1;
        let text = format!("q = {q}: block {}..{} of length {}", r.first_index, last, r.block.len());
        sink.emit("verify palindromes", &r, Status::from_ok(r.is_palindrome), &text, None)?;
    }
    Ok(())
}

fn verify_steps(n_max: u64, sink: &mut Sink) -> Out {
    let r = step_check(4, n_max, &FastEvaluator)?;
    let text = match r.violations.first() {
        None => format!("steps in {{-2,0,2}} for 4 <= n <= {n_max}"),
        Some((n, d)) => format!("step {d} at n = {n} ({} violations)", r.violations.len()),
    };
    sink.emit("verify steps", &r, Status::from_ok(r.ok), &text, None)?;
    Ok(())
}

fn verify_coverage(sink: &mut Sink) -> Out {
    let catalog = relations_catalog();
    let cov = residue_coverage(&catalog, 32)?;
    let text = format!("{}/32 residues covered by left-hand sides", cov.covered.len());
    sink.emit("verify coverage", &cov, Status::from_ok(cov.complete), &text, None)?;

    let basis = standard_basis();
    let (ok, detail) = match basis_closure_check(&catalog, &basis, CLOSURE_DEPTH) {
        Ok(b) => (b, None),
        Err(tmab::Error::NonClosure(t)) => (false, Some(t)),
        Err(e) => return Err(e.into()),
    };
    let names: Vec<String> = basis.iter().map(|s| s.to_string()).collect();
    let text = match &detail {
        None => format!("basis {{{}}} closed to depth {CLOSURE_DEPTH}", names.join(", ")),
        Some(t) => format!("{t} does not reduce to the basis"),
    };
    let payload = json!({ "basis": names, "depth": CLOSURE_DEPTH, "closed": ok, "stuck_at": detail });
    sink.emit("verify closure", &payload, Status::from_ok(ok), &text, None)?;
    Ok(())
}

fn witness(steps: usize, sink: &mut Sink) -> Out {
    let entries = unbounded_witness(steps, &FastEvaluator)?;
    let mut prev: Option<u64> = None;
    for e in entries {
        let grows = prev.is_none_or(|p| e.value == p + 6);
        prev = Some(e.value);
        let csv = ("index,value", format!("{},{}", e.index, e.value));
        let text = format!("P({}) = {}", e.index, e.value);
        sink.emit("witness", &e, Status::from_ok(grows && e.hypotheses_hold), &text, Some(csv))?;
    }
    Ok(())
}

fn discover(n_max: u64, modulus: u64, max_terms: usize, sink: &mut Sink) -> Out {
    let found = discover_relations(n_max, modulus, max_terms)?;
    let catalog: Vec<String> = relations_catalog().iter().map(|r| r.to_string()).collect();
    if found.is_empty() && sink.format() == Format::Table {
        sink.note("no relations found")?;
    }
    for rel in found {
        let s = rel.to_string();
        let known = catalog.contains(&s);
        let text = if known { format!("{s}  (catalogued)") } else { s };
        sink.emit(
            "discover",
            &json!({ "relation": rel, "catalogued": known }),
            Status::Ok,
            &text,
            None,
        )?;
    }
    Ok(())
}
