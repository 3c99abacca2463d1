//! Tables over solution sets, and the json-lines / csv record formats.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::f64_to_ratio;
use crate::error::{Error, Result};
use crate::pipeline::{converse_form, triple_to_point, MordellPoint, SolutionSet};
use crate::thue::ThueSolution;

/// Whether no prime's sixth power divides `k`.
pub fn sixth_power_free(k: &BigInt) -> bool {
    let n = k.abs();
    if let Some(n) = n.to_u128() {
        let mut p: u128 = 2;
        while let Some(p6) = p.checked_pow(6).filter(|&p6| p6 <= n) {
            if n % p6 == 0 {
                return false;
            }
            p += 1;
        }
        return true;
    }
    let mut p = BigInt::from(2);
    loop {
        let p6 = p.pow(6);
        if p6 > n {
            return true;
        }
        if (&n % &p6).is_zero() {
            return false;
        }
        p += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    SixthPowerFree,
}

impl Filter {
    fn admits(&self, k: &BigInt) -> bool {
        match self {
            Filter::All => true,
            Filter::SixthPowerFree => sixth_power_free(k),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Filter::All => "all",
            Filter::SixthPowerFree => "sixth-power-free",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    /// `N_k` to the number of curves with that many points.
    pub counts: BTreeMap<usize, u64>,
    /// Smallest and largest `k` counted.
    pub range: Option<(BigInt, BigInt)>,
    pub filter: Filter,
    /// Number of counted records whose search was bound-limited.
    pub incomplete: usize,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Counts curves by `N_k`. Bound-limited records are refused unless `allow_incomplete`.
pub fn histogram(results: &[SolutionSet], filter: Filter, allow_incomplete: bool) -> Result<Histogram> {
    let kept: Vec<&SolutionSet> = results.iter().filter(|s| filter.admits(&s.k)).collect();
    let incomplete = kept.iter().filter(|s| !s.complete).count();
    if incomplete > 0 && !allow_incomplete {
        return Err(Error::IncompleteResults(incomplete));
    }
    let mut counts = BTreeMap::new();
    for s in &kept {
        *counts.entry(s.n_k()).or_insert(0) += 1;
    }
    let range = kept
        .iter()
        .map(|s| s.k.clone())
        .min()
        .zip(kept.iter().map(|s| s.k.clone()).max());
    Ok(Histogram { counts, range, filter, incomplete })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallRecord {
    pub k: BigInt,
    pub x: BigInt,
    /// `sqrt(X) / |k|` in hundredths, rounded half up.
    pub hundredths: BigInt,
}

impl HallRecord {
    pub fn new(k: BigInt, x: BigInt) -> Self {
        // round(100 sqrt(X) / |k|) = floor((floor(sqrt(40000 X)) + |k|) / (2|k|))
        let ak = k.abs();
        let s = (&x * 40000u32).sqrt();
        let hundredths = (s + &ak) / (ak * 2u32);
        HallRecord { k, x, hundredths }
    }

    /// The measure to two decimals, e.g. `"4.26"`.
    pub fn measure(&self) -> String {
        let whole = &self.hundredths / 100u32;
        let frac = (&self.hundredths % 100u32).to_u32().unwrap_or(0);
        format!("{whole}.{frac:02}")
    }

    pub fn measure_f64(&self) -> f64 {
        self.x.to_f64().unwrap_or(f64::INFINITY).sqrt() / self.k.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// All `(k, X)` with `X > 0` and `sqrt(X) / |k| > threshold`, largest measure first.
///
/// Comparisons are exact: `X > t^2 k^2` with `t` taken at its exact binary value.
pub fn hall_measures(results: &[SolutionSet], threshold: f64) -> Result<Vec<HallRecord>> {
    let Some((num, den)) = f64_to_ratio(threshold) else {
        return Err(Error::Inconsistent(format!("threshold {threshold} is not finite")));
    };
    let mut seen = BTreeMap::new();
    for s in results {
        for p in &s.points {
            if !p.x.is_positive() {
                continue;
            }
            let lhs = &p.x * &den * &den;
            let rhs = &num * &num * &s.k * &s.k;
            if threshold < 0.0 || lhs > rhs {
                seen.insert((s.k.clone(), p.x.clone()), ());
            }
        }
    }
    let mut out: Vec<HallRecord> = seen.into_keys().map(|(k, x)| HallRecord::new(k, x)).collect();
    // X1 / k1^2 > X2 / k2^2  <=>  X1 k2^2 > X2 k1^2
    out.sort_by(|a, b| {
        let l = &a.x * &b.k * &b.k;
        let r = &b.x * &a.k * &a.k;
        r.cmp(&l).then_with(|| a.k.cmp(&b.k))
    });
    Ok(out)
}

/// Points with `X > x_threshold`, largest `X` first.
pub fn large_solutions(results: &[SolutionSet], x_threshold: &BigInt) -> Vec<MordellPoint> {
    let mut out: Vec<MordellPoint> =
        results.iter().flat_map(|s| s.points.iter()).filter(|p| p.x > *x_threshold).cloned().collect();
    out.sort_by(|a, b| b.x.cmp(&a.x).then_with(|| a.k.cmp(&b.k)).then_with(|| a.y.cmp(&b.y)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json-lines or csv)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    k: serde_json::Number,
    n: usize,
    complete: bool,
    points: Vec<[serde_json::Number; 2]>,
}

fn number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("decimal integers are valid JSON numbers")
}

fn integer(n: &serde_json::Number, line: usize) -> Result<BigInt> {
    BigInt::from_str(&n.to_string())
        .map_err(|_| Error::Parse { line, msg: format!("expected an integer, got {n}") })
}

/// The json-lines record for one solution set, without the trailing newline.
pub fn json_line(set: &SolutionSet) -> String {
    let rec = JsonRecord {
        k: number(&set.k),
        n: set.n_k(),
        complete: set.complete,
        points: set.points.iter().map(|p| [number(&p.x), number(&p.y)]).collect(),
    };
    serde_json::to_string(&rec).expect("records serialize")
}

/// Writes the records in `format`; csv output starts with a header row.
pub fn serialize<W: Write>(results: &[SolutionSet], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::JsonLines => {
            let mut out = out;
            for s in results {
                writeln!(out, "{}", json_line(s))?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            write_csv_header(&mut w)?;
            for s in results {
                write_csv_rows(&mut w, s)?;
            }
            w.flush()
        }
    }
}

pub(crate) fn write_csv_header<W: Write>(w: &mut csv::Writer<W>) -> std::io::Result<()> {
    w.write_record(["k", "X", "Y", "complete"]).map_err(std::io::Error::other)
}

/// One row per point; a `k` without points gets one row with empty `X` and `Y`.
pub(crate) fn write_csv_rows<W: Write>(w: &mut csv::Writer<W>, s: &SolutionSet) -> std::io::Result<()> {
    let k = s.k.to_string();
    let complete = s.complete.to_string();
    if s.points.is_empty() {
        w.write_record([k.as_str(), "", "", complete.as_str()]).map_err(std::io::Error::other)?;
    }
    for p in &s.points {
        w.write_record([k.as_str(), &p.x.to_string(), &p.y.to_string(), complete.as_str()])
            .map_err(std::io::Error::other)?;
    }
    Ok(())
}

/// The csv rendering of records, header included.
pub fn csv_string(results: &[SolutionSet]) -> String {
    let mut buf = Vec::new();
    serialize(results, Format::Csv, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// A parsed record: the solution set and the declared point count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRecord {
    pub line: usize,
    pub set: SolutionSet,
    pub declared_n: usize,
    /// Points in file order, before sorting and deduplication.
    pub raw_points: Vec<(BigInt, BigInt)>,
}

/// Guesses the format from the first non-blank byte: `{` means json-lines.
pub fn detect_format(text: &str) -> Format {
    match text.trim_start().chars().next() {
        Some('{') | None => Format::JsonLines,
        _ => Format::Csv,
    }
}

/// Parses records written by [`serialize`].
pub fn parse_records<R: BufRead>(input: R, format: Format) -> Result<Vec<ParsedRecord>> {
    match format {
        Format::JsonLines => {
            let mut out = Vec::new();
            for (i, line) in input.lines().enumerate() {
                let line_no = i + 1;
                let line = line.map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
                let k = integer(&rec.k, line_no)?;
                let raw_points = rec
                    .points
                    .iter()
                    .map(|[x, y]| Ok((integer(x, line_no)?, integer(y, line_no)?)))
                    .collect::<Result<Vec<_>>>()?;
                let set = SolutionSet::new(k, raw_points.clone(), rec.complete);
                out.push(ParsedRecord { line: line_no, set, declared_n: rec.n, raw_points });
            }
            Ok(out)
        }
        Format::Csv => {
            let mut reader = csv::Reader::from_reader(input);
            let mut groups: Vec<(usize, BigInt, bool, Vec<(BigInt, BigInt)>)> = Vec::new();
            for (i, row) in reader.records().enumerate() {
                let line_no = i + 2;
                let row = row.map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
                if row.len() != 4 {
                    return Err(Error::Parse { line: line_no, msg: format!("expected 4 columns, got {}", row.len()) });
                }
                let bad = |what: &str| Error::Parse { line: line_no, msg: format!("bad {what}") };
                let k = BigInt::from_str(&row[0]).map_err(|_| bad("k"))?;
                let complete = bool::from_str(&row[3]).map_err(|_| bad("complete flag"))?;
                let point = match (&row[1], &row[2]) {
                    ("", "") => None,
                    (x, y) => Some((BigInt::from_str(x).map_err(|_| bad("X"))?, BigInt::from_str(y).map_err(|_| bad("Y"))?)),
                };
                match groups.last_mut() {
                    Some((_, gk, gc, pts)) if *gk == k => {
                        if *gc != complete {
                            return Err(bad("complete flag (differs within one k)"));
                        }
                        pts.extend(point);
                    }
                    _ => groups.push((line_no, k, complete, point.into_iter().collect())),
                }
            }
            Ok(groups
                .into_iter()
                .map(|(line, k, complete, raw_points)| {
                    let set = SolutionSet::new(k, raw_points.clone(), complete);
                    ParsedRecord { line, declared_n: raw_points.len(), set, raw_points }
                })
                .collect())
        }
    }
}

/// Parses records and keeps only the solution sets.
pub fn parse<R: BufRead>(input: R, format: Format) -> Result<Vec<SolutionSet>> {
    Ok(parse_records(input, format)?.into_iter().map(|r| r.set).collect())
}

/// Problems found in one record, empty when it verifies.
///
/// Each point must satisfy `Y^2 = X^3 + k`, and its converse form
/// `(1, 0, -X, 2Y)` must have discriminant `-108k`, satisfy the syzygy at
/// `(1, 0)` and map back to `(X, +-Y)`.
pub fn verify_record(rec: &ParsedRecord) -> Vec<String> {
    let mut problems = Vec::new();
    let k = &rec.set.k;
    if k.is_zero() {
        problems.push("k = 0".to_string());
        return problems;
    }
    if rec.declared_n != rec.raw_points.len() {
        problems.push(format!("n = {} but {} points listed", rec.declared_n, rec.raw_points.len()));
    }
    if rec.raw_points.len() != rec.set.n_k() {
        problems.push("duplicate points".to_string());
    }
    let one = ThueSolution::new(1, 0);
    for (x, y) in &rec.raw_points {
        if y * y != x * x * x + k {
            problems.push(format!("({x}, {y}) is not on Y^2 = X^3 + {k}"));
            continue;
        }
        let f = converse_form(x, y);
        if f.discriminant() != k * -108 || !f.syzygy_holds(&one.x, &one.y) {
            problems.push(format!("converse form of ({x}, {y}) fails its certificate"));
            continue;
        }
        match triple_to_point(&f, &one) {
            Ok(pts) if pts.iter().any(|p| &p.x == x && &p.y == y) => {}
            _ => problems.push(format!("({x}, {y}) is not recovered from its converse form")),
        }
    }
    problems
}
