//! Text formats read and written by the command-line tool.
//!
//! * `.stab`: one operator per line, `#` starts a comment, blank lines are
//!   skipped.
//! * `.graph`: a header `d=<int>; n=<int>` followed by `u v multiplicity`
//!   lines with 1-based vertices.
//! * pair bounds CSV with header `alpha,alpha_bar,p_lower`.
//! * behavior CSV with header `x,y,a,b,p`, 0-based inputs and outputs.

use crate::error::{Error, Result};
use crate::nonlocality::{Behavior, Fig1Row, Fig2Row, PairBound};
use crate::pauli::{PauliOperator, SiteLabel};
use crate::qudit_graph::{Multigraph, QuditStabilizerGroup};
use crate::stabilizer::StabilizerGroup;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const GME_SCHEMA: &str = "stabcert/gme/v1";
pub const VALIDATE_SCHEMA: &str = "stabcert/validate/v1";
pub const BOUND_SCHEMA: &str = "stabcert/bound/v1";
pub const THRESHOLD_SCHEMA: &str = "stabcert/thresholds/v1";
pub const CHAINED_SCHEMA: &str = "stabcert/chained/v1";

/// JSON document with a schema tag in front of the payload fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Artifact<T> {
    pub fn new(schema: &str, body: T) -> Self {
        Artifact { schema: schema.into(), body }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::ParseFile {
        path: origin.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Non-empty lines with comments stripped, as `(line, column offset, text)`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        let offset = body.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        (!trimmed.is_empty()).then_some((i + 1, offset, trimmed))
    })
}

fn located(origin: &str, line: usize, offset: usize, e: Error) -> Error {
    match e {
        Error::Parse { column, message } => Error::ParseFile { path: origin.into(), line, column: offset + column, message },
        other => Error::ParseFile { path: origin.into(), line, column: offset + 1, message: other.to_string() },
    }
}

/// Parses operators over `Z_d` one per line.
pub fn parse_operators(text: &str, d: u32, origin: &str) -> Result<Vec<PauliOperator>> {
    let ops = content_lines(text)
        .map(|(line, offset, body)| PauliOperator::parse(body, d).map_err(|e| located(origin, line, offset, e)))
        .collect::<Result<Vec<_>>>()?;
    if ops.is_empty() {
        return Err(Error::ParseFile { path: origin.into(), line: 1, column: 1, message: "no operators".into() });
    }
    Ok(ops)
}

pub fn parse_stab(text: &str, origin: &str) -> Result<StabilizerGroup> {
    StabilizerGroup::validate_and_canonicalize(parse_operators(text, 2, origin)?)
}

pub fn parse_qudit_stab(text: &str, d: u32, origin: &str) -> Result<QuditStabilizerGroup> {
    QuditStabilizerGroup::new(parse_operators(text, d, origin)?)
}

pub fn read_stab(path: &Path) -> Result<StabilizerGroup> {
    parse_stab(&read_file(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub d: u32,
    pub graph: Multigraph,
}

fn parse_int<T: std::str::FromStr>(token: &str, origin: &str, line: usize, column: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::ParseFile {
        path: origin.into(),
        line,
        column,
        message: format!("expected {what}, found {token:?}"),
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(body: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((offset + s + 1, &body[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

pub fn parse_graph(text: &str, origin: &str) -> Result<GraphFile> {
    let mut lines = content_lines(text);
    let header_error = |line, column| Error::ParseFile {
        path: origin.into(),
        line,
        column,
        message: "expected header `d=<int>; n=<int>`".into(),
    };
    let (hline, hoff, header) = lines.next().ok_or_else(|| header_error(1, 1))?;
    let mut fields = BTreeMap::new();
    let mut col = hoff;
    for part in header.split(';') {
        let lead = part.len() - part.trim_start().len();
        let field_col = col + lead + 1;
        let (key, value) = part.trim().split_once('=').ok_or_else(|| header_error(hline, field_col))?;
        let key = key.trim();
        let value_col = field_col + part.trim().find('=').unwrap_or(0) + 1;
        let v: usize = parse_int(value.trim(), origin, hline, value_col, "an integer")?;
        if !matches!(key, "d" | "n") || fields.insert(key.to_string(), v).is_some() {
            return Err(header_error(hline, field_col));
        }
        col += part.len() + 1;
    }
    let (d, n) = match (fields.get("d"), fields.get("n")) {
        (Some(&d), Some(&n)) => (d, n),
        _ => return Err(header_error(hline, hoff + 1)),
    };
    if d < 2 || d > u32::MAX as usize {
        return Err(Error::ParseFile { path: origin.into(), line: hline, column: hoff + 1, message: format!("d={d} must be at least 2") });
    }
    let mut edges = Vec::new();
    for (line, offset, body) in lines {
        let toks = tokens(body, offset);
        if toks.len() != 3 {
            return Err(Error::ParseFile {
                path: origin.into(),
                line,
                column: offset + 1,
                message: format!("expected `u v multiplicity`, found {} fields", toks.len()),
            });
        }
        let u: usize = parse_int(toks[0].1, origin, line, toks[0].0, "a vertex")?;
        let v: usize = parse_int(toks[1].1, origin, line, toks[1].0, "a vertex")?;
        let m: u32 = parse_int(toks[2].1, origin, line, toks[2].0, "a multiplicity")?;
        for (value, (column, _)) in [(u, toks[0]), (v, toks[1])] {
            SiteLabel::new(value, n).map_err(|e| Error::ParseFile { path: origin.into(), line, column, message: e.to_string() })?;
        }
        if u == v {
            return Err(Error::ParseFile { path: origin.into(), line, column: toks[0].0, message: format!("self-loop at vertex {u}") });
        }
        edges.push((u, v, m));
    }
    Ok(GraphFile { d: d as u32, graph: Multigraph::from_edges(n, &edges)? })
}

fn csv_error(origin: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(1, |p| p.line() as usize);
    Error::ParseFile { path: origin.into(), line, column: 1, message: e.to_string() }
}

/// Reads a headed CSV, checking the header and returning each record with
/// its line number and the 1-based column at which each field starts.
/// A record's line number and its `(column, text)` fields.
type Record = (usize, Vec<(usize, String)>);

fn csv_records(text: &str, header: &[&str], origin: &str) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let found: Vec<String> = reader.headers().map_err(|e| csv_error(origin, e))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::ParseFile {
            path: origin.into(),
            line: 1,
            column: 1,
            message: format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        });
    }
    let raw_lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let raw = raw_lines.get(line.wrapping_sub(1)).copied().unwrap_or("");
        let mut starts = Vec::new();
        let mut col = 1;
        for piece in raw.split(',') {
            starts.push(col + piece.len() - piece.trim_start().len());
            col += piece.len() + 1;
        }
        let fields = record.iter().enumerate().map(|(i, f)| (starts.get(i).copied().unwrap_or(1), f.to_string())).collect();
        out.push((line, fields));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(fields: &[(usize, String)], i: usize, origin: &str, line: usize, what: &str) -> Result<T> {
    let (column, text) = &fields[i];
    parse_int(text, origin, line, *column, what)
}

pub fn parse_pair_bounds(text: &str, origin: &str) -> Result<Vec<PairBound>> {
    csv_records(text, &["alpha", "alpha_bar", "p_lower"], origin)?
        .into_iter()
        .map(|(line, f)| {
            let a: usize = field(&f, 0, origin, line, "a party index")?;
            let b: usize = field(&f, 1, origin, line, "a party index")?;
            let p: f64 = field(&f, 2, origin, line, "a probability")?;
            if a == 0 || b == 0 {
                return Err(Error::ParseFile { path: origin.into(), line, column: f[0].0, message: "party indices are 1-based".into() });
            }
            PairBound::new(SiteLabel::unchecked(a), SiteLabel::unchecked(b), p)
                .map_err(|e| Error::ParseFile { path: origin.into(), line, column: f[2].0, message: e.to_string() })
        })
        .collect()
}

/// Parses a behavior table; `m` and `d` are inferred from the largest
/// indices and unlisted entries are zero.
pub fn parse_behavior(text: &str, origin: &str) -> Result<Behavior> {
    let mut entries = BTreeMap::new();
    for (line, f) in csv_records(text, &["x", "y", "a", "b", "p"], origin)? {
        let key: [usize; 4] = [
            field(&f, 0, origin, line, "an input")?,
            field(&f, 1, origin, line, "an input")?,
            field(&f, 2, origin, line, "an output")?,
            field(&f, 3, origin, line, "an output")?,
        ];
        let p: f64 = field(&f, 4, origin, line, "a probability")?;
        if entries.insert(key, p).is_some() {
            return Err(Error::ParseFile { path: origin.into(), line, column: 1, message: format!("duplicate entry {key:?}") });
        }
    }
    let m = entries.keys().map(|k| k[0].max(k[1]) + 1).max().unwrap_or(0);
    let d = entries.keys().map(|k| k[2].max(k[3]) + 1).max().unwrap_or(0).max(2);
    Behavior::from_fn(m, d, |x, y, a, b| entries.get(&[x, y, a, b]).copied().unwrap_or(0.0))
}

pub fn behavior_csv(b: &Behavior) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
    w.write_record(["x", "y", "a", "b", "p"]).map_err(io)?;
    for x in 0..b.inputs() {
        for y in 0..b.inputs() {
            for a in 0..b.outputs() {
                for bb in 0..b.outputs() {
                    w.serialize((x, y, a, bb, b.p(x, y, a, bb))).map_err(io)?;
                }
            }
        }
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Domain(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
}

pub fn fig1_csv(rows: &[Fig1Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
    w.write_record(["N", "n_min", "m"]).map_err(io)?;
    for r in rows {
        w.serialize((r.n_parties, r.n_min, r.m)).map_err(io)?;
    }
    finish_csv(w)
}

pub fn fig2_csv(rows: &[Fig2Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
    w.write_record(["m", "p_nl_lower"]).map_err(io)?;
    for r in rows {
        w.serialize((r.m, r.p_nl_lower)).map_err(io)?;
    }
    finish_csv(w)
}
