//! Reading and writing matrices and graphs.
//!
//! Vertex numbers are 1-based in every file format and 0-based everywhere
//! else; the conversion happens only in this module.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SquareArray;
use crate::symbols::ValueToken;

pub type TokenMatrix = SquareArray<ValueToken>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    MatrixMarket,
    #[serde(rename = "dimacs-graph")]
    Dimacs,
    EdgeList,
    DenseCsv,
}

impl InputFormat {
    pub const ALL: [InputFormat; 4] =
        [InputFormat::MatrixMarket, InputFormat::Dimacs, InputFormat::EdgeList, InputFormat::DenseCsv];

    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::MatrixMarket => "matrix-market",
            InputFormat::Dimacs => "dimacs-graph",
            InputFormat::EdgeList => "edge-list",
            InputFormat::DenseCsv => "dense-csv",
        }
    }

    /// Graph formats always produce symmetric 0/1 arrays.
    pub fn is_graph(self) -> bool {
        matches!(self, InputFormat::Dimacs | InputFormat::EdgeList)
    }

    fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        Some(match ext.as_str() {
            "mtx" | "mm" => InputFormat::MatrixMarket,
            "dimacs" | "col" | "dim" | "clq" => InputFormat::Dimacs,
            "edges" | "el" | "edgelist" => InputFormat::EdgeList,
            "csv" => InputFormat::DenseCsv,
            _ => return None,
        })
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "matrix-market" | "mm" | "mtx" => Ok(InputFormat::MatrixMarket),
            "dimacs-graph" | "dimacs" => Ok(InputFormat::Dimacs),
            "edge-list" => Ok(InputFormat::EdgeList),
            "dense-csv" | "csv" => Ok(InputFormat::DenseCsv),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    Hint,
    Extension,
    Content,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub bytes: usize,
    /// FNV-1a of the raw file bytes, hex.
    pub digest: String,
    pub detected_by: Detection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDocument {
    pub format: InputFormat,
    pub matrix: TokenMatrix,
    pub provenance: Provenance,
}

fn fnv1a_bytes(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Lines that carry data, with 1-based line numbers.
fn data_lines<'a>(text: &'a str, comment: &'a [char]) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !l.starts_with(comment))
}

/// Guesses a format from the file contents alone.
///
/// A header or a `p` line settles it; otherwise commas mean CSV and lines of
/// one or two integers mean an edge list. Headerless Matrix Market files are
/// only recognised by extension.
pub fn sniff_format(text: &str) -> InputFormat {
    if text.trim_start().starts_with("%%MatrixMarket") {
        return InputFormat::MatrixMarket;
    }
    let lines: Vec<&str> = data_lines(text, &['#', '%']).map(|(_, l)| l).collect();
    if lines.iter().any(|l| l.starts_with("p ")) {
        return InputFormat::Dimacs;
    }
    if lines.iter().any(|l| l.contains(',')) {
        return InputFormat::DenseCsv;
    }
    // vertices are 1-based, so a 0 rules out an edge list
    let ints = |l: &&str| l.split_whitespace().all(|t| t.parse::<u64>().is_ok_and(|v| v > 0));
    let edge_like = lines.iter().enumerate().all(|(k, l)| {
        let n = l.split_whitespace().count();
        ints(l) && (n == 2 || (k == 0 && n == 1))
    });
    if !lines.is_empty() && edge_like {
        InputFormat::EdgeList
    } else {
        InputFormat::DenseCsv
    }
}

pub fn parse_input(path: &Path, hint: Option<InputFormat>) -> Result<InputDocument> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::parse(0, format!("not UTF-8: {e}")))?;
    let (format, detected_by) = match (hint, InputFormat::from_extension(path)) {
        (Some(f), _) => (f, Detection::Hint),
        (None, Some(f)) => (f, Detection::Extension),
        (None, None) => (sniff_format(text), Detection::Content),
    };
    let matrix = parse_str(text, format)?;
    let provenance = Provenance {
        source: path.display().to_string(),
        bytes: bytes.len(),
        digest: fnv1a_bytes(&bytes),
        detected_by,
    };
    Ok(InputDocument { format, matrix, provenance })
}

pub fn parse_str(text: &str, format: InputFormat) -> Result<TokenMatrix> {
    match format {
        InputFormat::MatrixMarket => parse_matrix_market(text),
        InputFormat::Dimacs => parse_dimacs(text),
        InputFormat::EdgeList => parse_edge_list(text),
        InputFormat::DenseCsv => parse_dense_csv(text),
    }
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::parse(line, format!("bad {what} {tok:?}")))
}

fn no_more<'a>(mut it: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match it.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected token {t:?}"))),
        None => Ok(()),
    }
}

/// 1-based vertex to 0-based index.
fn vertex(tok: Option<&str>, n: usize, line: usize) -> Result<usize> {
    let v = parse_count(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(Error::parse(line, format!("vertex {v} out of range 1..={n}")));
    }
    Ok(v - 1)
}

struct GraphBuilder {
    adj: TokenMatrix,
    seen: HashSet<(usize, usize)>,
}

impl GraphBuilder {
    fn new(n: usize) -> Self {
        GraphBuilder { adj: SquareArray::filled(n, ValueToken::Int(0)), seen: HashSet::new() }
    }

    fn edge(&mut self, u: usize, v: usize, line: usize) -> Result<()> {
        if u == v {
            return Err(Error::parse(line, format!("self-loop at vertex {}", u + 1)));
        }
        if !self.seen.insert((u.min(v), u.max(v))) {
            return Err(Error::parse(line, format!("duplicate edge {} {}", u + 1, v + 1)));
        }
        *self.adj.get_mut(u, v) = ValueToken::Int(1);
        *self.adj.get_mut(v, u) = ValueToken::Int(1);
        Ok(())
    }
}

fn parse_dimacs(text: &str) -> Result<TokenMatrix> {
    let mut graph: Option<(GraphBuilder, usize)> = None;
    for (line, l) in data_lines(text, &['c']) {
        let mut it = l.split_whitespace();
        match it.next() {
            Some("p") => {
                if graph.is_some() {
                    return Err(Error::parse(line, "second problem line"));
                }
                match it.next() {
                    Some("edge" | "col") => {}
                    other => return Err(Error::parse(line, format!("unsupported problem type {other:?}"))),
                }
                let n = parse_count(it.next(), line, "vertex count")?;
                let m = parse_count(it.next(), line, "edge count")?;
                no_more(it, line)?;
                graph = Some((GraphBuilder::new(n), m));
            }
            Some("e") => {
                let Some((g, _)) = graph.as_mut() else {
                    return Err(Error::parse(line, "edge before problem line"));
                };
                let n = g.adj.dim();
                let u = vertex(it.next(), n, line)?;
                let v = vertex(it.next(), n, line)?;
                no_more(it, line)?;
                g.edge(u, v, line)?;
            }
            _ => return Err(Error::parse(line, format!("unrecognised line {l:?}"))),
        }
    }
    let (g, m) = graph.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    if g.seen.len() != m {
        return Err(Error::parse(0, format!("problem line declares {m} edges, found {}", g.seen.len())));
    }
    Ok(g.adj)
}

fn parse_edge_list(text: &str) -> Result<TokenMatrix> {
    let lines: Vec<(usize, &str)> = data_lines(text, &['#', '%']).collect();
    let (declared, body) = match lines.first() {
        Some(&(line, l)) if l.split_whitespace().count() == 1 => (Some(parse_count(Some(l), line, "vertex count")?), &lines[1..]),
        _ => (None, &lines[..]),
    };
    let mut edges = Vec::with_capacity(body.len());
    for &(line, l) in body {
        let mut it = l.split_whitespace();
        let u = parse_count(it.next(), line, "vertex")?;
        let v = parse_count(it.next(), line, "vertex")?;
        no_more(it, line)?;
        edges.push((line, u, v));
    }
    let n = match declared {
        Some(n) => n,
        None => edges.iter().map(|&(_, u, v)| u.max(v)).max().ok_or_else(|| Error::parse(0, "empty edge list"))?,
    };
    let mut g = GraphBuilder::new(n);
    for (line, u, v) in edges {
        let u = vertex(Some(&u.to_string()), n, line)?;
        let v = vertex(Some(&v.to_string()), n, line)?;
        g.edge(u, v, line)?;
    }
    Ok(g.adj)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn negate(t: &ValueToken) -> ValueToken {
    match t {
        ValueToken::Int(i) => ValueToken::Int(-i),
        ValueToken::Real(x) => ValueToken::from_f64(-x),
        ValueToken::Text(s) => ValueToken::Text(s.clone()),
    }
}

fn numeric(tok: &str, line: usize) -> Result<ValueToken> {
    match ValueToken::parse(tok) {
        ValueToken::Text(_) => Err(Error::parse(line, format!("not a number: {tok:?}"))),
        t => Ok(t),
    }
}

fn parse_matrix_market(text: &str) -> Result<TokenMatrix> {
    let mut coordinate = true;
    let mut pattern = None;
    let mut symmetry = Symmetry::General;
    if let Some(header) = text.lines().next().filter(|l| l.starts_with("%%MatrixMarket")) {
        let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
        if fields.len() != 5 || fields[1] != "matrix" {
            return Err(Error::parse(1, "malformed Matrix Market header"));
        }
        coordinate = match fields[2].as_str() {
            "coordinate" => true,
            "array" => false,
            other => return Err(Error::parse(1, format!("unknown storage {other:?}"))),
        };
        pattern = match fields[3].as_str() {
            "integer" | "real" => Some(false),
            "pattern" if coordinate => Some(true),
            other => return Err(Error::parse(1, format!("unsupported field {other:?}"))),
        };
        symmetry = match fields[4].as_str() {
            "general" => Symmetry::General,
            "symmetric" => Symmetry::Symmetric,
            "skew-symmetric" => Symmetry::Skew,
            other => return Err(Error::parse(1, format!("unsupported symmetry {other:?}"))),
        };
    }
    let mut lines = data_lines(text, &['%']);
    let (line, size) = lines.next().ok_or_else(|| Error::parse(0, "missing size line"))?;
    let mut it = size.split_whitespace();
    let rows = parse_count(it.next(), line, "row count")?;
    let cols = parse_count(it.next(), line, "column count")?;
    if rows != cols {
        return Err(Error::parse(line, format!("matrix is {rows}x{cols}, not square")));
    }
    let n = rows;
    let mut m = SquareArray::filled(n, ValueToken::Int(0));
    if coordinate {
        let nnz = parse_count(it.next(), line, "entry count")?;
        no_more(it, line)?;
        let mut seen = HashSet::new();
        let mut count = 0;
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let i = vertex(it.next(), n, line)?;
            let j = vertex(it.next(), n, line)?;
            let v = match (pattern, it.next()) {
                (Some(true), None) | (None, None) => ValueToken::Int(1),
                (Some(true), Some(t)) => return Err(Error::parse(line, format!("pattern entry has value {t:?}"))),
                (_, Some(t)) => numeric(t, line)?,
                (Some(false), None) => return Err(Error::parse(line, "missing value")),
            };
            no_more(it, line)?;
            if symmetry == Symmetry::Skew && i == j {
                return Err(Error::parse(line, "diagonal entry in a skew-symmetric matrix"));
            }
            let mirrored = symmetry != Symmetry::General && i != j;
            if !seen.insert((i, j)) || (mirrored && !seen.insert((j, i))) {
                return Err(Error::parse(line, format!("duplicate entry ({}, {})", i + 1, j + 1)));
            }
            if mirrored {
                *m.get_mut(j, i) = if symmetry == Symmetry::Skew { negate(&v) } else { v.clone() };
            }
            *m.get_mut(i, j) = v;
            count += 1;
        }
        if count != nnz {
            return Err(Error::parse(0, format!("size line declares {nnz} entries, found {count}")));
        }
    } else {
        no_more(it, line)?;
        let mut slots = Vec::new();
        for j in 0..n {
            let first = match symmetry {
                Symmetry::General => 0,
                Symmetry::Symmetric => j,
                Symmetry::Skew => j + 1,
            };
            slots.extend((first..n).map(|i| (i, j)));
        }
        let values: Vec<(usize, &str)> =
            lines.flat_map(|(line, l)| l.split_whitespace().map(move |t| (line, t))).collect();
        if values.len() != slots.len() {
            return Err(Error::parse(0, format!("expected {} values, found {}", slots.len(), values.len())));
        }
        for (&(i, j), &(line, t)) in slots.iter().zip(&values) {
            let v = numeric(t, line)?;
            if i != j && symmetry != Symmetry::General {
                *m.get_mut(j, i) = if symmetry == Symmetry::Skew { negate(&v) } else { v.clone() };
            }
            *m.get_mut(i, j) = v;
        }
    }
    Ok(m)
}

/// Splits one CSV row. Fields are separated by commas or runs of blanks; a
/// double-quoted field is always text (`""` escapes a quote).
fn csv_fields(l: &str, line: usize) -> Result<Vec<ValueToken>> {
    let mut out = Vec::new();
    let mut chars = l.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(&c) = chars.peek() else { break };
        if c == ',' {
            return Err(Error::parse(line, "empty field"));
        }
        if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        s.push('"');
                    }
                    Some('"') => break,
                    Some(ch) => s.push(ch),
                    None => return Err(Error::parse(line, "unterminated quote")),
                }
            }
            out.push(ValueToken::Text(s));
        } else {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch == ',' || ch.is_whitespace() {
                    break;
                }
                if ch == '"' {
                    return Err(Error::parse(line, "quote inside unquoted field"));
                }
                s.push(ch);
                chars.next();
            }
            out.push(ValueToken::parse(&s));
        }
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek() == Some(&',') {
            chars.next();
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            if chars.peek().is_none_or(|&c| c == ',') {
                return Err(Error::parse(line, "empty field"));
            }
        }
    }
    Ok(out)
}

fn parse_dense_csv(text: &str) -> Result<TokenMatrix> {
    let mut rows = Vec::new();
    for (line, l) in data_lines(text, &['#']) {
        let row = csv_fields(l, line)?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::parse(line, format!("row has {} fields, expected {first}", row.len())));
            }
        }
        rows.push(row);
    }
    if let Some(first) = rows.first() {
        if first.len() != rows.len() {
            return Err(Error::parse(0, format!("{} rows of {} fields is not square", rows.len(), first.len())));
        }
    }
    SquareArray::from_rows(rows)
}

/// Edges `(i, j)` with `i < j`, if `m` is a simple graph's adjacency matrix.
fn graph_edges(m: &TokenMatrix, format: &'static str) -> Result<Vec<(usize, usize)>> {
    let zero = ValueToken::Int(0);
    let one = ValueToken::Int(1);
    let bad = |reason: String| Error::Unrepresentable { format, reason };
    let n = m.dim();
    let mut edges = Vec::new();
    for i in 0..n {
        if *m.get(i, i) != zero {
            return Err(bad(format!("nonzero diagonal at {}", i + 1)));
        }
        for j in i + 1..n {
            let (a, b) = (m.get(i, j), m.get(j, i));
            if a != b {
                return Err(bad(format!("asymmetric at ({}, {})", i + 1, j + 1)));
            }
            if *a == one {
                edges.push((i, j));
            } else if *a != zero {
                return Err(bad(format!("entry {a} is not 0 or 1")));
            }
        }
    }
    Ok(edges)
}

/// Writes `m` in `format`; [`parse_str`] reads it back unchanged.
pub fn serialize(m: &TokenMatrix, format: InputFormat) -> Result<String> {
    let n = m.dim();
    let mut out = String::new();
    match format {
        InputFormat::DenseCsv => {
            for row in m.rows() {
                let fields: Result<Vec<String>> = row
                    .iter()
                    .map(|t| match t {
                        ValueToken::Text(s) if s.contains(['\n', '\r']) => Err(Error::Unrepresentable {
                            format: "dense-csv",
                            reason: "text with a line break".into(),
                        }),
                        ValueToken::Text(s) => Ok(format!("\"{}\"", s.replace('"', "\"\""))),
                        other => Ok(other.to_string()),
                    })
                    .collect();
                out.push_str(&fields?.join(","));
                out.push('\n');
            }
        }
        InputFormat::MatrixMarket => {
            if m.as_slice().iter().any(|t| matches!(t, ValueToken::Text(_))) {
                return Err(Error::Unrepresentable { format: "matrix-market", reason: "text entries".into() });
            }
            let field = if m.as_slice().iter().all(|t| matches!(t, ValueToken::Int(_))) { "integer" } else { "real" };
            let zero = ValueToken::Int(0);
            let entries: Vec<(usize, usize, &ValueToken)> = (0..n)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .map(|(i, j)| (i, j, m.get(i, j)))
                .filter(|e| *e.2 != zero)
                .collect();
            out.push_str(&format!("%%MatrixMarket matrix coordinate {field} general\n{n} {n} {}\n", entries.len()));
            for (i, j, v) in entries {
                out.push_str(&format!("{} {} {v}\n", i + 1, j + 1));
            }
        }
        InputFormat::Dimacs => {
            let edges = graph_edges(m, "dimacs-graph")?;
            out.push_str(&format!("p edge {n} {}\n", edges.len()));
            for (i, j) in edges {
                out.push_str(&format!("e {} {}\n", i + 1, j + 1));
            }
        }
        InputFormat::EdgeList => {
            let edges = graph_edges(m, "edge-list")?;
            out.push_str(&format!("{n}\n"));
            for (i, j) in edges {
                out.push_str(&format!("{} {}\n", i + 1, j + 1));
            }
        }
    }
    Ok(out)
}

pub fn write_matrix(path: &Path, m: &TokenMatrix, format: InputFormat) -> Result<()> {
    std::fs::write(path, serialize(m, format)?)?;
    Ok(())
}

/// Integer matrix as tokens.
pub fn tokens_from_ints<T: Copy + Into<i64>>(m: &SquareArray<T>) -> TokenMatrix {
    m.map(|&x| ValueToken::Int(x.into()))
}
