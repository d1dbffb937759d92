//! Text formats: `.gm` matrices, `.qo` relations, `.gw` weights, `.lm` linear
//! maps, and the line-oriented certificate report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::json;

use crate::error::{Error, Pair, Result};
use crate::gaussian::GaussianRational;
use crate::jordan::{CanonicalJordanForm, LinearMapOnSMA};
use crate::quasiorder::{QuasiOrder, MAX_N};
use crate::rankpres::{Certificate, PreserverVerdict};
use crate::transmap::TransitiveMap;
use crate::Matrix;

fn parse_error(file: &str, line: usize, rule: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        rule: rule.into(),
    }
}

/// Non-blank lines with `#` comments removed, paired with 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(k, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some((k + 1, tokens))
        })
        .collect()
}

fn parse_count(file: &str, line: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_error(file, line, format!("{what} must be a nonnegative integer, found `{token}`")))
}

/// 1-based index in `1..=n`, returned 0-based.
fn parse_index(file: &str, line: usize, token: &str, n: usize) -> Result<usize> {
    let k = parse_count(file, line, token, "index")?;
    if k == 0 || k > n {
        return Err(parse_error(file, line, format!("index {k} outside 1..{n}")));
    }
    Ok(k - 1)
}

fn parse_scalar(file: &str, line: usize, token: &str) -> Result<GaussianRational> {
    token
        .parse()
        .map_err(|_| parse_error(file, line, format!("invalid scalar literal `{token}`")))
}

/// Reads `rows·cols` scalars from consecutive lines starting at `lines[start]`.
/// Returns the matrix and the index of the first unused line.
fn read_entries(
    file: &str,
    lines: &[(usize, Vec<&str>)],
    start: usize,
    rows: usize,
    cols: usize,
) -> Result<(Matrix, usize)> {
    let mut entries = Vec::with_capacity(rows * cols);
    let mut k = start;
    while entries.len() < rows * cols {
        let Some((line, tokens)) = lines.get(k) else {
            let last = lines.last().map_or(1, |l| l.0);
            return Err(parse_error(
                file,
                last,
                format!("expected {} entries, found {}", rows * cols, entries.len()),
            ));
        };
        if entries.len() + tokens.len() > rows * cols {
            return Err(parse_error(file, *line, format!("more than {} entries", rows * cols)));
        }
        for t in tokens {
            entries.push(parse_scalar(file, *line, t)?);
        }
        k += 1;
    }
    Ok((Matrix::new(rows, cols, entries)?, k))
}

pub fn parse_gm(text: &str, file: &str) -> Result<Matrix> {
    let lines = content_lines(text);
    let Some((line, header)) = lines.first() else {
        return Err(parse_error(file, 1, "missing header `rows cols`"));
    };
    let [r, c] = header.as_slice() else {
        return Err(parse_error(file, *line, "header must be `rows cols`"));
    };
    let rows = parse_count(file, *line, r, "row count")?;
    let cols = parse_count(file, *line, c, "column count")?;
    let (m, used) = read_entries(file, &lines, 1, rows, cols)?;
    if let Some((line, _)) = lines.get(used) {
        return Err(parse_error(file, *line, format!("more than {} entries", rows * cols)));
    }
    Ok(m)
}

/// 1-based line of entry `(i, j)` in a `.gm` text with `cols` columns.
pub fn gm_entry_line(text: &str, i: usize, j: usize, cols: usize) -> usize {
    let lines = content_lines(text);
    let mut remaining = i * cols + j;
    for (line, tokens) in lines.iter().skip(1) {
        if remaining < tokens.len() {
            return *line;
        }
        remaining -= tokens.len();
    }
    lines.last().map_or(1, |l| l.0)
}

pub fn write_gm(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_header_n(file: &str, lines: &[(usize, Vec<&str>)]) -> Result<usize> {
    let Some((line, header)) = lines.first() else {
        return Err(parse_error(file, 1, "missing header `n`"));
    };
    let [n] = header.as_slice() else {
        return Err(parse_error(file, *line, "header must be a single integer `n`"));
    };
    let n = parse_count(file, *line, n, "n")?;
    if n == 0 || n > MAX_N {
        return Err(parse_error(file, *line, format!("n must lie in 1..{}", MAX_N)));
    }
    Ok(n)
}

/// Reads a relation; with `close` its transitive closure, otherwise it must
/// already be transitive. The diagonal is always included.
pub fn parse_qo(text: &str, file: &str, close: bool) -> Result<QuasiOrder> {
    let lines = content_lines(text);
    let n = parse_header_n(file, &lines)?;
    let mut edges = Vec::new();
    let mut origin: BTreeMap<Pair, usize> = BTreeMap::new();
    for (line, tokens) in &lines[1..] {
        let [i, j] = tokens.as_slice() else {
            return Err(parse_error(file, *line, "pair line must be `i j`"));
        };
        let p = (parse_index(file, *line, i, n)?, parse_index(file, *line, j, n)?);
        origin.entry(p).or_insert(*line);
        edges.push(p);
    }
    QuasiOrder::from_edges(n, &edges, close).map_err(|e| match e {
        Error::NotClosed { first, second } => {
            let line = origin[&first].max(origin[&second]);
            parse_error(file, line, format!("relation must be transitive: {e}"))
        }
        other => other,
    })
}

pub fn write_qo(rho: &QuasiOrder) -> String {
    let mut out = format!("{}\n", rho.n());
    for (i, j) in rho.strict_part() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

/// Reads weights for every strict pair of `rho` and validates transitivity.
pub fn parse_gw(text: &str, file: &str, rho: &QuasiOrder) -> Result<TransitiveMap<GaussianRational>> {
    let n = rho.n();
    let lines = content_lines(text);
    let mut weights = BTreeMap::new();
    let mut origin: BTreeMap<Pair, usize> = BTreeMap::new();
    for (line, tokens) in &lines {
        let [i, j, w] = tokens.as_slice() else {
            return Err(parse_error(file, *line, "weight line must be `i j scalar`"));
        };
        let p = (parse_index(file, *line, i, n)?, parse_index(file, *line, j, n)?);
        if p.0 == p.1 {
            return Err(parse_error(file, *line, "diagonal weights are fixed to 1 and may not be given"));
        }
        if !rho.contains(p.0, p.1) {
            return Err(parse_error(file, *line, format!("pair ({i},{j}) is not in the relation")));
        }
        if origin.insert(p, *line).is_some() {
            return Err(parse_error(file, *line, format!("duplicate weight for ({i},{j})")));
        }
        weights.insert(p, parse_scalar(file, *line, w)?);
    }
    let last = lines.last().map_or(1, |l| l.0);
    TransitiveMap::validate(rho.clone(), weights).map_err(|e| {
        let line = match &e {
            Error::ZeroWeight(p) => origin[p],
            Error::NotTransitive { first, second } => {
                let third = (first.0, second.1);
                [first, second, &third]
                    .iter()
                    .filter_map(|p| origin.get(p).copied())
                    .max()
                    .unwrap_or(last)
            }
            _ => last,
        };
        parse_error(file, line, e.to_string())
    })
}

pub fn write_gw(g: &TransitiveMap<GaussianRational>) -> String {
    let mut out = String::new();
    for (&(i, j), w) in g.weights() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}

/// Reads the image of every unit `E_ij`, `(i, j) ∈ ρ`.
pub fn parse_lm(text: &str, file: &str, rho: &QuasiOrder) -> Result<LinearMapOnSMA<GaussianRational>> {
    let lines = content_lines(text);
    let n = parse_header_n(file, &lines)?;
    if n != rho.n() {
        return Err(parse_error(
            file,
            lines[0].0,
            format!("map is on {n} points but the relation has {}", rho.n()),
        ));
    }
    let mut images = BTreeMap::new();
    let mut k = 1;
    while k < lines.len() {
        let (line, tokens) = &lines[k];
        let ["unit", i, j] = tokens.as_slice() else {
            return Err(parse_error(file, *line, "block must start with `unit i j`"));
        };
        let p = (parse_index(file, *line, i, n)?, parse_index(file, *line, j, n)?);
        if !rho.contains(p.0, p.1) {
            return Err(parse_error(file, *line, format!("unit ({i},{j}) is not in the relation")));
        }
        let (m, next) = read_entries(file, &lines, k + 1, n, n)?;
        if images.insert(p, m).is_some() {
            return Err(parse_error(file, *line, format!("duplicate block for unit ({i},{j})")));
        }
        k = next;
    }
    let last = lines.last().map_or(1, |l| l.0);
    if let Some((i, j)) = rho.pairs().into_iter().find(|p| !images.contains_key(p)) {
        return Err(parse_error(file, last, format!("missing block for unit ({},{})", i + 1, j + 1)));
    }
    LinearMapOnSMA::new(rho.clone(), images).map_err(|e| parse_error(file, last, e.to_string()))
}

pub fn write_lm(phi: &LinearMapOnSMA<GaussianRational>) -> String {
    let mut out = format!("{}\n", phi.n());
    for (&(i, j), m) in phi.images() {
        let _ = writeln!(out, "unit {} {}", i + 1, j + 1);
        for r in 0..m.rows() {
            let row: Vec<String> = (0..m.cols()).map(|c| m.get(r, c).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Comma-separated 1-based indices; `none` or the empty string for `∅`.
pub fn parse_index_list(text: &str, n: usize) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() || text == "none" {
        return Ok(Vec::new());
    }
    let mut out: Vec<usize> = text
        .split(',')
        .map(|t| parse_index("--classes", 1, t.trim(), n))
        .collect::<Result<_>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn write_index_list(items: &[usize]) -> String {
    if items.is_empty() {
        return "none".into();
    }
    items.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    Field(String, String),
    Block(String, String),
    Raw(String, String),
}

/// An ordered list of `KEY value` fields and titled multi-line blocks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    items: Vec<Item>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.items.push(Item::Field(key.into(), value.to_string()));
        self
    }

    pub fn block(&mut self, title: &str, body: impl Into<String>) -> &mut Self {
        self.items.push(Item::Block(title.into(), body.into()));
        self
    }

    /// File content printed verbatim in text mode.
    pub fn raw(&mut self, title: &str, body: impl Into<String>) -> &mut Self {
        self.items.push(Item::Raw(title.into(), body.into()));
        self
    }

    pub fn extend(&mut self, other: Report) -> &mut Self {
        self.items.extend(other.items);
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        for item in &self.items {
            match (format, item) {
                (OutputFormat::Text, Item::Field(k, v)) => {
                    let _ = writeln!(out, "{k} {v}");
                }
                (OutputFormat::Text, Item::Block(t, body)) => {
                    let _ = writeln!(out, "{t}");
                    out.push_str(body);
                    if !body.is_empty() && !body.ends_with('\n') {
                        out.push('\n');
                    }
                }
                (OutputFormat::Text, Item::Raw(_, body)) => out.push_str(body),
                (OutputFormat::JsonLines, Item::Field(k, v)) => {
                    let _ = writeln!(out, "{}", json!({ "key": k, "value": v }));
                }
                (OutputFormat::JsonLines, Item::Block(t, body) | Item::Raw(t, body)) => {
                    let lines: Vec<&str> = body.lines().collect();
                    let _ = writeln!(out, "{}", json!({ "key": t, "lines": lines }));
                }
            }
        }
        out
    }
}

pub fn jordan_form_report(form: &CanonicalJordanForm<GaussianRational>) -> Report {
    let mut r = Report::new();
    r.block("S", write_gm(&form.s))
        .block("P", write_gm(&form.p()))
        .field("CLASSES", write_index_list(&form.u))
        .block("G", write_gw(&form.g));
    if let (Some(perm), Some(factor)) = (&form.perm, form.codomain_factor()) {
        r.field("PERM", write_index_list(perm)).block("S'", write_gm(&factor));
    }
    r
}

pub fn verdict_report(v: &PreserverVerdict<GaussianRational>) -> Report {
    let mut r = Report::new();
    r.field("VERDICT", v.kind.as_str());
    match &v.certificate {
        Certificate::Jordan(form) => {
            r.field("FORM", "jordan").extend(jordan_form_report(form));
        }
        Certificate::RankForm { left, t, u } => {
            let n = t.rows();
            let p = Matrix::diag(
                (0..n)
                    .map(|i| GaussianRational::from(u.contains(&i) as i64))
                    .collect(),
            );
            r.field("FORM", "rank")
                .block("L", write_gm(left))
                .block("S", write_gm(t))
                .block("P", write_gm(&p))
                .field("CLASSES", write_index_list(u));
        }
        Certificate::Counterexample(c) => {
            r.field("REASON", &c.reason)
                .block("WITNESS", write_gm(&c.matrix))
                .field("RANK", c.rank)
                .field("IMAGE-RANK", c.image_rank);
        }
        Certificate::JordanViolation(((a, b), (c, d))) => {
            r.field("REASON", "not a Jordan map and no sampled rank counterexample")
                .field("UNITS", format!("({},{}) ({},{})", a + 1, b + 1, c + 1, d + 1));
        }
    }
    r
}
