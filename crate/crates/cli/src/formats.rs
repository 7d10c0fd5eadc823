//! Plain-text formats.
//!
//! Edge lists start with a line `n m`, followed by `m` lines of
//! whitespace-separated node ids. Blank lines and `#` comments are skipped.
//! Key-value files hold one `key<TAB>value-hex` pair per line.

use std::fmt::Write as _;

use mixcore::{Hypergraph, HypergraphError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] HypergraphError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_edge_list(h: &Hypergraph) -> String {
    let mut out = format!("{} {}\n", h.node_count(), h.edge_count());
    for e in h.edges() {
        let mut sep = "";
        for v in e {
            let _ = write!(out, "{sep}{v}");
            sep = " ";
        }
        out.push('\n');
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Hypergraph, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| syntax(0, "empty input"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| syntax(line, "header must be `n m`")))
        .collect::<Result<_, _>>()?;
    let [n, m] = dims[..] else {
        return Err(syntax(line, "header must be `n m`"));
    };
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let edge = l
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| syntax(line, format!("bad node id `{t}`"))))
            .collect::<Result<Vec<u32>, _>>()?;
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(FormatError::EdgeCount { expected: m, found: edges.len() });
    }
    Ok(Hypergraph::from_edges(n, &edges)?)
}

/// Parses `key<TAB>hex` lines; the key is taken verbatim as bytes.
pub fn read_key_values(text: &str) -> Result<Vec<(Vec<u8>, u64)>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let (key, hex) = l.split_once('\t').ok_or_else(|| syntax(i + 1, "expected key<TAB>value"))?;
            let hex = hex.trim();
            let hex = hex.strip_prefix("0x").unwrap_or(hex);
            let value = u64::from_str_radix(hex, 16).map_err(|_| syntax(i + 1, format!("bad hex value `{hex}`")))?;
            Ok((key.as_bytes().to_vec(), value))
        })
        .collect()
}
