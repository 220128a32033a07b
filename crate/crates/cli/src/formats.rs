//! Plain-text input formats.
//!
//! Matrix files: first line the size `n`, then `n` lines of `n`
//! space-separated 0/1 entries. Graph files: a `vertices:` line followed by
//! `edge <id> <source> <range>` lines. Action files: a `group:` line with
//! the cyclic orders, then one line of `n` integer exponents per generator.
//! Anything beyond the expected content is rejected.

use ck_core::endo::ActionSpec;
use ck_core::matrix::{Edge, FiniteGraph, GraphError, MatrixError};
use ck_core::ZeroOneMatrix;

#[derive(Debug)]
pub enum FormatError {
    /// Malformed input text (exit code 2).
    Parse(String),
    /// Structurally valid text that fails matrix validation (exit code 3).
    Matrix(MatrixError),
    /// Graph consistency failure (exit code 3).
    Graph(GraphError),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Parse(msg) => write!(f, "{msg}"),
            FormatError::Matrix(e) => write!(f, "{e}"),
            FormatError::Graph(e) => write!(f, "{e}"),
        }
    }
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<ZeroOneMatrix, FormatError> {
    let lines = content_lines(text);
    let (first_no, first) = lines
        .first()
        .ok_or_else(|| FormatError::Parse("empty matrix file".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| FormatError::Parse(format!("line {first_no}: expected the size")))?;
    if lines.len() != n + 1 {
        return Err(FormatError::Parse(format!(
            "expected {} rows after the size line, found {}",
            n,
            lines.len() - 1
        )));
    }
    let mut raw: Vec<Vec<i64>> = Vec::with_capacity(n);
    for (line_no, line) in &lines[1..] {
        let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        let row =
            row.map_err(|_| FormatError::Parse(format!("line {line_no}: bad matrix entry")))?;
        if row.len() != n {
            return Err(FormatError::Parse(format!(
                "line {line_no}: expected {n} entries, found {}",
                row.len()
            )));
        }
        raw.push(row);
    }
    ZeroOneMatrix::validate(&raw).map_err(FormatError::Matrix)
}

pub fn parse_graph(text: &str) -> Result<FiniteGraph, FormatError> {
    let lines = content_lines(text);
    let (first_no, first) = lines
        .first()
        .ok_or_else(|| FormatError::Parse("empty graph file".into()))?;
    let vertices: Vec<String> = match first.strip_prefix("vertices:") {
        Some(rest) => rest.split_whitespace().map(String::from).collect(),
        None => {
            return Err(FormatError::Parse(format!(
                "line {first_no}: expected 'vertices: v1 v2 ...'"
            )))
        }
    };
    let mut edges = Vec::new();
    for (line_no, line) in &lines[1..] {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("edge"), Some(id), Some(src), Some(rng), None) => edges.push(Edge {
                id: id.into(),
                source: src.into(),
                range: rng.into(),
            }),
            _ => {
                return Err(FormatError::Parse(format!(
                    "line {line_no}: expected 'edge <id> <source> <range>'"
                )))
            }
        }
    }
    FiniteGraph::new(vertices, edges).map_err(FormatError::Graph)
}

pub fn parse_action(text: &str) -> Result<ActionSpec, FormatError> {
    let lines = content_lines(text);
    let (first_no, first) = lines
        .first()
        .ok_or_else(|| FormatError::Parse("empty action file".into()))?;
    let orders: Vec<u32> = match first.strip_prefix("group:") {
        Some(rest) => rest
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| FormatError::Parse(format!("line {first_no}: bad group order")))?,
        None => {
            return Err(FormatError::Parse(format!(
                "line {first_no}: expected 'group: n1 n2 ...'"
            )))
        }
    };
    if lines.len() != orders.len() + 1 {
        return Err(FormatError::Parse(format!(
            "expected {} generator rows, found {}",
            orders.len(),
            lines.len() - 1
        )));
    }
    let mut exponents = Vec::new();
    for (line_no, line) in &lines[1..] {
        let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        exponents
            .push(row.map_err(|_| FormatError::Parse(format!("line {line_no}: bad exponent")))?);
    }
    Ok(ActionSpec::diagonal(orders, exponents))
}
