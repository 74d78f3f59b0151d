//! Tab-separated edge-list files.
//!
//! ```text
//! # netpercolate-edges v1 nodes=<N> classes=<n>
//! src<TAB>dst<TAB>class
//! ```
//!
//! Blank lines and further `#` comment lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, EdgeClassId, TypedDigraph};
use crate::{Error, Result};

pub const EDGE_LIST_MAGIC: &str = "netpercolate-edges v1";

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let perr = |message: String| Error::Parse { line: lineno, message };
    let body = line
        .trim()
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|s| s.strip_prefix(EDGE_LIST_MAGIC))
        .ok_or_else(|| perr(format!("expected header `# {EDGE_LIST_MAGIC} nodes=<N> classes=<n>`")))?;
    let mut nodes = None;
    let mut classes = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| perr(format!("malformed header field `{field}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| perr(format!("header field `{key}` is not a nonnegative integer")))?;
        match key {
            "nodes" => nodes = Some(value),
            "classes" => classes = Some(value),
            _ => return Err(perr(format!("unknown header field `{key}`"))),
        }
    }
    match (nodes, classes) {
        (Some(n), Some(c)) => Ok((n, c)),
        _ => Err(perr("header must declare both nodes= and classes=".into())),
    }
}

pub fn parse_edge_list(text: &str) -> Result<TypedDigraph> {
    let mut header = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        let Some((nodes, classes)) = header else {
            if line.is_empty() {
                continue;
            }
            header = Some(parse_header(line, lineno)?);
            continue;
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{what} `{s}` is not a nonnegative integer"),
            })
        };
        let (src, dst, class) = (num(fields[0], "source")?, num(fields[1], "target")?, num(fields[2], "class")?);
        if src >= nodes || dst >= nodes {
            return Err(Error::Parse {
                line: lineno,
                message: format!("node index out of range 0..{nodes}"),
            });
        }
        if class >= classes {
            return Err(Error::Parse {
                line: lineno,
                message: format!("class {class} out of range 0..{classes}"),
            });
        }
        edges.push(Edge { src, dst, class: EdgeClassId(class as u8) });
    }
    let (nodes, classes) = header.ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    TypedDigraph::new(nodes, classes, edges).map_err(|e| Error::Parse { line: 1, message: e.to_string() })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<TypedDigraph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &TypedDigraph) -> String {
    let mut out = String::with_capacity(16 * g.edge_count() + 64);
    let _ = writeln!(out, "# {EDGE_LIST_MAGIC} nodes={} classes={}", g.node_count(), g.n_classes());
    for e in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", e.src, e.dst, e.class.0);
    }
    out
}
