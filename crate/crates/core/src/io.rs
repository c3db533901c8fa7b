//! graph6 text encoding, DOT export and vertex-mark sidecars.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MarkedGraph, MAX_ORDER};

const HEADER: &str = ">>graph6<<";

/// Encodes `g` in graph6 (no header).
pub fn to_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = String::new();
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    }
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push(((acc << (6 - k)) + 63) as char);
    }
    out
}

/// Decodes one graph6 string; an optional `>>graph6<<` header and surrounding whitespace are
/// accepted.
pub fn from_graph6(s: &str) -> Result<Graph> {
    let s = s.trim();
    let s = s.strip_prefix(HEADER).unwrap_or(s);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(Error::Graph6("empty input".into()));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Graph6(format!("byte {b:#04x} outside the printable graph6 range")));
    }
    let (n, body) = if bytes[0] != 126 {
        ((bytes[0] - 63) as usize, &bytes[1..])
    } else {
        if bytes.len() < 4 || bytes[1] == 126 {
            return Err(Error::Graph6("truncated or unsupported order prefix".into()));
        }
        let n = bytes[1..4].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        if n <= 62 {
            return Err(Error::Graph6(format!("order {n} must use the short order form")));
        }
        (n, &bytes[4..])
    };
    if n > MAX_ORDER {
        return Err(Error::OrderBound { order: n, bound: MAX_ORDER });
    }
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if body.len() != need {
        return Err(Error::Graph6(format!("expected {need} data bytes for order {n}, found {}", body.len())));
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    if k % 6 != 0 && (body[need - 1] - 63) & ((1 << (6 - k % 6)) - 1) != 0 {
        return Err(Error::Graph6("nonzero padding bits".into()));
    }
    Ok(g)
}

/// One graph per non-empty line.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(from_graph6).collect()
}

pub fn read_graph6_file(path: &Path) -> Result<Vec<Graph>> {
    parse_graph6_lines(&std::fs::read_to_string(path)?)
}

pub fn write_graph6_file(path: &Path, graphs: &[Graph]) -> Result<()> {
    let mut s = String::new();
    for g in graphs {
        s.push_str(&to_graph6(g));
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Graphviz rendering; marked vertices are labelled with their names.
pub fn to_dot(g: &Graph, marks: &BTreeMap<String, usize>) -> String {
    let mut names: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (name, &v) in marks {
        names.entry(v).or_default().push(name);
    }
    let mut out = String::from("graph G {\n");
    for v in 0..g.order() {
        match names.get(&v) {
            Some(ns) => writeln!(out, "  {v} [label=\"{v}:{}\"];", ns.join(",")).unwrap(),
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_graph6(self))
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        from_graph6(&s).map_err(serde::de::Error::custom)
    }
}

/// JSON sidecar for vertex marks: `{"marks": {"p": 3}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarksSidecar {
    pub marks: BTreeMap<String, usize>,
}

impl MarkedGraph {
    pub fn marks_json(&self) -> String {
        serde_json::to_string(&MarksSidecar { marks: self.marks.clone() }).expect("marks serialize")
    }

    pub fn from_parts(graph6: &str, marks_json: &str) -> Result<MarkedGraph> {
        let graph = from_graph6(graph6)?;
        let side: MarksSidecar = serde_json::from_str(marks_json)?;
        if let Some((name, &v)) = side.marks.iter().find(|(_, &v)| v >= graph.order()) {
            return Err(Error::InvalidParameter(format!("mark `{name}` names vertex {v} outside the graph")));
        }
        Ok(MarkedGraph { graph, marks: side.marks })
    }
}
