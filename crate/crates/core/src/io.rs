//! Plain-text graph and instance-annotation formats.
//!
//! Graph file: a header line `n m`, then `m` lines `u v` (0-indexed). The
//! writer emits edges in lexicographic order. Blank lines and lines starting
//! with `#` are ignored by the reader.
//!
//! Annotation file (for subnetwork fixtures, read next to a graph file):
//!
//! ```text
//! vin <k>
//! <k lines, one vertex id each>
//! eout <j>
//! <j lines `u v`>
//! ```

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::graph::{normalize, Edge, Graph, VertexId};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("invalid {what} `{tok}`")))
}

fn parse_pair(l: &str, line: usize) -> Result<(usize, usize), ParseError> {
    let mut it = l.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(ParseError::new(line, "expected two integers"));
    };
    Ok((parse_usize(a, line, "vertex")?, parse_usize(b, line, "vertex")?))
}

/// Largest vertex count accepted by the reader.
pub const MAX_VERTICES: usize = 1 << 24;

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| ParseError::new(0, "missing header"))?;
    let (n, m) = parse_pair(header, hl)?;
    if n > MAX_VERTICES {
        return Err(ParseError::new(hl, format!("n = {n} exceeds {MAX_VERTICES}")));
    }
    let mut edges = Vec::with_capacity(m.min(1 << 20));
    let mut last_line = hl;
    for (ln, l) in lines {
        last_line = ln;
        if edges.len() == m {
            return Err(ParseError::new(ln, format!("more than {m} edges")));
        }
        edges.push(parse_pair(l, ln)?);
    }
    if edges.len() != m {
        return Err(ParseError::new(
            last_line,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges).map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Annotation {
    /// Sorted, distinct.
    pub vin: Vec<VertexId>,
    /// Normalised, sorted, distinct.
    pub eout: Vec<Edge>,
}

fn section_header(l: &str, line: usize, key: &str) -> Result<usize, ParseError> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(c), None) if k == key => parse_usize(c, line, "count"),
        _ => Err(ParseError::new(line, format!("expected `{key} <count>`"))),
    }
}

pub fn parse_annotation(text: &str) -> Result<Annotation, ParseError> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let mut pos = 0;
    let next = |pos: &mut usize| -> Result<(usize, &str), ParseError> {
        let item = lines
            .get(*pos)
            .copied()
            .ok_or_else(|| ParseError::new(lines.last().map_or(0, |l| l.0), "unexpected end of input"))?;
        *pos += 1;
        Ok(item)
    };
    let (ln, l) = next(&mut pos)?;
    let k = section_header(l, ln, "vin")?;
    let mut vin = Vec::with_capacity(k.min(1 << 20));
    for _ in 0..k {
        let (ln, l) = next(&mut pos)?;
        vin.push(parse_usize(l, ln, "vertex")?);
    }
    let (ln, l) = next(&mut pos)?;
    let j = section_header(l, ln, "eout")?;
    let mut eout = Vec::with_capacity(j.min(1 << 20));
    for _ in 0..j {
        let (ln, l) = next(&mut pos)?;
        let (u, v) = parse_pair(l, ln)?;
        if u == v {
            return Err(ParseError::new(ln, "self-loop in eout"));
        }
        eout.push(normalize(u, v));
    }
    if let Some(&(ln, _)) = lines.get(pos) {
        return Err(ParseError::new(ln, "trailing content"));
    }
    vin.sort_unstable();
    if vin.windows(2).any(|w| w[0] == w[1]) {
        return Err(ParseError::new(0, "duplicate vertex in vin"));
    }
    eout.sort_unstable();
    if eout.windows(2).any(|w| w[0] == w[1]) {
        return Err(ParseError::new(0, "duplicate edge in eout"));
    }
    Ok(Annotation { vin, eout })
}

pub fn write_annotation(a: &Annotation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vin {}", a.vin.len());
    for v in &a.vin {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "eout {}", a.eout.len());
    for (u, v) in &a.eout {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip() {
        let g = Graph::from_edges(5, [(3, 1), (0, 4), (2, 3)]).unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "5 3\n0 4\n1 3\n2 3\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn graph_errors() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("3 2\n0 1\n").is_err());
        assert!(parse_graph("3 1\n0 1\n1 2\n").is_err());
        assert!(parse_graph("3 1\n0 3\n").is_err());
        assert!(parse_graph("3 1\n0 x\n").is_err());
        assert!(parse_graph("# c\n3 1\n\n0 1\n").is_ok());
    }

    #[test]
    fn annotation_round_trip() {
        let a = Annotation {
            vin: vec![0, 2, 5],
            eout: vec![(0, 1), (2, 7)],
        };
        let text = write_annotation(&a);
        assert_eq!(parse_annotation(&text).unwrap(), a);
        assert!(parse_annotation("vin 1\n0\n").is_err());
        assert!(parse_annotation("vin 1\n0\neout 0\n9\n").is_err());
        assert!(parse_annotation("vin 2\n0\n0\neout 0\n").is_err());
    }

    proptest! {
        #[test]
        fn parser_never_panics(s in "\\PC{0,200}") {
            let _ = parse_graph(&s);
            let _ = parse_annotation(&s);
        }

        #[test]
        fn written_graphs_parse_back(n in 1usize..30, pairs in proptest::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let g = Graph::from_edges_dedup(n, pairs.into_iter().map(|(a, b)| (a % n, b % n)));
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }
}
