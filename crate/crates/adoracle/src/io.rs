//! Graph file formats.
//!
//! DIMACS shortest-path files (`c` comments, `p sp n m`, `a u v w` with
//! 1-based ids) and plain edge lists (`u v w` per line, `#` comments).
//! Undirected edges may appear once or in both directions; duplicates
//! collapse to the minimum weight.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use adoracle_core::graph::{Graph, GraphError, MAX_VERTICES};
use adoracle_core::Distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dimacs,
    EdgeList,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dimacs" | "dimacs-gr" | "gr" => Some(Format::Dimacs),
            "edge-list" | "edges" | "txt" => Some(Format::EdgeList),
            _ => None,
        }
    }

    /// `.gr` means DIMACS, anything else an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gr") => Format::Dimacs,
            _ => Format::EdgeList,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: i128 },
    #[error("vertex count exceeds {MAX_VERTICES}")]
    TooManyVertices,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        message: message.into(),
    }
}

/// A graph with the original label of every dense vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub labels: Vec<u64>,
}

fn field<'a>(it: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<&'a str, LoadError> {
    it.next().ok_or_else(|| parse_err(line, format!("missing {what}")))
}

fn vertex(tok: &str, line: usize) -> Result<u64, LoadError> {
    tok.parse::<u64>()
        .map_err(|_| parse_err(line, format!("bad vertex id {tok:?}")))
}

fn weight(tok: &str, line: usize) -> Result<Distance, LoadError> {
    let w: i128 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad weight {tok:?}")))?;
    if w < 0 {
        return Err(LoadError::NegativeWeight { line, weight: w });
    }
    Distance::try_from(w).map_err(|_| parse_err(line, format!("weight {w} too large")))
}

pub fn parse_edge_list(reader: impl BufRead) -> Result<LoadedGraph, LoadError> {
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let u = vertex(field(&mut it, line_no, "source")?, line_no)?;
        let v = vertex(field(&mut it, line_no, "target")?, line_no)?;
        let w = weight(field(&mut it, line_no, "weight")?, line_no)?;
        if it.next().is_some() {
            return Err(parse_err(line_no, "trailing fields"));
        }
        raw.push((u, v, w));
    }
    let labels: Vec<u64> = raw
        .iter()
        .flat_map(|&(u, v, _)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() > MAX_VERTICES {
        return Err(LoadError::TooManyVertices);
    }
    let id = |l: u64| labels.binary_search(&l).expect("label collected above");
    let graph = Graph::from_edges(labels.len(), raw.iter().map(|&(u, v, w)| (id(u), id(v), w)))?;
    Ok(LoadedGraph { graph, labels })
}

pub fn parse_dimacs(reader: impl BufRead) -> Result<LoadedGraph, LoadError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            None | Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(parse_err(line_no, "duplicate problem line"));
                }
                if field(&mut it, line_no, "problem type")? != "sp" {
                    return Err(parse_err(line_no, "expected problem type `sp`"));
                }
                let count: usize = field(&mut it, line_no, "vertex count")?
                    .parse()
                    .map_err(|_| parse_err(line_no, "bad vertex count"))?;
                if count > MAX_VERTICES {
                    return Err(LoadError::TooManyVertices);
                }
                field(&mut it, line_no, "arc count")?
                    .parse::<u64>()
                    .map_err(|_| parse_err(line_no, "bad arc count"))?;
                n = Some(count);
            }
            Some("a") => {
                let n = n.ok_or_else(|| parse_err(line_no, "arc before problem line"))?;
                let mut endpoint = |what| -> Result<usize, LoadError> {
                    let x = vertex(field(&mut it, line_no, what)?, line_no)?;
                    if x == 0 || x as usize > n {
                        return Err(parse_err(line_no, format!("vertex {x} outside 1..={n}")));
                    }
                    Ok(x as usize - 1)
                };
                let u = endpoint("tail")?;
                let v = endpoint("head")?;
                let w = weight(field(&mut it, line_no, "weight")?, line_no)?;
                edges.push((u, v, w));
            }
            Some(other) => return Err(parse_err(line_no, format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing problem line"))?;
    let graph = Graph::from_edges(n, edges)?;
    Ok(LoadedGraph {
        graph,
        labels: (1..=n as u64).collect(),
    })
}

pub fn load_graph(path: impl AsRef<Path>, format: Format) -> Result<LoadedGraph, LoadError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        Format::Dimacs => parse_dimacs(reader),
        Format::EdgeList => parse_edge_list(reader),
    }
}

/// Writes `g` as an edge list using `labels` (dense ids when `None`).
pub fn write_edge_list(g: &Graph, labels: Option<&[u64]>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "# n={} m={}", g.vertex_count(), g.edge_count())?;
    let label = |v: usize| labels.map_or(v as u64, |l| l[v]);
    for (u, v, w) in g.edges() {
        writeln!(out, "{} {} {}", label(u), label(v), w)?;
    }
    Ok(())
}

/// Writes `g` in DIMACS form, one arc per undirected edge.
pub fn write_dimacs(g: &Graph, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "p sp {} {}", g.vertex_count(), g.edge_count())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "a {} {} {}", u + 1, v + 1, w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_p3() {
        let g = parse_edge_list("0 1 1\n1 2 1".as_bytes()).unwrap();
        assert_eq!(g.graph.vertex_count(), 3);
        assert_eq!(g.graph.edge_count(), 2);
        assert_eq!(g.labels, vec![0, 1, 2]);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let e = parse_edge_list("0 1 1\n0 1 -5\n".as_bytes()).unwrap_err();
        assert!(matches!(e, LoadError::NegativeWeight { line: 2, weight: -5 }));
        let e = parse_edge_list("# header\n0 x 1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, LoadError::Parse { line: 2, .. }));
        let e = parse_edge_list("0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, LoadError::Parse { line: 1, .. }));
    }

    #[test]
    fn edge_list_remaps_sparse_labels() {
        let g = parse_edge_list("10 30 2 # c\n30 20 1\n\n".as_bytes()).unwrap();
        assert_eq!(g.labels, vec![10, 20, 30]);
        assert_eq!(g.graph.edges().collect::<Vec<_>>(), vec![(0, 2, 2), (1, 2, 1)]);
    }

    #[test]
    fn dimacs_matches_edge_list() {
        let d = parse_dimacs("c tiny\np sp 3 2\na 1 2 1\na 2 3 1\na 2 1 1\n".as_bytes()).unwrap();
        let e = parse_edge_list("0 1 1\n1 2 1".as_bytes()).unwrap();
        assert_eq!(d.graph, e.graph);
        // label l in the edge list is label l + 1 in DIMACS
        for (a, b) in d.labels.iter().zip(&e.labels) {
            assert_eq!(*a, b + 1);
        }
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(
            parse_dimacs("a 1 2 1\n".as_bytes()),
            Err(LoadError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p sp 2 1\na 1 3 1\n".as_bytes()),
            Err(LoadError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p sp 2 1\na 1 2 -1\n".as_bytes()),
            Err(LoadError::NegativeWeight { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs(format!("p sp {} 0\n", u64::MAX).as_bytes()),
            Err(LoadError::Parse { .. }) | Err(LoadError::TooManyVertices)
        ));
    }

    #[test]
    fn format_detection() {
        assert_eq!(Format::from_path(Path::new("x.gr")), Format::Dimacs);
        assert_eq!(Format::from_path(Path::new("x.txt")), Format::EdgeList);
        assert_eq!(Format::parse("dimacs-gr"), Some(Format::Dimacs));
    }
}
