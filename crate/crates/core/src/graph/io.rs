//! Plain-text edge lists: one `i j` pair per line, 0-indexed, `#` comments,
//! and an optional `n <count>` header. Without a header `n = 1 + max index`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::scalar::Scalar;

pub fn parse_edge_list<T: Scalar, R: BufRead>(reader: R) -> Result<AdjacencyMatrix<T>> {
    let mut declared_n = None;
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: expected `i j` or `n <count>`, got {body:?}", lineno + 1));
        match fields.as_slice() {
            ["n", count] => {
                if declared_n.is_some() || !edges.is_empty() {
                    return Err(Error::Parse(format!("line {}: misplaced `n` header", lineno + 1)));
                }
                declared_n = Some(count.parse::<usize>().map_err(|_| bad())?);
            }
            [i, j] => {
                let i = i.parse::<usize>().map_err(|_| bad())?;
                let j = j.parse::<usize>().map_err(|_| bad())?;
                edges.push((i, j));
            }
            _ => return Err(bad()),
        }
    }
    let n = declared_n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    AdjacencyMatrix::from_edge_list(n, &edges)
}

pub fn read_edge_list<T: Scalar>(path: impl AsRef<Path>) -> Result<AdjacencyMatrix<T>> {
    parse_edge_list(BufReader::new(File::open(path)?))
}

/// Writes the header and every unordered pair `i < j` in ascending order.
pub fn write_edge_list<T: Scalar, W: Write>(w: &mut W, graph: &AdjacencyMatrix<T>) -> Result<()> {
    writeln!(w, "n {}", graph.n())?;
    for (i, j) in graph.to_edge_list() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type A = AdjacencyMatrix<f64>;

    #[test]
    fn parses_comments_and_header() {
        let text = "# a triangle\nn 4\n0 1\n1 2 # trailing\n\n2 0\n";
        let g: A = parse_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn infers_vertex_count() {
        let g: A = parse_edge_list("0 5\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 6);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_edge_list::<f64, _>("0 x\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list::<f64, _>("0 1 2\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list::<f64, _>("n 2\n0 2\n".as_bytes()), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn round_trip() {
        let g = A::from_edge_list(5, &[(0, 4), (1, 2), (3, 1)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        let back: A = parse_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }
}
