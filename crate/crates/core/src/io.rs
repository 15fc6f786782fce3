//! Plain-text formats for matrices, point sets and graphs.
//!
//! Each format is a header line followed by rows of whitespace-separated
//! integers. Blank lines and lines starting with `#` are skipped. Field
//! elements use the canonical integer encoding of `Field`.

use std::fmt::Write as _;
use std::path::Path;

use crate::algebra::{Field, Mat};
use crate::blocking::{PointKind, PointSet};
use crate::constructions::Graph;
use crate::error::{Error, Result};

/// Content lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|w| w.parse().map_err(|_| parse_err(line, format!("not a number: {w:?}"))))
        .collect()
}

fn row(line: usize, s: &str, q: u32, len: usize) -> Result<Vec<u8>> {
    let v: Vec<u32> = numbers(line, s)?;
    if v.len() != len {
        return Err(parse_err(line, format!("expected {len} entries, found {}", v.len())));
    }
    if let Some(x) = v.iter().find(|&&x| x >= q) {
        return Err(parse_err(line, format!("entry {x} is not an element of F_{q}")));
    }
    Ok(v.into_iter().map(|x| x as u8).collect())
}

fn header<'a>(it: &mut impl Iterator<Item = (usize, &'a str)>, what: &str, arity: usize) -> Result<(usize, Vec<&'a str>)> {
    let (ln, h) = it.next().ok_or_else(|| parse_err(0, format!("missing {what} header")))?;
    let parts: Vec<&str> = h.split_whitespace().collect();
    if parts.len() != arity {
        return Err(parse_err(ln, format!("{what} header needs {arity} fields")));
    }
    Ok((ln, parts))
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

fn no_trailing<'a>(mut it: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    match it.next() {
        Some((ln, _)) => Err(parse_err(ln, "unexpected extra line")),
        None => Ok(()),
    }
}

/// Parses `q r c` followed by `r` rows of `c` entries.
pub fn parse_matrix(text: &str) -> Result<Mat> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "matrix", 3)?;
    let (q, r, c): (u32, usize, usize) = (num(ln, h[0])?, num(ln, h[1])?, num(ln, h[2])?);
    let field = Field::new(q)?;
    let mut data = Vec::with_capacity(r * c);
    for _ in 0..r {
        let (ln, s) = it.next().ok_or_else(|| parse_err(ln, format!("expected {r} rows")))?;
        data.extend(row(ln, s, q, c)?);
    }
    no_trailing(it)?;
    Mat::new(&field, r, c, data)
}

pub fn write_matrix(m: &Mat) -> String {
    let mut out = format!("{} {} {}\n", m.field().q(), m.rows(), m.cols());
    for r in 0..m.rows() {
        push_row(&mut out, m.row(r));
    }
    out
}

fn push_row(out: &mut String, r: &[u8]) {
    let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "{}", parts.join(" "));
}

/// Parses `q k n kind` followed by `n` points with `k` coordinates.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "point set", 4)?;
    let (q, k, n): (u32, usize, usize) = (num(ln, h[0])?, num(ln, h[1])?, num(ln, h[2])?);
    let kind: PointKind = h[3].parse().map_err(|_| parse_err(ln, format!("unknown kind {:?}", h[3])))?;
    let field = Field::new(q)?;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, s) = it.next().ok_or_else(|| parse_err(ln, format!("expected {n} points")))?;
        pts.push(row(ln, s, q, k)?);
    }
    no_trailing(it)?;
    PointSet::new(&field, k, kind, pts)
}

pub fn write_points(s: &PointSet) -> String {
    let mut out = format!("{} {} {} {}\n", s.field().q(), s.k(), s.len(), s.kind());
    for p in s.points() {
        push_row(&mut out, p);
    }
    out
}

/// Parses `n m` followed by `m` edges `i j` with `0 <= i, j < n`.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut it = lines(text);
    let (ln, h) = header(&mut it, "graph", 2)?;
    let (n, m): (usize, usize) = (num(ln, h[0])?, num(ln, h[1])?);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, s) = it.next().ok_or_else(|| parse_err(ln, format!("expected {m} edges")))?;
        let v: Vec<usize> = numbers(ln, s)?;
        if v.len() != 2 {
            return Err(parse_err(ln, "an edge needs two endpoints"));
        }
        edges.push((v[0], v[1]));
    }
    no_trailing(it)?;
    Graph::new(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edges().len());
    for &(i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    parse_matrix(&read(path)?)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&read(path)?)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = parse_matrix("# generator\n4 2 3\n1 0 2\n0 1 3\n").unwrap();
        assert_eq!(m.field().q(), 4);
        assert_eq!(m.row(1), &[0, 1, 3]);
        assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn points_round_trip() {
        let s = parse_points("3 2 3 projective\n1 2\n0 1\n2 1\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(parse_points(&write_points(&s)).unwrap(), s);
    }

    #[test]
    fn graph_round_trip() {
        let g = parse_graph("4 3\n0 1\n1 2\n2 3\n").unwrap();
        assert_eq!(write_graph(&g), "4 3\n0 1\n1 2\n2 3\n");
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_matrix("3 1 2\n1 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_matrix("3 2 2\n1 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_points("3 2 1 curved\n1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("2 1\n0 1\n1 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_matrix("6 1 1\n0\n"), Err(Error::NotAPrimePower(6))));
    }
}
