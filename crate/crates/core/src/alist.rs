//! ALIST text format and the column-kind sidecar.
//!
//! ALIST layout (all indices 1-based):
//!
//! ```text
//! cols rows
//! max_col_degree max_row_degree
//! <degree of each column>
//! <degree of each row>
//! <one line per column: its rows, zero-padded to max_col_degree>
//! <one line per row: its columns, zero-padded to max_row_degree>
//! ```
//!
//! The reader accepts both padded and unpadded neighbor lists. The sidecar has
//! one line per column: `C <pos>`, `H` or `F`.

use std::fmt::Write as _;

use crate::graph::{SparseParityMatrix, VnKind};
use crate::{Error, Result};

pub fn write_alist(m: &SparseParityMatrix) -> String {
    let max_col = m.col_lists().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = m.row_lists().iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    writeln!(out, "{} {}", m.cols(), m.rows()).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    write_line(&mut out, m.col_lists().iter().map(Vec::len));
    write_line(&mut out, m.row_lists().iter().map(Vec::len));
    if max_col > 0 {
        for col in m.col_lists() {
            write_padded(&mut out, col, max_col);
        }
    }
    if max_row > 0 {
        for row in m.row_lists() {
            write_padded(&mut out, row, max_row);
        }
    }
    out
}

fn write_line(out: &mut String, values: impl Iterator<Item = usize>) {
    let line: Vec<String> = values.map(|v| v.to_string()).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

fn write_padded(out: &mut String, list: &[usize], width: usize) {
    write_line(
        out,
        list.iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat_n(0, width - list.len())),
    );
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line parsed as integers.
    fn numbers(&mut self, what: &str) -> Result<Vec<usize>> {
        loop {
            let Some((i, line)) = self.inner.next() else {
                return Err(Error::parse(self.last + 1, format!("unexpected end of input, expected {what}")));
            };
            self.last = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            return line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(i + 1, format!("`{t}` is not a non-negative integer")))
                })
                .collect();
        }
    }

    fn exact(&mut self, what: &str, len: usize) -> Result<Vec<usize>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        let v = self.numbers(what)?;
        if v.len() != len {
            return Err(Error::parse(
                self.last,
                format!("expected {len} values for {what}, found {}", v.len()),
            ));
        }
        Ok(v)
    }
}

/// Parses an ALIST matrix. Columns default to channel kind at their own index.
pub fn parse_alist(text: &str) -> Result<SparseParityMatrix> {
    let mut lines = Lines::new(text);
    let head = lines.exact("`cols rows`", 2)?;
    let (cols, rows) = (head[0], head[1]);
    let max = lines.exact("maximum degrees", 2)?;
    let col_deg = lines.exact("column degrees", cols)?;
    let row_deg = lines.exact("row degrees", rows)?;
    for (what, degs, bound) in [("column", &col_deg, max[0]), ("row", &row_deg, max[1])] {
        if let Some(d) = degs.iter().find(|&&d| d > bound) {
            return Err(Error::parse(lines.last, format!("{what} degree {d} exceeds maximum {bound}")));
        }
    }

    let mut col_lists = Vec::with_capacity(cols);
    for (c, &deg) in col_deg.iter().enumerate() {
        col_lists.push(neighbor_list(&mut lines, "column", c, deg, max[0], rows)?);
    }
    let mut row_lists = Vec::with_capacity(rows);
    for (r, &deg) in row_deg.iter().enumerate() {
        row_lists.push(neighbor_list(&mut lines, "row", r, deg, max[1], cols)?);
    }
    let line = lines.last;

    let kinds = (0..cols).map(VnKind::Channel).collect();
    let m = SparseParityMatrix::from_row_lists(cols, row_lists, kinds)
        .map_err(|e| Error::parse(line, e.to_string()))?;
    let mut from_cols = m.col_lists().to_vec();
    for l in &mut from_cols {
        l.sort_unstable();
    }
    for (c, mut l) in col_lists.into_iter().enumerate() {
        l.sort_unstable();
        if l != from_cols[c] {
            return Err(Error::parse(
                line,
                format!("column {} list disagrees with the row lists", c + 1),
            ));
        }
    }
    Ok(m)
}

fn neighbor_list(
    lines: &mut Lines<'_>,
    what: &str,
    index: usize,
    degree: usize,
    max_degree: usize,
    bound: usize,
) -> Result<Vec<usize>> {
    if max_degree == 0 {
        return Ok(Vec::new());
    }
    let raw = lines.numbers(&format!("{what} {} neighbors", index + 1))?;
    let line = lines.last;
    let entries: Vec<usize> = raw.iter().copied().filter(|&v| v != 0).collect();
    if raw[entries.len()..].iter().any(|&v| v != 0) {
        return Err(Error::parse(line, "zero padding must trail the neighbor list"));
    }
    if entries.len() != degree {
        return Err(Error::parse(
            line,
            format!("{what} {} lists {} neighbors, degree says {degree}", index + 1, entries.len()),
        ));
    }
    entries
        .into_iter()
        .map(|v| {
            if v > bound {
                Err(Error::parse(line, format!("index {v} out of range 1..={bound}")))
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

pub fn write_kinds(kinds: &[VnKind]) -> String {
    kinds.iter().map(|k| format!("{k}\n")).collect()
}

pub fn parse_kinds(text: &str) -> Result<Vec<VnKind>> {
    let mut kinds = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let kind = match tokens.as_slice() {
            [] => continue,
            ["H"] => VnKind::Hidden,
            ["F"] => VnKind::Frozen,
            ["C", pos] => {
                let p: usize = pos
                    .parse()
                    .ok()
                    .filter(|&p| p >= 1)
                    .ok_or_else(|| Error::parse(i + 1, format!("bad channel position `{pos}`")))?;
                VnKind::Channel(p - 1)
            }
            _ => return Err(Error::parse(i + 1, format!("unrecognized kind `{}`", line.trim()))),
        };
        kinds.push(kind);
    }
    Ok(kinds)
}

/// Parses an ALIST matrix together with its kind sidecar.
pub fn parse_alist_with_kinds(alist: &str, kinds: &str) -> Result<SparseParityMatrix> {
    let m = parse_alist(alist)?;
    let kinds = parse_kinds(kinds)?;
    m.with_col_kinds(kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_encoding_graph;
    use crate::PolarCode;

    const IDENTITY: &str = "4 4\n1 1\n1 1 1 1\n1 1 1 1\n1\n2\n3\n4\n1\n2\n3\n4\n";

    #[test]
    fn identity_roundtrip() {
        let m = parse_alist(IDENTITY).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 4));
        assert_eq!(m.density().unwrap(), 0.25);
        assert_eq!(write_alist(&m), IDENTITY);
    }

    #[test]
    fn padded_and_unpadded() {
        let padded = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        let unpadded = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";
        let a = parse_alist(padded).unwrap();
        let b = parse_alist(unpadded).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_alist(&a), padded);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "4 4\n1 1\n1 1 1 1\n1 1 1 1\n1\n2\nx\n4\n1\n2\n3\n4\n";
        match parse_alist(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let inconsistent = "2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n";
        assert!(matches!(parse_alist(inconsistent), Err(Error::Parse { .. })));
        let short = "4 4\n1 1\n1 1 1 1\n";
        assert!(matches!(parse_alist(short), Err(Error::Parse { line: 4, .. })));
        let range = "1 1\n1 1\n1\n1\n2\n1\n";
        assert!(matches!(parse_alist(range), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn edgeless_matrix() {
        let m = SparseParityMatrix::from_row_lists(3, vec![vec![], vec![]], vec![VnKind::Hidden; 3]).unwrap();
        let text = write_alist(&m);
        assert_eq!(text, "3 2\n0 0\n0 0 0\n0 0\n");
        assert_eq!(parse_alist(&text).unwrap().dims(), m.dims());
    }

    #[test]
    fn kinds_sidecar() {
        let kinds = vec![VnKind::Channel(0), VnKind::Hidden, VnKind::Frozen, VnKind::Channel(7)];
        let text = write_kinds(&kinds);
        assert_eq!(text, "C 1\nH\nF\nC 8\n");
        assert_eq!(parse_kinds(&text).unwrap(), kinds);
        assert!(matches!(parse_kinds("H\nC 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_kinds("Q\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn encoding_graph_roundtrip() {
        let code = PolarCode::construct(16, 8, 0.6).unwrap();
        let m = build_encoding_graph(&code).to_parity_matrix();
        let text = write_alist(&m);
        let back = parse_alist_with_kinds(&text, &write_kinds(m.col_kinds())).unwrap();
        assert_eq!(back, m);
        assert_eq!(write_alist(&back), text);
    }
}
