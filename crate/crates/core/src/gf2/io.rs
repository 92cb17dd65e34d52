//! Sparse matrix interchange text.
//!
//! ```text
//! rows cols
//! <1-based column indices of the ones in row 1>
//! ...
//! <row `rows`>
//! <blank line>
//! ```
//!
//! An all-zero row is an empty line; the header fixes how many row lines are
//! read, so the trailing blank line is optional on input.

use std::fmt::Write as _;

use super::{BitMatrix, Gf2Error};

pub fn write_sparse(m: &BitMatrix) -> String {
    let mut out = String::with_capacity(m.nnz() * 7 + m.rows() + 16);
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for r in m.row_supports() {
        let mut first = true;
        for &c in r {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", c + 1);
        }
        out.push('\n');
    }
    out.push('\n');
    out
}

pub fn read_sparse(text: &str) -> Result<BitMatrix, Gf2Error> {
    let mut lines = text.lines().enumerate();
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(hline + 1, "header must be `rows cols`"));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| parse_err(hline + 1, "bad row count"))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| parse_err(hline + 1, "bad column count"))?;
    let mut support = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline + 1, "fewer row lines than the header declares"))?;
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let idx: usize = tok
                .parse()
                .map_err(|_| parse_err(lno + 1, &format!("bad column index {tok:?}")))?;
            if idx == 0 || idx > cols {
                return Err(parse_err(
                    lno + 1,
                    &format!("column index {idx} outside 1..={cols}"),
                ));
            }
            row.push(idx - 1);
        }
        row.sort_unstable();
        if row.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(lno + 1, "repeated column index"));
        }
        support.push(row);
    }
    if let Some((lno, line)) = lines.next() {
        if !line.trim().is_empty() {
            return Err(parse_err(lno + 1, "more row lines than the header declares"));
        }
    }
    BitMatrix::new(rows, cols, support)
}

fn parse_err(line: usize, message: &str) -> Gf2Error {
    Gf2Error::Parse {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_one_based_rows() {
        let m = BitMatrix::from_dense(&[vec![1u8, 0, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(write_sparse(&m), "2 3\n1 3\n\n\n");
        assert_eq!(read_sparse(&write_sparse(&m)).unwrap(), m);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_sparse("2 3\n1 4\n2\n").unwrap_err();
        assert!(matches!(err, Gf2Error::Parse { line: 2, .. }), "{err}");
        let err = read_sparse("2 3\n1\n").unwrap_err();
        assert!(matches!(err, Gf2Error::Parse { .. }));
        let err = read_sparse("1 3\n1\n2\n").unwrap_err();
        assert!(matches!(err, Gf2Error::Parse { line: 3, .. }));
    }
}
