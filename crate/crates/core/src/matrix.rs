//! Doubly d-regular 0/1 matrices: adjacency matrices of directed d-regular
//! graphs on `n` vertices, loops allowed.
//!
//! Supports are kept twice, once per row and once per column, as flat sorted
//! index arrays of length `n * d`. Row `s` occupies `rows[s*d..(s+1)*d]`.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiregularMatrix {
    n: usize,
    d: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
}

impl BiregularMatrix {
    /// Validates `rows` (one support set per row, any order) and derives the
    /// column supports.
    pub fn build<R: AsRef<[usize]>>(n: usize, d: usize, rows: &[R]) -> Result<Self> {
        check_params(n, d)?;
        if rows.len() != n {
            return Err(Error::InvalidParams(format!(
                "expected {n} rows, got {}",
                rows.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * d);
        for (s, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::RowDegree { row: s, found: row.len(), expected: d });
            }
            let start = flat.len();
            for &t in row {
                if t >= n {
                    return Err(Error::Index { index: t, n });
                }
                flat.push(t as u32);
            }
            let chunk = &mut flat[start..];
            chunk.sort_unstable();
            if let Some(w) = chunk.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateIndex { row: s, index: w[0] as usize });
            }
        }
        Self::from_sorted_rows(n, d, flat)
    }

    /// `flat` must hold `n` sorted, duplicate-free chunks of length `d`.
    pub(crate) fn from_sorted_rows(n: usize, d: usize, flat: Vec<u32>) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &t in &flat {
            degree[t as usize] += 1;
        }
        if let Some((col, &found)) = degree.iter().enumerate().find(|(_, &c)| c != d) {
            return Err(Error::ColDegree { col, found, expected: d });
        }
        let mut cols = vec![0u32; n * d];
        let mut fill = vec![0usize; n];
        // rows are visited in increasing order, so every column chunk ends up sorted
        for s in 0..n {
            for &t in &flat[s * d..(s + 1) * d] {
                let t = t as usize;
                cols[t * d + fill[t]] = s as u32;
                fill[t] += 1;
            }
        }
        Ok(Self { n, d, rows: flat, cols })
    }

    /// Row `s` has support `{(s + r) mod n : 0 <= r < d}`.
    pub fn circulant(n: usize, d: usize) -> Result<Self> {
        check_params(n, d)?;
        let mut flat = Vec::with_capacity(n * d);
        for s in 0..n {
            let start = flat.len();
            flat.extend((0..d).map(|r| ((s + r) % n) as u32));
            flat[start..].sort_unstable();
        }
        Self::from_sorted_rows(n, d, flat)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::circulant(n, 1)
    }

    /// `m` diagonal blocks of `d x d` ones, `n = m * d`.
    pub fn block_diagonal(m: usize, d: usize) -> Result<Self> {
        let n = m * d;
        check_params(n, d)?;
        let flat = (0..n)
            .flat_map(|s| {
                let b = (s / d) * d;
                (b..b + d).map(|t| t as u32)
            })
            .collect();
        Self::from_sorted_rows(n, d, flat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sorted column indices of the ones in row `s`.
    pub fn row(&self, s: usize) -> &[u32] {
        &self.rows[s * self.d..(s + 1) * self.d]
    }

    /// Sorted row indices of the ones in column `t`.
    pub fn col(&self, t: usize) -> &[u32] {
        &self.cols[t * self.d..(t + 1) * self.d]
    }

    pub(crate) fn flat_rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn entry(&self, s: usize, t: usize) -> Result<bool> {
        self.check_index(s)?;
        self.check_index(t)?;
        Ok(self.has(s, t))
    }

    #[inline]
    pub(crate) fn has(&self, s: usize, t: usize) -> bool {
        self.row(s).binary_search(&(t as u32)).is_ok()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::Index { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Total number of ones, counted from the row supports.
    pub fn ones_by_rows(&self) -> usize {
        (0..self.n).map(|s| self.row(s).len()).sum()
    }

    /// Total number of ones, counted from the column supports.
    pub fn ones_by_cols(&self) -> usize {
        (0..self.n).map(|t| self.col(t).len()).sum()
    }

    /// The `q`-th one in row-major order, `q < n * d`.
    #[inline]
    pub(crate) fn one_at(&self, q: usize) -> (usize, usize) {
        (q / self.d, self.rows[q] as usize)
    }

    pub fn transpose(&self) -> Self {
        Self { n: self.n, d: self.d, rows: self.cols.clone(), cols: self.rows.clone() }
    }

    /// Dense 0/1 rows.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|s| {
                let mut r = vec![0u8; self.n];
                for &t in self.row(s) {
                    r[t as usize] = 1;
                }
                r
            })
            .collect()
    }

    pub fn id(&self) -> MatrixId {
        MatrixId::of(self)
    }

    /// Text form: header `n d`, then one line of sorted column indices per row.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.d * 4 + 1) + 16);
        let _ = writeln!(out, "{} {}", self.n, self.d);
        for s in 0..self.n {
            for (r, t) in self.row(s).iter().enumerate() {
                if r > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        if !text.ends_with('\n') {
            let line = text.lines().count().max(1);
            return Err(parse_err(line, text.lines().last().map_or(0, str::len) + 1, "missing trailing newline"));
        }
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("");
        let fields = tokens(header, 1)?;
        if fields.len() != 2 {
            return Err(parse_err(1, header.len() + 1, "header must be \"n d\""));
        }
        let (n, d) = (fields[0], fields[1]);
        check_params(n, d)?;
        let mut rows = Vec::with_capacity(n);
        for s in 0..n {
            let line_no = s + 2;
            let line = lines
                .next()
                .ok_or_else(|| parse_err(line_no, 1, "unexpected end of input"))?;
            rows.push(tokens(line, line_no)?);
        }
        // what remains after the n rows must be the empty tail left by the final newline
        let rest: Vec<&str> = lines.collect();
        if rest.len() != 1 || !rest[0].is_empty() {
            return Err(parse_err(n + 2, 1, "trailing content after last row"));
        }
        for (s, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(parse_err(s + 2, 1, "row indices must be sorted"));
            }
        }
        Self::build(n, d, &rows)
    }
}

fn check_params(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::InvalidParams(format!("need n >= 1 and 1 <= d <= n, got n = {n}, d = {d}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParams(format!("n = {n} too large")));
    }
    Ok(())
}

fn parse_err(line: usize, pos: usize, msg: &str) -> Error {
    Error::Parse { line, pos, msg: msg.to_string() }
}

/// Splits on single spaces and parses decimal integers.
fn tokens(line: &str, line_no: usize) -> Result<Vec<usize>> {
    if line.is_empty() {
        return Err(parse_err(line_no, 1, "empty line"));
    }
    let mut out = Vec::new();
    let mut pos = 1;
    for tok in line.split(' ') {
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(line_no, pos, "expected a decimal integer"));
        }
        out.push(tok.parse().map_err(|_| parse_err(line_no, pos, "integer overflow"))?);
        pos += tok.len() + 1;
    }
    Ok(out)
}

impl fmt::Debug for BiregularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiregularMatrix(n={}, d={}, rows=[", self.n, self.d)?;
        for s in 0..self.n {
            if s > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}", self.row(s))?;
        }
        f.write_str("])")
    }
}

impl fmt::Display for BiregularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Canonical byte encoding: `n`, `d`, then every row index, all as
/// little-endian `u32`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MatrixId(Vec<u8>);

impl MatrixId {
    pub fn of(a: &BiregularMatrix) -> Self {
        let mut bytes = Vec::with_capacity(8 + 4 * a.rows.len());
        bytes.extend_from_slice(&(a.n as u32).to_le_bytes());
        bytes.extend_from_slice(&(a.d as u32).to_le_bytes());
        for &t in &a.rows {
            bytes.extend_from_slice(&t.to_le_bytes());
        }
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_matrix(&self) -> Result<BiregularMatrix> {
        let word = |i: usize| -> Result<u32> {
            self.0
                .get(4 * i..4 * i + 4)
                .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                .ok_or_else(|| Error::InvalidParams("truncated matrix id".into()))
        };
        let n = word(0)? as usize;
        let d = word(1)? as usize;
        check_params(n, d)?;
        if self.0.len() != 8 + 4 * n * d {
            return Err(Error::InvalidParams("matrix id has wrong length".into()));
        }
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|s| (0..d).map(|r| word(2 + s * d + r).map(|t| t as usize)).collect())
            .collect::<Result<_>>()?;
        BiregularMatrix::build(n, d, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_identity() {
        let a = BiregularMatrix::build(3, 1, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(a, BiregularMatrix::identity(3).unwrap());
        assert!(a.entry(0, 0).unwrap());
        assert!(!a.entry(0, 1).unwrap());
    }

    #[test]
    fn build_block_diagonal() {
        let a = BiregularMatrix::build(4, 2, &[vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3]]).unwrap();
        assert_eq!(a, BiregularMatrix::block_diagonal(2, 2).unwrap());
        assert!(!a.entry(0, 3).unwrap());
        assert_eq!(a.col(3), &[2, 3]);
    }

    #[test]
    fn build_errors() {
        let e = BiregularMatrix::build(3, 2, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(e, Error::ColDegree { col: 0, found: 3, .. }), "{e:?}");
        let e = BiregularMatrix::build(2, 1, &[vec![0, 1], vec![1]]).unwrap_err();
        assert!(matches!(e, Error::RowDegree { row: 0, found: 2, expected: 1 }));
        let e = BiregularMatrix::build(2, 1, &[vec![2], vec![1]]).unwrap_err();
        assert!(matches!(e, Error::Index { index: 2, n: 2 }));
        let e = BiregularMatrix::build(2, 2, &[vec![1, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(e, Error::DuplicateIndex { row: 0, index: 1 }));
        assert!(BiregularMatrix::build(2, 3, &[vec![0], vec![1]]).is_err());
        assert!(BiregularMatrix::build(0, 0, &[] as &[Vec<usize>]).is_err());
    }

    #[test]
    fn entry_out_of_range() {
        let a = BiregularMatrix::identity(3).unwrap();
        assert!(matches!(a.entry(3, 0), Err(Error::Index { index: 3, n: 3 })));
    }

    #[test]
    fn circulant_examples() {
        assert_eq!(BiregularMatrix::circulant(3, 1).unwrap(), BiregularMatrix::identity(3).unwrap());
        let ones = BiregularMatrix::circulant(3, 3).unwrap();
        assert!((0..3).all(|s| ones.row(s) == [0, 1, 2]));
        let c = BiregularMatrix::circulant(4, 2).unwrap();
        let expect = BiregularMatrix::build(4, 2, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn circulant_sweep_is_valid() {
        for n in 1..=64 {
            for d in 1..=n {
                let a = BiregularMatrix::circulant(n, d).unwrap();
                let rows: Vec<Vec<usize>> = (0..n).map(|s| a.row(s).iter().map(|&t| t as usize).collect()).collect();
                assert_eq!(BiregularMatrix::build(n, d, &rows).unwrap(), a);
                assert_eq!(a.ones_by_rows(), n * d);
                assert_eq!(a.ones_by_cols(), n * d);
            }
        }
    }

    #[test]
    fn serialize_identity() {
        assert_eq!(BiregularMatrix::identity(2).unwrap().serialize(), "2 1\n0\n1\n");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(BiregularMatrix::parse("2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(BiregularMatrix::parse("2 1\n0\n1"), Err(Error::Parse { .. })));
        assert!(matches!(BiregularMatrix::parse("2 1\n0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(BiregularMatrix::parse("2 1\n0\n1\n1\n"), Err(Error::Parse { .. })));
        assert!(matches!(BiregularMatrix::parse("2 1\n0\nx\n"), Err(Error::Parse { line: 3, pos: 1, .. })));
        assert!(matches!(BiregularMatrix::parse("2 2\n1 0\n0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(BiregularMatrix::parse("2 1\n0\n0\n"), Err(Error::ColDegree { .. })));
    }

    #[test]
    fn id_roundtrip() {
        let a = BiregularMatrix::circulant(7, 3).unwrap();
        assert_eq!(a.id().to_matrix().unwrap(), a);
        assert_ne!(a.id(), BiregularMatrix::circulant(7, 2).unwrap().id());
    }
}
