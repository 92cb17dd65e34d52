use super::dense::PackedRows;
use super::{BitVector, Gf2Error};

/// Sparse binary matrix over GF(2); each row keeps the sorted column indices of
/// its ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
}

/// Column permutation returned by [`BitMatrix::systematic_form`]:
/// `perm[j]` is the original column placed at position `j`.
pub type ColumnPermutation = Vec<usize>;

impl BitMatrix {
    pub fn new(rows: usize, cols: usize, row_support: Vec<Vec<usize>>) -> Result<Self, Gf2Error> {
        if rows == 0 || cols == 0 {
            return Err(Gf2Error::EmptyShape { rows, cols });
        }
        if row_support.len() != rows {
            return Err(Gf2Error::LengthMismatch {
                expected: rows,
                found: row_support.len(),
            });
        }
        let mut out = Vec::with_capacity(rows);
        for support in row_support {
            let v = BitVector::from_support(cols, support)?;
            out.push(v.support().to_vec());
        }
        Ok(BitMatrix {
            rows,
            cols,
            row_support: out,
        })
    }

    pub(crate) fn from_sorted_unchecked(rows: usize, cols: usize, row_support: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(row_support.len(), rows);
        debug_assert!(row_support
            .iter()
            .all(|r| r.windows(2).all(|w| w[0] < w[1]) && r.last().is_none_or(|&c| c < cols)));
        BitMatrix {
            rows,
            cols,
            row_support,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, Gf2Error> {
        BitMatrix::new(rows, cols, vec![Vec::new(); rows])
    }

    pub fn identity(size: usize) -> Result<Self, Gf2Error> {
        BitMatrix::rect_identity(size, size)
    }

    /// `rows x cols` matrix with ones exactly on the main diagonal.
    pub fn rect_identity(rows: usize, cols: usize) -> Result<Self, Gf2Error> {
        let support = (0..rows)
            .map(|i| if i < cols { vec![i] } else { Vec::new() })
            .collect();
        BitMatrix::new(rows, cols, support)
    }

    /// Builds from dense 0/1 rows; every row must have the same length.
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut support = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Gf2Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            support.push(BitVector::from_bits(r).support().to_vec());
        }
        BitMatrix::new(rows.len(), cols, support)
    }

    pub fn from_vectors(vectors: &[BitVector]) -> Result<Self, Gf2Error> {
        let cols = vectors.first().map_or(0, BitVector::len);
        if let Some(v) = vectors.iter().find(|v| v.len() != cols) {
            return Err(Gf2Error::LengthMismatch {
                expected: cols,
                found: v.len(),
            });
        }
        BitMatrix::new(
            vectors.len(),
            cols,
            vectors.iter().map(|v| v.support().to_vec()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_support[i]
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector::from_sorted_unchecked(self.cols, self.row_support[i].clone())
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_support
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row_support[i].binary_search(&j).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_support.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in &self.row_support {
            for &c in r {
                w[c] += 1;
            }
        }
        w
    }

    /// Row indices holding a one in each column.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (i, r) in self.row_support.iter().enumerate() {
            for &c in r {
                cols[c].push(i);
            }
        }
        cols
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.row_support
            .iter()
            .map(|r| {
                let mut row = vec![0u8; self.cols];
                for &c in r {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_sorted_unchecked(self.cols, self.rows, self.column_supports())
    }

    /// Rows `start..end` as a new matrix.
    pub fn select_rows(&self, start: usize, end: usize) -> Result<BitMatrix, Gf2Error> {
        if start >= end || end > self.rows {
            return Err(Gf2Error::EmptyShape {
                rows: end.saturating_sub(start),
                cols: self.cols,
            });
        }
        Ok(BitMatrix::from_sorted_unchecked(
            end - start,
            self.cols,
            self.row_support[start..end].to_vec(),
        ))
    }

    /// Columns `start..end`, re-indexed from zero.
    pub fn select_cols(&self, start: usize, end: usize) -> Result<BitMatrix, Gf2Error> {
        if start >= end || end > self.cols {
            return Err(Gf2Error::EmptyShape {
                rows: self.rows,
                cols: end.saturating_sub(start),
            });
        }
        let support = self
            .row_support
            .iter()
            .map(|r| {
                r.iter()
                    .copied()
                    .filter(|&c| c >= start && c < end)
                    .map(|c| c - start)
                    .collect()
            })
            .collect();
        Ok(BitMatrix::from_sorted_unchecked(self.rows, end - start, support))
    }

    /// `self` on top of `below`.
    pub fn stack(&self, below: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != below.cols {
            return Err(self.shape_error(below));
        }
        let mut support = self.row_support.clone();
        support.extend(below.row_support.iter().cloned());
        Ok(BitMatrix::from_sorted_unchecked(
            self.rows + below.rows,
            self.cols,
            support,
        ))
    }

    fn shape_error(&self, other: &BitMatrix) -> Gf2Error {
        Gf2Error::ShapeMismatch {
            left: self.shape(),
            right: other.shape(),
        }
    }

    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(self.shape_error(other));
        }
        let mut acc = vec![false; other.cols];
        let mut touched = Vec::new();
        let mut out = Vec::with_capacity(self.rows);
        for r in &self.row_support {
            for &k in r {
                for &c in &other.row_support[k] {
                    if !acc[c] {
                        touched.push(c);
                    }
                    acc[c] = !acc[c];
                }
            }
            let mut row: Vec<usize> = touched.iter().copied().filter(|&c| acc[c]).collect();
            row.sort_unstable();
            row.dedup();
            for &c in &touched {
                acc[c] = false;
            }
            touched.clear();
            out.push(row);
        }
        Ok(BitMatrix::from_sorted_unchecked(self.rows, other.cols, out))
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self.mul_bits(&v.to_bits()))
    }

    /// Product with a dense 0/1 vector; the caller guarantees the length.
    pub(crate) fn mul_bits(&self, bits: &[u8]) -> BitVector {
        debug_assert_eq!(bits.len(), self.cols);
        let support = self
            .row_support
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().fold(0u8, |a, &c| a ^ bits[c]) == 1)
            .map(|(i, _)| i)
            .collect();
        BitVector::from_sorted_unchecked(self.rows, support)
    }

    /// Row vector times matrix: XOR of the rows selected by `u`.
    pub fn left_mul(&self, u: &BitVector) -> Result<BitVector, Gf2Error> {
        if u.len() != self.rows {
            return Err(Gf2Error::LengthMismatch {
                expected: self.rows,
                found: u.len(),
            });
        }
        let mut bits = vec![0u8; self.cols];
        for &i in u.support() {
            for &c in &self.row_support[i] {
                bits[c] ^= 1;
            }
        }
        Ok(BitVector::from_bits(&bits))
    }

    pub(crate) fn to_packed(&self) -> PackedRows {
        let mut p = PackedRows::zeros(self.rows, self.cols);
        for (i, r) in self.row_support.iter().enumerate() {
            for &c in r {
                p.set(i, c);
            }
        }
        p
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        // Eliminate along the shorter dimension.
        let mut packed = if self.rows <= self.cols {
            self.to_packed()
        } else {
            self.transpose().to_packed()
        };
        packed.eliminate(false).len()
    }

    /// Columns chosen as pivots by left-to-right, top-down elimination.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.to_packed().eliminate(false)
    }

    /// Reduced row-echelon form with pivot columns moved to the front, so the
    /// leading `rows x rows` block is the identity. The row space of the
    /// result equals that of `permute(self, id, perm)`.
    pub fn systematic_form(&self) -> Result<(BitMatrix, ColumnPermutation), Gf2Error> {
        let mut packed = self.to_packed();
        let pivots = packed.eliminate(true);
        if pivots.len() < self.rows {
            return Err(Gf2Error::RankDeficient {
                rank: pivots.len(),
                rows: self.rows,
            });
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut perm: Vec<usize> = pivots.clone();
        perm.extend((0..self.cols).filter(|&c| !is_pivot[c]));
        let reduced = BitMatrix::from_sorted_unchecked(
            self.rows,
            self.cols,
            (0..self.rows).map(|i| packed.row_support(i)).collect(),
        );
        let identity: Vec<usize> = (0..self.rows).collect();
        let sys = reduced.permute(&identity, &perm)?;
        Ok((sys, perm))
    }

    /// Basis of `{v : self * v^T = 0}`, one vector per free column. Empty when
    /// the null space is trivial.
    pub fn null_space_basis(&self) -> Vec<BitVector> {
        let mut packed = self.to_packed();
        let pivots = packed.eliminate(true);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut support: Vec<usize> = pivots
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| packed.get(r, f))
                    .map(|(_, &c)| c)
                    .collect();
                support.push(f);
                support.sort_unstable();
                BitVector::from_sorted_unchecked(self.cols, support)
            })
            .collect()
    }

    /// One solution of `self * v^T = z`, or `None` when `z` is outside the
    /// column space.
    pub fn solve(&self, z: &BitVector) -> Result<Option<BitVector>, Gf2Error> {
        if z.len() != self.rows {
            return Err(Gf2Error::LengthMismatch {
                expected: self.rows,
                found: z.len(),
            });
        }
        // Augment with z as an extra column.
        let mut packed = PackedRows::zeros(self.rows, self.cols + 1);
        for (i, r) in self.row_support.iter().enumerate() {
            for &c in r {
                packed.set(i, c);
            }
        }
        for &i in z.support() {
            packed.set(i, self.cols);
        }
        let pivots = packed.eliminate(true);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let support: Vec<usize> = pivots
            .iter()
            .enumerate()
            .filter(|&(r, _)| packed.get(r, self.cols))
            .map(|(_, &c)| c)
            .collect();
        let mut support = support;
        support.sort_unstable();
        Ok(Some(BitVector::from_sorted_unchecked(self.cols, support)))
    }

    /// Entry `(i, j)` of the result is entry `(row_perm[i], col_perm[j])` of
    /// `self`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<BitMatrix, Gf2Error> {
        check_permutation(row_perm, self.rows)?;
        let inv_col = inverse_permutation(col_perm, self.cols)?;
        let support = row_perm
            .iter()
            .map(|&src| {
                let mut r: Vec<usize> = self.row_support[src].iter().map(|&c| inv_col[c]).collect();
                r.sort_unstable();
                r
            })
            .collect();
        Ok(BitMatrix::from_sorted_unchecked(self.rows, self.cols, support))
    }

    /// Whether every `(i, i)` entry with `i < min(rows, cols)` is one.
    pub fn is_all_one_diagonal(&self) -> bool {
        (0..self.rows.min(self.cols)).all(|i| self.get(i, i))
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<(), Gf2Error> {
    inverse_permutation(perm, len).map(|_| ())
}

/// Inverse of a permutation of `0..len`, validating bijectivity.
pub fn inverse_permutation(perm: &[usize], len: usize) -> Result<Vec<usize>, Gf2Error> {
    if perm.len() != len {
        return Err(Gf2Error::NotAPermutation { len });
    }
    let mut inv = vec![usize::MAX; len];
    for (i, &p) in perm.iter().enumerate() {
        if p >= len || inv[p] != usize::MAX {
            return Err(Gf2Error::NotAPermutation { len });
        }
        inv[p] = i;
    }
    Ok(inv)
}
