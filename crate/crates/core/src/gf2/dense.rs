//! Word-packed dense rows for elimination-heavy work.

/// Row-major bit matrix, 64 columns per word.
#[derive(Debug, Clone)]
pub(crate) struct PackedRows {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl PackedRows {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        PackedRows {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * w);
        head[lo * w..(lo + 1) * w].swap_with_slice(&mut tail[..w]);
    }

    /// `dst ^= src`, touching only words from `from_word` on.
    #[inline]
    pub fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        debug_assert_ne!(src, dst);
        let w = self.words;
        let (s, d) = (src * w, dst * w);
        if s < d {
            let (head, tail) = self.data.split_at_mut(d);
            xor_words(&mut tail[from_word..w], &head[s + from_word..s + w]);
        } else {
            let (head, tail) = self.data.split_at_mut(s);
            xor_words(&mut head[d + from_word..d + w], &tail[from_word..w]);
        }
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &word) in self.row(r).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Reduces to echelon form in place. Columns are scanned left to right and
    /// the pivot for a column is the topmost remaining row holding a one.
    /// With `full` set, pivot columns are also cleared above the pivot.
    /// Returns the pivot column of each leading row.
    pub fn eliminate(&mut self, full: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            let from = c / 64;
            let start = if full { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i, from);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

#[inline]
pub(crate) fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Incrementally maintained GF(2) basis over a fixed number of coordinates.
/// Each stored vector has a distinct lowest set bit (its pivot).
#[derive(Debug, Clone)]
pub(crate) struct IncrementalBasis {
    dim: usize,
    words: usize,
    rows: Vec<u64>,
    pivot_row: Vec<u32>,
    scratch: Vec<u64>,
}

const NO_PIVOT: u32 = u32::MAX;

impl IncrementalBasis {
    pub fn new(dim: usize) -> Self {
        let words = dim.div_ceil(64);
        IncrementalBasis {
            dim,
            words,
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; dim],
            scratch: vec![0; words],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len() / self.words.max(1)
    }

    /// Whether some stored vector has its lowest set bit at `i`.
    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_row[i] != NO_PIVOT
    }

    /// Tries to add the vector with ones at `support`; returns whether it was
    /// independent of what the basis already spans.
    pub fn insert(&mut self, support: &[usize]) -> bool {
        if self.words == 0 {
            return false;
        }
        let w = self.words;
        self.scratch.iter_mut().for_each(|x| *x = 0);
        for &i in support {
            debug_assert!(i < self.dim);
            self.scratch[i / 64] ^= 1 << (i % 64);
        }
        let mut wi = 0;
        while wi < w {
            let word = self.scratch[wi];
            if word == 0 {
                wi += 1;
                continue;
            }
            let bit = wi * 64 + word.trailing_zeros() as usize;
            let row = self.pivot_row[bit];
            if row == NO_PIVOT {
                let idx = self.rows.len() / w;
                self.rows.extend_from_slice(&self.scratch);
                self.pivot_row[bit] = idx as u32;
                return true;
            }
            let base = row as usize * w;
            xor_words(&mut self.scratch[wi..], &self.rows[base + wi..base + w]);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_of_small_matrix() {
        let mut m = PackedRows::zeros(3, 3);
        for (r, c) in [(0, 1), (1, 0), (1, 1), (2, 0)] {
            m.set(r, c);
        }
        let piv = m.eliminate(true);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(m.row_support(0), vec![0]);
        assert_eq!(m.row_support(1), vec![1]);
        assert!(m.row_support(2).is_empty());
    }

    #[test]
    fn incremental_basis_detects_dependence() {
        let mut b = IncrementalBasis::new(130);
        assert!(b.insert(&[0, 70, 129]));
        assert!(b.insert(&[70]));
        assert!(!b.insert(&[0, 129]));
        assert!(b.insert(&[129]));
        assert!(!b.insert(&[]));
        assert_eq!(b.rank(), 3);
    }
}
