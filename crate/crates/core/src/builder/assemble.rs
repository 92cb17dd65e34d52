use super::{BuildError, CodeParams};
use crate::gf2::BitMatrix;

/// The three parity-check matrices of a compound code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundParity {
    pub h: BitMatrix,
    pub h1: BitMatrix,
    pub h2: BitMatrix,
}

/// `H = [[I, A0], [A0, I]]` from the half matrix `A`, with `A0` equal to `A`
/// minus its diagonal and `I` the rectangular identity of `A`'s shape. `H1`
/// takes the first `n - m + k1` rows and `H2` the remaining `k2`.
pub fn assemble_compound(a: &BitMatrix, params: &CodeParams) -> Result<CompoundParity, BuildError> {
    let (r, c) = params.half_shape()?;
    if a.shape() != (r, c) {
        return Err(BuildError::Shape(format!(
            "half matrix is {}x{}, parameters need {r}x{c}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_all_one_diagonal() {
        return Err(BuildError::NotDiagonalizable(
            "half matrix has a zero on its main diagonal".into(),
        ));
    }
    let t = params.h1_rows();
    if t > params.k2 {
        return Err(BuildError::Shape(format!(
            "split condition n-m+k1 <= k2 fails: {t} > {}",
            params.k2
        )));
    }
    let mut support = Vec::with_capacity(2 * r);
    for i in 0..r {
        let mut row = Vec::with_capacity(a.row(i).len());
        if i < c {
            row.push(i);
        }
        row.extend(a.row(i).iter().filter(|&&j| j != i).map(|&j| c + j));
        support.push(row);
    }
    for i in 0..r {
        let mut row: Vec<usize> = a.row(i).iter().copied().filter(|&j| j != i).collect();
        if i < c {
            row.push(c + i);
        }
        support.push(row);
    }
    let h = BitMatrix::new(2 * r, 2 * c, support)?;
    let h1 = h.select_rows(0, t)?;
    let h2 = h.select_rows(t, 2 * r)?;
    Ok(CompoundParity { h, h1, h2 })
}
