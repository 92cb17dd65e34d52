//! Sparse LDGM generator whose rows span the null space of `H1 = (I O B)`.
//!
//! Row `j` is `(p_j, m_j1, m_j2)`: `m_j2` has weight `zeta`, `p_j = B m_j2`,
//! and `m_j1` pads the row toward a Poisson-distributed target weight. Rows
//! with light parity parts receive the small targets. For even `zeta`, row 0
//! carries `zeta - 1` ones in `m_j2` instead, since even-weight parts cannot
//! span the whole block.

use std::ops::Range;

use rand::seq::index::sample;
use rand::Rng as _;

use super::{BuildError, CodeParams};
use crate::degree::{poisson_counts, PoissonWeightSpec};
use crate::gf2::{BitMatrix, IncrementalBasis};
use crate::seed::{self, Rng};

const M1_REDRAWS: usize = 50;
const M2_REDRAWS: usize = 50;
const WEIGHT_REDRAWS: usize = 1000;

/// Column blocks of a parity-check matrix in `(I O B)` form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicLayout {
    pub parity: Range<usize>,
    pub m1: Range<usize>,
    pub m2: Range<usize>,
}

impl SystematicLayout {
    /// Reads the layout off `h1`, rejecting matrices not in `(I O B)` form.
    pub fn of(h1: &BitMatrix) -> Result<SystematicLayout, BuildError> {
        let (t, n) = h1.shape();
        let b_start = n - n / 2;
        if t > b_start {
            return Err(BuildError::NotSystematic(format!(
                "{t} rows do not fit before the B block at column {b_start}"
            )));
        }
        for i in 0..t {
            let row = h1.row(i);
            let head: Vec<usize> = row.iter().copied().take_while(|&c| c < b_start).collect();
            if head != [i] {
                return Err(BuildError::NotSystematic(format!(
                    "row {i} has ones {head:?} left of column {b_start}, expected exactly [{i}]"
                )));
            }
        }
        Ok(SystematicLayout {
            parity: 0..t,
            m1: t..b_start,
            m2: b_start..n,
        })
    }

    /// Dimension of the null space, `n - t`.
    pub fn info_len(&self) -> usize {
        self.m1.len() + self.m2.len()
    }
}

/// Counters from one generator design.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct GeneratorStats {
    /// Rank certified by incremental elimination.
    pub rank: usize,
    pub m1_redraws: usize,
    pub m2_redraws: usize,
    pub weight_redraws: usize,
    /// `max_l w(b_l)` over the columns of `B`.
    pub max_b_weight: usize,
}

struct Draw {
    m2: Vec<usize>,
    parity: Vec<usize>,
}

/// `amount` distinct positions below `len`, containing `forced` if given.
fn positions(rng: &mut Rng, len: usize, amount: usize, forced: Option<usize>) -> Vec<usize> {
    let mut out = sample(rng, len, amount).into_vec();
    if let Some(q) = forced {
        if amount > 0 && !out.contains(&q) {
            let k = rng.gen_range(0..amount);
            out[k] = q;
        }
    }
    out.sort_unstable();
    out
}

/// A random coordinate in `range` that no basis vector pivots on.
fn free_coordinate(basis: &IncrementalBasis, range: Range<usize>, rng: &mut Rng) -> Option<usize> {
    let free: Vec<usize> = range.filter(|&q| !basis.is_pivot(q)).collect();
    (!free.is_empty()).then(|| free[rng.gen_range(0..free.len())])
}

fn draw_m2(
    b_cols: &[Vec<usize>],
    zeta: usize,
    i_max: usize,
    forced: Option<usize>,
    rng: &mut Rng,
    redraws: &mut usize,
) -> Result<Draw, BuildError> {
    for _ in 0..WEIGHT_REDRAWS {
        let m2 = positions(rng, b_cols.len(), zeta, forced);
        let mut parity: Vec<usize> = Vec::new();
        for &c in &m2 {
            parity = sym_diff(&parity, &b_cols[c]);
        }
        if parity.len() + zeta <= i_max {
            return Ok(Draw { m2, parity });
        }
        *redraws += 1;
    }
    Err(BuildError::WeightBudget(format!(
        "no weight-{zeta} m2 part found with w(p) + zeta <= {i_max} in {WEIGHT_REDRAWS} draws"
    )))
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `(m - k1) x n` generator with every row in the null space of `h1`.
pub fn design_poisson_generator(
    h1: &BitMatrix,
    params: &CodeParams,
    seed: u64,
) -> Result<BitMatrix, BuildError> {
    design_with_stats(h1, params, seed).map(|(g, _)| g)
}

pub(crate) fn design_with_stats(
    h1: &BitMatrix,
    params: &CodeParams,
    seed: u64,
) -> Result<(BitMatrix, GeneratorStats), BuildError> {
    let layout = SystematicLayout::of(h1)?;
    let n = h1.cols();
    let k = layout.info_len();
    if n != params.n || k + params.k1 != params.m {
        return Err(BuildError::Shape(format!(
            "H1 is {}x{n}, parameters need {}x{}",
            h1.rows(),
            params.h1_rows(),
            params.n
        )));
    }
    let zeta = params.zeta;
    if zeta == 0 || zeta > layout.m2.len() {
        return Err(BuildError::WeightBudget(format!(
            "zeta must lie in 1..={}, got {zeta}",
            layout.m2.len()
        )));
    }
    let profile = poisson_counts(&PoissonWeightSpec {
        lambda_p: params.poisson_lambda,
        i_max: params.i_max,
        count: k,
    })?;
    let columns = h1.column_supports();
    let b_cols: Vec<Vec<usize>> = layout.m2.clone().map(|c| columns[c].clone()).collect();
    let mut stats = GeneratorStats {
        max_b_weight: b_cols.iter().map(Vec::len).max().unwrap_or(0),
        ..GeneratorStats::default()
    };
    let mut rng = seed::stream(seed, 0);

    let zeta_of = |j: usize| if zeta.is_multiple_of(2) && j == 0 { zeta - 1 } else { zeta };
    let mut draws = Vec::with_capacity(k);
    for j in 0..k {
        draws.push(draw_m2(&b_cols, zeta_of(j), params.i_max, None, &mut rng, &mut stats.weight_redraws)?);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&j| (draws[j].parity.len(), j));
    let mut target = vec![0; k];
    for (rank, &j) in order.iter().enumerate() {
        target[j] = profile.sequence[rank];
    }

    let m1_len = layout.m1.len();
    let mut basis = IncrementalBasis::new(k);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut coords = Vec::new();
    for &j in &order {
        let mut accepted = None;
        // Retries steer through a coordinate no accepted row pivots on.
        'm2: for attempt in 0..=M2_REDRAWS {
            let steer = if attempt > 0 {
                free_coordinate(&basis, 0..k, &mut rng)
            } else {
                None
            };
            if attempt > 0 {
                stats.m2_redraws += 1;
                let forced = steer.filter(|&q| q >= m1_len).map(|q| q - m1_len);
                draws[j] = draw_m2(&b_cols, zeta_of(j), params.i_max, forced, &mut rng, &mut stats.weight_redraws)?;
            }
            let d = &draws[j];
            let base = d.parity.len() + d.m2.len();
            let mut w1 = target[j].saturating_sub(base).min(m1_len);
            let m1_steer = steer.filter(|&q| q < m1_len);
            if m1_steer.is_some() && w1 == 0 && base < params.i_max {
                w1 = 1;
            }
            let tries = if w1 == 0 { 1 } else { M1_REDRAWS };
            for attempt1 in 0..tries {
                let forced = if attempt1 > 0 {
                    stats.m1_redraws += 1;
                    free_coordinate(&basis, 0..m1_len, &mut rng)
                } else {
                    m1_steer
                };
                let m1 = positions(&mut rng, m1_len, w1, forced);
                coords.clear();
                coords.extend(m1.iter().copied());
                coords.extend(d.m2.iter().map(|&c| m1_len + c));
                if basis.insert(&coords) {
                    accepted = Some(m1);
                    break 'm2;
                }
            }
        }
        let Some(m1) = accepted else {
            return Err(BuildError::GeneratorRank {
                achieved: basis.rank(),
                needed: k,
            });
        };
        let d = &draws[j];
        let mut row = d.parity.clone();
        row.extend(m1.iter().map(|&c| layout.m1.start + c));
        row.extend(d.m2.iter().map(|&c| layout.m2.start + c));
        rows[j] = row;
    }
    stats.rank = basis.rank();
    Ok((BitMatrix::new(k, n, rows)?, stats))
}
