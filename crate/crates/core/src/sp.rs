//! Syndrome-adapted sum-product decoding and exact coset search.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

const LLR_CLIP: f64 = 30.0;
/// Largest coset dimension the exact search accepts.
pub const COSET_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("crossover {0} outside (0, 0.5)")]
    Crossover(f64),
    #[error("syndrome is not reachable by the parity-check matrix")]
    EmptyCoset,
    #[error("coset dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpParams {
    pub max_iter: usize,
    /// Crossover probability of the channel from the coset word to the side
    /// information.
    pub crossover: f64,
}

impl SpParams {
    pub fn new(crossover: f64) -> SpParams {
        SpParams {
            max_iter: 100,
            crossover,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpOutcome {
    pub s_hat: BitVector,
    pub converged: bool,
    pub iters: usize,
}

/// Tanner graph of a parity-check matrix, reusable across decodes.
#[derive(Debug, Clone)]
pub struct SpGraph {
    rows: usize,
    cols: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
}

impl SpGraph {
    pub fn new(h: &BitMatrix) -> SpGraph {
        let (rows, cols) = h.shape();
        let mut check_ptr = Vec::with_capacity(rows + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        check_ptr.push(0);
        for r in 0..rows {
            edge_var.extend(h.row(r).iter().map(|&c| c as u32));
            check_ptr.push(edge_var.len());
        }
        let mut var_ptr = vec![0usize; cols + 1];
        for &v in &edge_var {
            var_ptr[v as usize + 1] += 1;
        }
        for v in 0..cols {
            var_ptr[v + 1] += var_ptr[v];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        SpGraph {
            rows,
            cols,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
        }
    }

    fn syndrome_matches(&self, bits: &[bool], z: &[bool]) -> bool {
        (0..self.rows).all(|c| {
            let parity = self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
                .iter()
                .fold(false, |acc, &v| acc ^ bits[v as usize]);
            parity == z[c]
        })
    }
}

pub fn sp_decode(
    h: &BitMatrix,
    z: &BitVector,
    j: &BitVector,
    params: &SpParams,
) -> Result<SpOutcome, SpError> {
    sp_decode_on(&SpGraph::new(h), z, j, params)
}

/// Decoding with a prebuilt graph.
pub fn sp_decode_on(
    graph: &SpGraph,
    z: &BitVector,
    j: &BitVector,
    params: &SpParams,
) -> Result<SpOutcome, SpError> {
    if z.len() != graph.rows {
        return Err(SpError::Dimension(format!(
            "syndrome has {} bits, H has {} rows",
            z.len(),
            graph.rows
        )));
    }
    if j.len() != graph.cols {
        return Err(SpError::Dimension(format!(
            "side information has {} bits, H has {} columns",
            j.len(),
            graph.cols
        )));
    }
    let q = params.crossover;
    if !(q > 0.0 && q < 0.5) {
        return Err(SpError::Crossover(q));
    }
    let z_bits: Vec<bool> = (0..graph.rows).map(|c| z.get(c)).collect();
    let strength = ((1.0 - q) / q).ln();
    let channel: Vec<f64> = (0..graph.cols)
        .map(|v| if j.get(v) { -strength } else { strength })
        .collect();
    let mut hard: Vec<bool> = (0..graph.cols).map(|v| j.get(v)).collect();
    if graph.syndrome_matches(&hard, &z_bits) {
        return Ok(outcome(hard, true, 0));
    }

    let edges = graph.edge_var.len();
    let mut to_check: Vec<f64> = graph.edge_var.iter().map(|&v| channel[v as usize]).collect();
    let mut to_var = vec![0.0f64; edges];
    let mut prefix = Vec::new();
    for it in 1..=params.max_iter {
        for c in 0..graph.rows {
            let (lo, hi) = (graph.check_ptr[c], graph.check_ptr[c + 1]);
            prefix.clear();
            let mut acc = if z_bits[c] { -1.0 } else { 1.0 };
            for &m in &to_check[lo..hi] {
                prefix.push(acc);
                acc *= (0.5 * m).tanh();
            }
            let mut suffix = 1.0;
            for e in (lo..hi).rev() {
                let prod = prefix[e - lo] * suffix;
                to_var[e] = (2.0 * prod.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                suffix *= (0.5 * to_check[e]).tanh();
            }
        }
        for v in 0..graph.cols {
            let incoming = &graph.var_edges[graph.var_ptr[v]..graph.var_ptr[v + 1]];
            let total = channel[v] + incoming.iter().map(|&e| to_var[e as usize]).sum::<f64>();
            for &e in incoming {
                let e = e as usize;
                to_check[e] = (total - to_var[e]).clamp(-LLR_CLIP, LLR_CLIP);
            }
            hard[v] = total < 0.0;
        }
        if graph.syndrome_matches(&hard, &z_bits) {
            return Ok(outcome(hard, true, it));
        }
    }
    Ok(outcome(hard, false, params.max_iter))
}

fn outcome(bits: Vec<bool>, converged: bool, iters: usize) -> SpOutcome {
    SpOutcome {
        s_hat: BitVector::from_bools(&bits),
        converged,
        iters,
    }
}

/// A particular solution of `H v = z` and a basis of the null space.
fn coset_frame(h: &BitMatrix, z: &BitVector) -> Result<(BitVector, Vec<BitVector>), SpError> {
    if z.len() != h.rows() {
        return Err(SpError::Dimension(format!(
            "syndrome has {} bits, H has {} rows",
            z.len(),
            h.rows()
        )));
    }
    let base = h
        .solve(z)
        .map_err(|e| SpError::Dimension(e.to_string()))?
        .ok_or(SpError::EmptyCoset)?;
    let basis = h.null_space_basis();
    if basis.len() > COSET_CAP {
        return Err(SpError::TooLarge {
            dim: basis.len(),
            cap: COSET_CAP,
        });
    }
    Ok((base, basis))
}

fn pack(v: &BitVector, words: usize) -> Vec<u64> {
    let mut w = vec![0u64; words];
    for &i in v.support() {
        w[i / 64] |= 1 << (i % 64);
    }
    w
}

fn unpack(w: &[u64], len: usize) -> BitVector {
    let bits: Vec<bool> = (0..len).map(|i| w[i / 64] >> (i % 64) & 1 == 1).collect();
    BitVector::from_bools(&bits)
}

/// Whether `a` precedes `b` when read from index 0.
fn lex_less(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            return x & (diff & diff.wrapping_neg()) == 0;
        }
    }
    false
}

/// Every word with syndrome `z`, in Gray-code order.
pub fn coset_members(h: &BitMatrix, z: &BitVector) -> Result<Vec<BitVector>, SpError> {
    let (base, basis) = coset_frame(h, z)?;
    let n = h.cols();
    let words = n.div_ceil(64);
    let basis: Vec<Vec<u64>> = basis.iter().map(|b| pack(b, words)).collect();
    let mut cur = pack(&base, words);
    let mut out = vec![unpack(&cur, n)];
    for step in 1u64..(1u64 << basis.len()) {
        let r = step.trailing_zeros() as usize;
        cur.iter_mut().zip(&basis[r]).for_each(|(c, b)| *c ^= b);
        out.push(unpack(&cur, n));
    }
    Ok(out)
}

/// Exact nearest word to `j` with syndrome `z`; ties go to the
/// lexicographically smallest word.
pub fn coset_nearest(h: &BitMatrix, z: &BitVector, j: &BitVector) -> Result<BitVector, SpError> {
    if j.len() != h.cols() {
        return Err(SpError::Dimension(format!(
            "side information has {} bits, H has {} columns",
            j.len(),
            h.cols()
        )));
    }
    let (base, basis) = coset_frame(h, z)?;
    let n = h.cols();
    let words = n.div_ceil(64);
    let basis: Vec<Vec<u64>> = basis.iter().map(|b| pack(b, words)).collect();
    let target = pack(j, words);
    let dist = |x: &[u64]| -> u32 { x.iter().zip(&target).map(|(a, b)| (a ^ b).count_ones()).sum() };
    let mut cur = pack(&base, words);
    let mut best = cur.clone();
    let mut best_d = dist(&cur);
    for step in 1u64..(1u64 << basis.len()) {
        let r = step.trailing_zeros() as usize;
        cur.iter_mut().zip(&basis[r]).for_each(|(c, b)| *c ^= b);
        let d = dist(&cur);
        if d < best_d || (d == best_d && lex_less(&cur, &best)) {
            best_d = d;
            best.copy_from_slice(&cur);
        }
    }
    Ok(unpack(&best, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::seed;
    use rand::Rng;

    fn random_vector(len: usize, rng: &mut seed::Rng) -> BitVector {
        let bits: Vec<u8> = (0..len).map(|_| u8::from(rng.gen_bool(0.5))).collect();
        BitVector::from_bits(&bits)
    }

    /// Column weight 3 over `rows` checks.
    fn random_h(rows: usize, cols: usize, rng: &mut seed::Rng) -> BitMatrix {
        let mut support = vec![Vec::new(); rows];
        for c in 0..cols {
            for r in rand::seq::index::sample(rng, rows, 3).into_vec() {
                support[r].push(c);
            }
        }
        BitMatrix::new(rows, cols, support).unwrap()
    }

    /// Independent oracle over the whole space.
    fn scan(h: &BitMatrix, z: &BitVector, j: &BitVector) -> Option<(Vec<u8>, usize)> {
        let n = h.cols();
        let jb = j.to_bits();
        let mut best: Option<(Vec<u8>, usize)> = None;
        for code in 0..(1u32 << n) {
            let v: Vec<u8> = (0..n).map(|i| ((code >> (n - 1 - i)) & 1) as u8).collect();
            let vv = BitVector::from_bits(&v);
            if h.mul_vec(&vv).unwrap() != *z {
                continue;
            }
            let d = v.iter().zip(&jb).filter(|(a, b)| a != b).count();
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((v, d));
            }
        }
        best
    }

    #[test]
    fn codeword_side_information_converges_immediately() {
        let h = fixtures::systematic_parity_check();
        let z = BitVector::zeros(h.rows());
        let cw = h.null_space_basis()[0].clone();
        let out = sp_decode(&h, &z, &cw, &SpParams::new(0.1)).unwrap();
        assert_eq!(out.s_hat, cw);
        assert!(out.converged);
        assert_eq!(out.iters, 0);
    }

    #[test]
    fn example_decodes_to_the_quantized_word() {
        let out = sp_decode(
            &fixtures::systematic_parity_check(),
            &fixtures::expected_total_syndrome(),
            &fixtures::side_information(),
            &SpParams::new(0.25),
        )
        .unwrap();
        assert!(out.converged);
        assert_eq!(out.s_hat, fixtures::expected_codeword());
    }

    #[test]
    fn example_coset() {
        let h = fixtures::systematic_parity_check();
        let z = fixtures::expected_total_syndrome();
        let mut members = coset_members(&h, &z).unwrap();
        members.sort_by_key(|v| v.to_bits());
        let mut expected = fixtures::expected_coset().to_vec();
        expected.sort_by_key(|v| v.to_bits());
        assert_eq!(members, expected);
        let nearest = coset_nearest(&h, &z, &fixtures::side_information()).unwrap();
        assert_eq!(nearest, fixtures::expected_codeword());
        assert_eq!(nearest.hamming_distance(&fixtures::side_information()).unwrap(), 3);
    }

    #[test]
    fn coset_nearest_matches_full_scan() {
        let mut rng = seed::rng(12);
        let mut checked = 0;
        while checked < 40 {
            let dense: Vec<Vec<u8>> = (0..4)
                .map(|_| (0..10).map(|_| u8::from(rng.gen_bool(0.4))).collect())
                .collect();
            let h = BitMatrix::from_dense(&dense).unwrap();
            let z = h.mul_vec(&random_vector(10, &mut rng)).unwrap();
            let j = random_vector(10, &mut rng);
            let (v, d) = scan(&h, &z, &j).unwrap();
            let got = coset_nearest(&h, &z, &j).unwrap();
            assert_eq!(got.to_bits(), v);
            assert_eq!(got.hamming_distance(&j).unwrap(), d);
            checked += 1;
        }
    }

    #[test]
    fn coset_errors() {
        let h = BitMatrix::from_dense(&[[1u8, 1, 0], [1, 1, 0]]).unwrap();
        let z = BitVector::from_bits(&[1, 0]);
        assert_eq!(coset_nearest(&h, &z, &BitVector::zeros(3)), Err(SpError::EmptyCoset));
        let wide = BitMatrix::zeros(1, 30).unwrap();
        assert!(matches!(
            coset_nearest(&wide, &BitVector::zeros(1), &BitVector::zeros(30)),
            Err(SpError::TooLarge { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        let h = fixtures::systematic_parity_check();
        let z = fixtures::expected_total_syndrome();
        let j = fixtures::side_information();
        assert!(matches!(sp_decode(&h, &z, &j, &SpParams::new(0.5)), Err(SpError::Crossover(_))));
        assert!(matches!(sp_decode(&h, &z, &j, &SpParams::new(0.0)), Err(SpError::Crossover(_))));
        assert!(matches!(
            sp_decode(&h, &BitVector::zeros(3), &j, &SpParams::new(0.1)),
            Err(SpError::Dimension(_))
        ));
        assert!(matches!(
            sp_decode(&h, &z, &BitVector::zeros(3), &SpParams::new(0.1)),
            Err(SpError::Dimension(_))
        ));
    }

    /// Distinct columns of weight 2 or 3, so every single error has a
    /// unique nearest coset word.
    fn distinct_column_h(rows: usize, cols: usize, rng: &mut seed::Rng) -> BitMatrix {
        let pool: Vec<usize> = (1..1usize << rows)
            .filter(|c| (2..=3).contains(&c.count_ones()))
            .collect();
        let picks = rand::seq::index::sample(rng, pool.len(), cols).into_vec();
        let mut support = vec![Vec::new(); rows];
        for (c, pick) in picks.into_iter().enumerate() {
            for (r, row) in support.iter_mut().enumerate() {
                if pool[pick] >> r & 1 == 1 {
                    row.push(c);
                }
            }
        }
        BitMatrix::new(rows, cols, support).unwrap()
    }

    #[test]
    fn single_errors_agree_with_exact_search() {
        let mut rng = seed::rng(2024);
        let mut agree = 0;
        for _ in 0..200 {
            let h = distinct_column_h(6, 12, &mut rng);
            let member = random_vector(12, &mut rng);
            let z = h.mul_vec(&member).unwrap();
            let flip = rng.gen_range(0..12);
            let mut bits = member.to_bits();
            bits[flip] ^= 1;
            let j = BitVector::from_bits(&bits);
            let out = sp_decode(&h, &z, &j, &SpParams::new(0.05)).unwrap();
            if out.converged {
                assert_eq!(h.mul_vec(&out.s_hat).unwrap(), z);
            }
            if out.s_hat == coset_nearest(&h, &z, &j).unwrap() {
                agree += 1;
            }
        }
        assert!(agree >= 190, "{agree} of 200");
    }

    #[test]
    fn equivariant_under_coset_translation() {
        let mut rng = seed::rng(31);
        for _ in 0..50 {
            let h = random_h(10, 20, &mut rng);
            let w = random_vector(20, &mut rng);
            let z = h.mul_vec(&w).unwrap();
            let j = random_vector(20, &mut rng);
            let params = SpParams { max_iter: 20, crossover: 0.1 };
            let direct = sp_decode(&h, &z, &j, &params).unwrap();
            let shifted = sp_decode(&h, &BitVector::zeros(10), &j.xor(&w).unwrap(), &params).unwrap();
            assert_eq!(direct.s_hat, shifted.s_hat.xor(&w).unwrap());
            assert_eq!(direct.converged, shifted.converged);
            assert_eq!(direct.iters, shifted.iters);
        }
    }

    #[test]
    fn flipping_everything_flips_the_output() {
        let mut rng = seed::rng(32);
        for _ in 0..50 {
            let h = random_h(10, 20, &mut rng);
            let ones = BitVector::from_bits(&[1u8; 20]);
            let z = h.mul_vec(&random_vector(20, &mut rng)).unwrap();
            let j = random_vector(20, &mut rng);
            let params = SpParams { max_iter: 20, crossover: 0.1 };
            let a = sp_decode(&h, &z, &j, &params).unwrap();
            let z_flip = z.xor(&h.mul_vec(&ones).unwrap()).unwrap();
            let b = sp_decode(&h, &z_flip, &j.xor(&ones).unwrap(), &params).unwrap();
            assert_eq!(a.s_hat, b.s_hat.xor(&ones).unwrap());
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut rng = seed::rng(5);
        let h = random_h(10, 20, &mut rng);
        let z = h.mul_vec(&random_vector(20, &mut rng)).unwrap();
        let j = random_vector(20, &mut rng);
        let out = sp_decode(&h, &z, &j, &SpParams { max_iter: 1, crossover: 0.45 }).unwrap();
        assert!(out.iters <= 1);
        if out.converged {
            assert_eq!(h.mul_vec(&out.s_hat).unwrap(), z);
        } else {
            assert_eq!(out.iters, 1);
        }
    }
}
