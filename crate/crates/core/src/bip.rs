//! Bias-propagation quantization onto an LDGM code.
//!
//! Variables are the information bits `u` (rows of `G1`), checks are the code
//! bits (columns of `G1`), and every check also hears its source bit as
//! `(-1)^s tanh(gamma)`. Each round runs a fixed number of flooding
//! iterations from fresh messages, then fixes every variable whose bias
//! exceeds the threshold, or the single most biased one.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};
use crate::seed;

/// Largest magnitude a message may take before `atanh`.
const MSG_CLIP: f64 = 1.0 - 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BipError {
    #[error("source length {found} does not match the code length {expected}")]
    Length { expected: usize, found: usize },
    #[error("invalid quantizer parameter: {0}")]
    Param(String),
    #[error("exhaustive search over {rows} generator rows exceeds the cap of {cap}")]
    TooLarge { rows: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BipParams {
    /// Source-message strength; `None` means `2 R1`.
    pub gamma: Option<f64>,
    pub threshold: f64,
    pub iters_per_round: usize,
    /// Mixing weight of the previous message; `None` means 0.5 on graphs
    /// with 4-cycles and 0 otherwise.
    pub damping: Option<f64>,
    /// Carry messages across rounds instead of restarting from 1.
    pub warm_start: bool,
}

impl Default for BipParams {
    fn default() -> Self {
        BipParams {
            gamma: None,
            threshold: 0.8,
            iters_per_round: 25,
            damping: None,
            warm_start: false,
        }
    }
}

impl BipParams {
    pub fn validate(&self) -> Result<(), BipError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(BipError::Param(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        if self.iters_per_round == 0 {
            return Err(BipError::Param("iters_per_round must be at least 1".into()));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(BipError::Param(format!("gamma {g} must be positive")));
            }
        }
        if let Some(d) = self.damping {
            if !(0.0..1.0).contains(&d) {
                return Err(BipError::Param(format!("damping {d} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BipDiagnostics {
    pub rounds: usize,
    /// Rounds that fixed exactly one variable through the fallback.
    pub fallback_rounds: usize,
    pub iterations: usize,
    /// Messages clipped away from magnitude 1 before `atanh`.
    pub degenerate_messages: usize,
    pub gamma: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantized {
    pub u: BitVector,
    /// The codeword `u G1`.
    pub x: BitVector,
    pub distance: usize,
    /// `distance / n`.
    pub d1: f64,
    pub diagnostics: BipDiagnostics,
}

/// Check-node rule: product of the incoming messages.
pub fn check_message(others: &[f64]) -> f64 {
    others.iter().product()
}

/// Variable-node rule in product-ratio form. A `0/0` ratio yields 0.
pub fn variable_message_ratio(phis: &[f64]) -> f64 {
    let plus: f64 = phis.iter().map(|p| 1.0 + p).product();
    let minus: f64 = phis.iter().map(|p| 1.0 - p).product();
    let den = plus + minus;
    if den == 0.0 {
        0.0
    } else {
        (plus - minus) / den
    }
}

/// Variable-node rule as `tanh(sum atanh(phi))`.
pub fn variable_message_atanh(phis: &[f64]) -> f64 {
    phis.iter().map(|p| p.clamp(-MSG_CLIP, MSG_CLIP).atanh()).sum::<f64>().tanh()
}

/// Tanner graph of `G1` in compressed form, shared across quantizations.
#[derive(Debug, Clone)]
pub struct QuantizerGraph {
    k: usize,
    n: usize,
    /// Edges grouped by check: `check_ptr[a]..check_ptr[a + 1]`.
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    four_cycle: bool,
}

impl QuantizerGraph {
    pub fn new(g1: &BitMatrix) -> QuantizerGraph {
        let (k, n) = g1.shape();
        let cols = g1.column_supports();
        let mut check_ptr = Vec::with_capacity(n + 1);
        let mut edge_var = Vec::with_capacity(g1.nnz());
        check_ptr.push(0);
        for col in &cols {
            edge_var.extend(col.iter().map(|&v| v as u32));
            check_ptr.push(edge_var.len());
        }
        let four_cycle = has_four_cycle(g1, &cols);
        QuantizerGraph {
            k,
            n,
            check_ptr,
            edge_var,
            four_cycle,
        }
    }

    /// Whether two variables share two or more checks.
    pub fn has_four_cycle(&self) -> bool {
        self.four_cycle
    }

    pub fn variables(&self) -> usize {
        self.k
    }

    pub fn checks(&self) -> usize {
        self.n
    }
}

fn has_four_cycle(g1: &BitMatrix, cols: &[Vec<usize>]) -> bool {
    let mut mark = vec![usize::MAX; g1.rows()];
    for v in 0..g1.rows() {
        for &a in g1.row(v) {
            for &u in &cols[a] {
                if u == v {
                    continue;
                }
                if mark[u] == v {
                    return true;
                }
                mark[u] = v;
            }
        }
    }
    false
}

/// Active part of the graph during one round.
struct Active {
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    /// Edge ids grouped by variable.
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
    /// Position in the previous round's edge arrays, for warm starts.
    origin: Vec<u32>,
}

fn compact(check_ptr: &[usize], edge_var: &[u32], fixed: &[Option<bool>], k: usize) -> Active {
    let n = check_ptr.len() - 1;
    let mut out_ptr = Vec::with_capacity(n + 1);
    let mut out_var = Vec::with_capacity(edge_var.len());
    let mut origin = Vec::with_capacity(edge_var.len());
    out_ptr.push(0);
    for a in 0..n {
        for e in check_ptr[a]..check_ptr[a + 1] {
            let v = edge_var[e];
            if fixed[v as usize].is_none() {
                out_var.push(v);
                origin.push(e as u32);
            }
        }
        out_ptr.push(out_var.len());
    }
    let mut var_ptr = vec![0usize; k + 1];
    for &v in &out_var {
        var_ptr[v as usize + 1] += 1;
    }
    for v in 0..k {
        var_ptr[v + 1] += var_ptr[v];
    }
    let mut fill = var_ptr.clone();
    let mut var_edges = vec![0u32; out_var.len()];
    for (e, &v) in out_var.iter().enumerate() {
        var_edges[fill[v as usize]] = e as u32;
        fill[v as usize] += 1;
    }
    Active {
        check_ptr: out_ptr,
        edge_var: out_var,
        var_ptr,
        var_edges,
        origin,
    }
}

pub fn bip_quantize(
    g1: &BitMatrix,
    s: &BitVector,
    params: &BipParams,
    seed: u64,
) -> Result<Quantized, BipError> {
    bip_quantize_on(&QuantizerGraph::new(g1), g1, s, params, seed)
}

/// Quantization with a prebuilt graph of `g1`.
pub fn bip_quantize_on(
    graph: &QuantizerGraph,
    g1: &BitMatrix,
    s: &BitVector,
    params: &BipParams,
    seed: u64,
) -> Result<Quantized, BipError> {
    params.validate()?;
    let (k, n) = (graph.k, graph.n);
    if s.len() != n {
        return Err(BipError::Length {
            expected: n,
            found: s.len(),
        });
    }
    let gamma = params.gamma.unwrap_or(2.0 * k as f64 / n as f64);
    let damping = params
        .damping
        .unwrap_or(if graph.four_cycle { 0.5 } else { 0.0 });
    let mut diag = BipDiagnostics {
        gamma,
        damping,
        ..BipDiagnostics::default()
    };
    let mut rng = seed::stream(seed, 0);

    let source = gamma.tanh();
    let mut constant: Vec<f64> = (0..n)
        .map(|a| if s.get(a) { -source } else { source })
        .collect();
    let mut fixed: Vec<Option<bool>> = vec![None; k];
    let mut remaining = k;

    let mut active = compact(&graph.check_ptr, &graph.edge_var, &fixed, k);
    let mut theta = vec![1.0f64; active.edge_var.len()];
    let mut phi = vec![0.0f64; active.edge_var.len()];
    let mut prefix = Vec::new();
    let mut bias = vec![0.0f64; k];

    while remaining > 0 {
        diag.rounds += 1;
        if !params.warm_start {
            theta.iter_mut().for_each(|t| *t = 1.0);
        }
        for _ in 0..params.iters_per_round {
            check_step(&active, &constant, &theta, &mut phi, &mut prefix);
            variable_step(&active, &phi, &mut theta, damping, &mut diag.degenerate_messages, None);
            diag.iterations += 1;
        }
        check_step(&active, &constant, &theta, &mut phi, &mut prefix);
        variable_step(
            &active,
            &phi,
            &mut theta,
            0.0,
            &mut diag.degenerate_messages,
            Some(&mut bias),
        );

        let mut newly = Vec::new();
        for v in 0..k {
            if fixed[v].is_none() && bias[v].abs() > params.threshold {
                newly.push(v);
            }
        }
        if newly.is_empty() {
            diag.fallback_rounds += 1;
            let mut best = None;
            let mut best_abs = -1.0;
            for v in 0..k {
                if fixed[v].is_none() && bias[v].abs() > best_abs {
                    best_abs = bias[v].abs();
                    best = Some(v);
                }
            }
            newly.push(best.expect("an unfixed variable remains"));
        }
        for &v in &newly {
            let value = if bias[v] > 0.0 {
                false
            } else if bias[v] < 0.0 {
                true
            } else {
                rng.gen_bool(0.5)
            };
            fixed[v] = Some(value);
            if value {
                for &a in g1.row(v) {
                    constant[a] = -constant[a];
                }
            }
        }
        remaining -= newly.len();
        if remaining > 0 {
            let next = compact(&graph.check_ptr, &graph.edge_var, &fixed, k);
            if params.warm_start {
                // Map surviving edges back onto the original positions.
                let mut by_origin = vec![1.0f64; graph.edge_var.len()];
                for (e, &o) in active.origin.iter().enumerate() {
                    by_origin[o as usize] = theta[e];
                }
                theta = next.origin.iter().map(|&o| by_origin[o as usize]).collect();
            } else {
                theta = vec![1.0; next.edge_var.len()];
            }
            phi = vec![0.0; next.edge_var.len()];
            active = next;
        }
    }

    let u_bits: Vec<u8> = fixed.iter().map(|f| u8::from(f.expect("all fixed"))).collect();
    let u = BitVector::from_bits(&u_bits);
    let x = g1.left_mul(&u).expect("u has one bit per generator row");
    let distance = x.hamming_distance(s).expect("equal lengths");
    Ok(Quantized {
        u,
        x,
        distance,
        d1: distance as f64 / n as f64,
        diagnostics: diag,
    })
}

/// `phi[e]` for every edge: the check constant times every other incoming
/// `theta` at the same check.
fn check_step(active: &Active, constant: &[f64], theta: &[f64], phi: &mut [f64], prefix: &mut Vec<f64>) {
    let n = active.check_ptr.len() - 1;
    for a in 0..n {
        let (lo, hi) = (active.check_ptr[a], active.check_ptr[a + 1]);
        if lo == hi {
            continue;
        }
        prefix.clear();
        let mut acc = constant[a];
        for &t in &theta[lo..hi] {
            prefix.push(acc);
            acc *= t;
        }
        let mut suffix = 1.0;
        for e in (lo..hi).rev() {
            phi[e] = prefix[e - lo] * suffix;
            suffix *= theta[e];
        }
    }
}

/// New `theta` on every edge from `tanh` of the other incoming `atanh(phi)`;
/// with `bias`, also stores each variable's full-sum bias.
fn variable_step(
    active: &Active,
    phi: &[f64],
    theta: &mut [f64],
    damping: f64,
    degenerate: &mut usize,
    bias: Option<&mut [f64]>,
) {
    let k = active.var_ptr.len() - 1;
    let mut lam = Vec::new();
    let mut bias = bias;
    for v in 0..k {
        let (lo, hi) = (active.var_ptr[v], active.var_ptr[v + 1]);
        if lo == hi {
            continue;
        }
        lam.clear();
        let mut total = 0.0;
        for &e in &active.var_edges[lo..hi] {
            let p = phi[e as usize];
            let l = if p.abs() > MSG_CLIP {
                *degenerate += 1;
                p.signum() * MSG_CLIP
            } else {
                p
            }
            .atanh();
            lam.push(l);
            total += l;
        }
        if let Some(b) = bias.as_deref_mut() {
            b[v] = total.tanh();
            continue;
        }
        for (i, &e) in active.var_edges[lo..hi].iter().enumerate() {
            let cand = (total - lam[i]).tanh();
            let e = e as usize;
            theta[e] = if damping > 0.0 {
                (1.0 - damping) * cand + damping * theta[e]
            } else {
                cand
            };
            debug_assert!(theta[e].abs() <= 1.0);
        }
    }
}

/// Codeword of `g1` nearest to `s` by full enumeration; ties go to the
/// lexicographically smallest `u`.
pub fn exhaustive_quantize(g1: &BitMatrix, s: &BitVector) -> Result<Quantized, BipError> {
    const CAP: usize = 24;
    let (k, n) = g1.shape();
    if k > CAP {
        return Err(BipError::TooLarge { rows: k, cap: CAP });
    }
    if s.len() != n {
        return Err(BipError::Length {
            expected: n,
            found: s.len(),
        });
    }
    let words = n.div_ceil(64);
    let pack = |support: &[usize]| {
        let mut w = vec![0u64; words];
        for &i in support {
            w[i / 64] ^= 1 << (i % 64);
        }
        w
    };
    let rows: Vec<Vec<u64>> = (0..k).map(|r| pack(g1.row(r))).collect();
    let target = pack(s.support());
    // Gray-code walk; the integer key puts u_0 in the most significant bit.
    let key_bit = |r: usize| 1u64 << (k - 1 - r);
    let mut x = vec![0u64; words];
    let mut key = 0u64;
    let dist = |x: &[u64]| -> usize {
        x.iter().zip(&target).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    };
    let mut best = (dist(&x), 0u64);
    for step in 1u64..(1u64 << k) {
        let r = k - 1 - step.trailing_zeros() as usize;
        key ^= key_bit(r);
        for (w, rw) in x.iter_mut().zip(&rows[r]) {
            *w ^= rw;
        }
        let d = dist(&x);
        if d < best.0 || (d == best.0 && key < best.1) {
            best = (d, key);
        }
    }
    let u_bits: Vec<u8> = (0..k).map(|r| u8::from(best.1 & key_bit(r) != 0)).collect();
    let u = BitVector::from_bits(&u_bits);
    let x = g1.left_mul(&u).expect("shape checked");
    Ok(Quantized {
        distance: best.0,
        d1: best.0 as f64 / n as f64,
        u,
        x,
        diagnostics: BipDiagnostics::default(),
    })
}
