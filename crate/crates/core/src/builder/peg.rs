//! Progressive edge growth over target node-degree sequences.

use rand::seq::index::sample;
use rand::Rng as _;

use super::BuildError;
use crate::degree::DegreeDistribution;
use crate::gf2::{BitMatrix, IncrementalBasis};
use crate::seed::{self, Rng};

const REPAIR_ATTEMPTS: usize = 10;

/// Integer counts over `total` slots proportional to `fractions`, by largest
/// remainder.
pub(crate) fn apportion(fractions: &[(usize, f64)], total: usize) -> Vec<(usize, usize)> {
    let mut counts: Vec<(usize, usize, f64)> = fractions
        .iter()
        .map(|&(d, f)| {
            let exact = f * total as f64;
            (d, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|c| c.1).sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.total_cmp(&counts[a].2).then(a.cmp(&b)));
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k].1 += 1;
    }
    counts.into_iter().map(|(d, c, _)| (d, c)).collect()
}

fn expand(counts: &[(usize, usize)]) -> Vec<usize> {
    counts
        .iter()
        .flat_map(|&(d, c)| std::iter::repeat_n(d, c))
        .collect()
}

/// Check-degree targets for `checks` nodes summing to exactly `edges`.
fn check_targets(
    dist: &DegreeDistribution,
    checks: usize,
    edges: usize,
    cols: usize,
) -> Result<Vec<usize>, BuildError> {
    let support: Vec<usize> = dist.rho().iter().map(|t| t.0).collect();
    let (lo, hi) = (support[0], *support.last().expect("nonempty"));
    let mut degrees = expand(&apportion(&dist.check_node_fractions(), checks));
    degrees.sort_unstable();
    let mut total: usize = degrees.iter().sum();
    // Shift whole checks between neighbouring support degrees first.
    let next_up = |d: usize| support.iter().copied().find(|&s| s > d);
    let next_down = |d: usize| support.iter().rev().copied().find(|&s| s < d);
    while total < edges {
        let Some(k) = (0..degrees.len()).find(|&k| degrees[k] < hi) else { break };
        let up = next_up(degrees[k]).expect("below max");
        if total + (up - degrees[k]) > edges {
            break;
        }
        total += up - degrees[k];
        degrees[k] = up;
        degrees.sort_unstable();
    }
    while total > edges {
        let Some(k) = (0..degrees.len()).rev().find(|&k| degrees[k] > lo) else { break };
        let down = next_down(degrees[k]).expect("above min");
        if total - (degrees[k] - down) < edges {
            break;
        }
        total -= degrees[k] - down;
        degrees[k] = down;
        degrees.sort_unstable();
    }
    // Residual smaller than a support gap: single-step nudges.
    let mut k = 0;
    while total != edges && k < degrees.len() {
        if total < edges && degrees[k] < cols {
            degrees[k] += 1;
            total += 1;
        } else if total > edges && degrees[k] > 2 {
            degrees[k] -= 1;
            total -= 1;
        }
        k += 1;
    }
    if total != edges {
        return Err(BuildError::Unrealizable(format!(
            "{checks} checks cannot carry {edges} edges (check degrees {lo}..={hi}, {cols} columns)"
        )));
    }
    Ok(degrees)
}

struct Graph {
    var_adj: Vec<Vec<u32>>,
    chk_adj: Vec<Vec<u32>>,
    capacity: Vec<usize>,
    reached: Vec<u32>,
    seen: Vec<u32>,
    epoch: u32,
}

impl Graph {
    fn connect(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c as u32);
        self.chk_adj[c].push(v as u32);
        self.capacity[c] = self.capacity[c].saturating_sub(1);
    }

    /// Checks at maximal distance from `v`: unreachable ones if any exist,
    /// otherwise those first reached at the deepest level.
    fn far_checks(&mut self, v: usize) -> Vec<usize> {
        self.epoch += 1;
        let e = self.epoch;
        let n_checks = self.chk_adj.len();
        self.seen[v] = e;
        let mut frontier: Vec<u32> = self.var_adj[v].clone();
        for &c in &frontier {
            self.reached[c as usize] = e;
        }
        let mut count = frontier.len();
        loop {
            let mut next = Vec::new();
            for &c in &frontier {
                for &u in &self.chk_adj[c as usize] {
                    if self.seen[u as usize] == e {
                        continue;
                    }
                    self.seen[u as usize] = e;
                    for &c2 in &self.var_adj[u as usize] {
                        if self.reached[c2 as usize] != e {
                            self.reached[c2 as usize] = e;
                            next.push(c2);
                        }
                    }
                }
            }
            if next.is_empty() {
                return (0..n_checks).filter(|&c| self.reached[c] != e).collect();
            }
            count += next.len();
            if count == n_checks {
                return next.into_iter().map(|c| c as usize).collect();
            }
            frontier = next;
        }
    }
}

/// Uniform choice among the maximizers of `key`.
fn pick_max<I, K>(rng: &mut Rng, items: I, key: K) -> Option<usize>
where
    I: Iterator<Item = usize>,
    K: Fn(usize) -> i64,
{
    let mut best = None;
    let mut best_key = i64::MIN;
    let mut ties = 0u32;
    for c in items {
        let k = key(c);
        if k > best_key {
            best_key = k;
            best = Some(c);
            ties = 1;
        } else if k == best_key {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = Some(c);
            }
        }
    }
    best
}

fn checks_for_edges(dist: &DegreeDistribution, edges: usize) -> usize {
    let inv_rho: f64 = dist.rho().iter().map(|&(d, f)| f / d as f64).sum();
    (edges as f64 * inv_rho).round() as usize
}

/// Check count at which `cols` columns meet `dist` without removing or
/// stretching checks.
pub fn natural_check_count(dist: &DegreeDistribution, cols: usize) -> usize {
    let edges: usize = apportion(&dist.variable_node_fractions(), cols)
        .iter()
        .map(|&(d, c)| d * c)
        .sum();
    checks_for_edges(dist, edges)
}

/// `rows x cols` parity-check matrix grown edge by edge toward `dist`.
///
/// Column degrees follow the node-perspective form of `lambda`. When the
/// natural check count for those edges exceeds `rows`, the surplus checks are
/// removed at random after growth; when it falls short, check degrees are
/// stretched to fit. Rank-deficient results are repaired with
/// degree-preserving edge swaps.
pub fn peg_generate(
    rows: usize,
    cols: usize,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<BitMatrix, BuildError> {
    if rows == 0 || cols == 0 {
        return Err(BuildError::Unrealizable(format!("empty shape {rows}x{cols}")));
    }
    let mut rng = seed::stream(seed, 0);
    let mut var_deg = expand(&apportion(&dist.variable_node_fractions(), cols));
    if let Some(&d) = var_deg.iter().max() {
        if d > rows {
            return Err(BuildError::Unrealizable(format!(
                "variable degree {d} exceeds the {rows} available checks"
            )));
        }
    }
    // Mix degrees across column positions.
    for k in (1..var_deg.len()).rev() {
        let j = rng.gen_range(0..=k);
        var_deg.swap(k, j);
    }
    let edges: usize = var_deg.iter().sum();
    let natural = checks_for_edges(dist, edges);
    let grown = natural.max(rows);
    let targets = check_targets(dist, grown, edges, cols)?;
    if let Some(&d) = targets.iter().max() {
        if d > cols {
            return Err(BuildError::Unrealizable(format!(
                "check degree {d} exceeds the {cols} available columns"
            )));
        }
    }
    let mut order: Vec<usize> = (0..grown).collect();
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    let mut capacity = vec![0; grown];
    for (slot, &c) in order.iter().enumerate() {
        capacity[c] = targets[slot];
    }

    let mut g = Graph {
        var_adj: var_deg.iter().map(|&d| Vec::with_capacity(d)).collect(),
        chk_adj: capacity.iter().map(|&d| Vec::with_capacity(d)).collect(),
        capacity,
        reached: vec![0; grown],
        seen: vec![0; cols],
        epoch: 0,
    };
    let mut var_order: Vec<usize> = (0..cols).collect();
    var_order.sort_by_key(|&v| var_deg[v]);
    for &v in &var_order {
        for k in 0..var_deg[v] {
            let candidates = if k == 0 {
                (0..grown).collect()
            } else {
                g.far_checks(v)
            };
            let cap = &g.capacity;
            let adj = &g.var_adj[v];
            let free = |c: usize| !adj.contains(&(c as u32));
            let chosen = pick_max(
                &mut rng,
                candidates.iter().copied().filter(|&c| cap[c] > 0),
                |c| cap[c] as i64,
            )
            .or_else(|| pick_max(&mut rng, (0..grown).filter(|&c| cap[c] > 0 && free(c)), |c| cap[c] as i64))
            .or_else(|| pick_max(&mut rng, (0..grown).filter(|&c| free(c)), |c| -(g.chk_adj[c].len() as i64)))
            .expect("variable degree bounded by check count");
            g.connect(v, chosen);
        }
    }

    let keep: Vec<usize> = if grown > rows {
        let mut drop = vec![false; grown];
        for c in sample(&mut rng, grown, grown - rows).into_iter() {
            drop[c] = true;
        }
        (0..grown).filter(|&c| !drop[c]).collect()
    } else {
        (0..grown).collect()
    };
    let mut support: Vec<Vec<usize>> = keep
        .iter()
        .map(|&c| {
            let mut r: Vec<usize> = g.chk_adj[c].iter().map(|&v| v as usize).collect();
            r.sort_unstable();
            r
        })
        .collect();
    if rows <= cols {
        repair_rank(&mut support, cols, &mut rng)?;
    }
    Ok(BitMatrix::new(rows, cols, support)?)
}

fn dependent_rows(support: &[Vec<usize>], cols: usize) -> Vec<usize> {
    let mut basis = IncrementalBasis::new(cols);
    (0..support.len()).filter(|&r| !basis.insert(&support[r])).collect()
}

/// Degree-preserving swaps on rows that fall in the span of earlier rows.
fn repair_rank(support: &mut [Vec<usize>], cols: usize, rng: &mut Rng) -> Result<(), BuildError> {
    let rows = support.len();
    for _ in 0..REPAIR_ATTEMPTS {
        let dependent = dependent_rows(support, cols);
        if dependent.is_empty() {
            return Ok(());
        }
        if rows < 2 {
            break;
        }
        for &r in &dependent {
            for _ in 0..64 {
                let r2 = rng.gen_range(0..rows);
                if r2 == r || support[r].is_empty() || support[r2].is_empty() {
                    continue;
                }
                let v = support[r][rng.gen_range(0..support[r].len())];
                let v2 = support[r2][rng.gen_range(0..support[r2].len())];
                if support[r].binary_search(&v2).is_ok() || support[r2].binary_search(&v).is_ok() {
                    continue;
                }
                swap_entry(&mut support[r], v, v2);
                swap_entry(&mut support[r2], v2, v);
                break;
            }
        }
    }
    let dependent = dependent_rows(support, cols);
    if dependent.is_empty() {
        Ok(())
    } else {
        Err(BuildError::RankRepair {
            rank: rows - dependent.len(),
            rows,
        })
    }
}

fn swap_entry(row: &mut Vec<usize>, out: usize, into: usize) {
    let k = row.binary_search(&out).expect("present");
    row.remove(k);
    let k = row.binary_search(&into).expect_err("absent");
    row.insert(k, into);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Catalog;
    use std::collections::BTreeMap;

    fn edge_fractions(weights: &[usize]) -> BTreeMap<usize, f64> {
        let total: usize = weights.iter().sum();
        let mut out = BTreeMap::new();
        for &w in weights {
            *out.entry(w).or_insert(0.0) += w as f64 / total as f64;
        }
        out
    }

    #[test]
    fn apportion_is_exact() {
        let c = apportion(&[(2, 0.5), (3, 0.3), (4, 0.2)], 7);
        assert_eq!(c.iter().map(|x| x.1).sum::<usize>(), 7);
        assert_eq!(c, vec![(2, 4), (3, 2), (4, 1)]);
    }

    #[test]
    fn regular_three_six() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let h = peg_generate(6, 12, &d, 1).unwrap();
        assert!(h.col_weights().iter().all(|&w| w == 3));
        assert!(h.row_weights().iter().all(|&w| w == 6));
    }

    #[test]
    fn regular_is_full_rank_and_simple() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        for seed in 0..20 {
            let h = peg_generate(50, 100, &d, seed).unwrap();
            assert_eq!(h.rank(), 50);
            assert_eq!(h.nnz(), 300);
        }
    }

    #[test]
    fn irregular_profile_within_two_percent() {
        let cat = Catalog::builtin();
        let d = &cat.get("1").unwrap().distribution;
        let rows = natural_check_count(d, 4000);
        assert_eq!(rows, 3518);
        let h = peg_generate(rows, 4000, d, 11).unwrap();
        assert_eq!(h.rank(), rows);
        let lam = edge_fractions(&h.col_weights());
        for &(deg, f) in d.lambda() {
            let got = lam.get(&deg).copied().unwrap_or(0.0);
            assert!((got - f).abs() <= 0.02, "lambda_{deg}: {got} vs {f}");
        }
        let rho = edge_fractions(&h.row_weights());
        for &(deg, f) in d.rho() {
            let got = rho.get(&deg).copied().unwrap_or(0.0);
            assert!((got - f).abs() <= 0.02, "rho_{deg}: {got} vs {f}");
        }
    }

    #[test]
    fn trimmed_rows_keep_the_mean_degree() {
        let cat = Catalog::builtin();
        let d = &cat.get("1").unwrap().distribution;
        let h = peg_generate(3500, 4000, d, 11).unwrap();
        assert_eq!(h.shape(), (3500, 4000));
        assert_eq!(h.rank(), 3500);
        let mean = h.nnz() as f64 / 4000.0;
        let want = d.mean_variable_degree();
        assert!((mean - want).abs() / want < 0.02, "{mean} vs {want}");
    }

    #[test]
    fn unrealizable_shapes_are_rejected() {
        let d = DegreeDistribution::regular(5, 6).unwrap();
        assert!(matches!(peg_generate(3, 12, &d, 0), Err(BuildError::Unrealizable(_))));
    }

    #[test]
    fn deterministic_for_seed() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(peg_generate(30, 60, &d, 5).unwrap(), peg_generate(30, 60, &d, 5).unwrap());
        assert_ne!(peg_generate(30, 60, &d, 5).unwrap(), peg_generate(30, 60, &d, 6).unwrap());
    }

    #[test]
    fn repair_separates_duplicate_rows() {
        let mut support = vec![vec![0, 1, 2], vec![0, 1, 2], vec![3, 4, 5], vec![2, 5, 7]];
        let mut rng = seed::rng(3);
        repair_rank(&mut support, 8, &mut rng).unwrap();
        assert!(dependent_rows(&support, 8).is_empty());
        let mut cols = vec![0; 8];
        for r in &support {
            assert_eq!(r.len(), 3);
            for &c in r {
                cols[c] += 1;
            }
        }
        assert_eq!(cols, vec![2, 2, 3, 1, 1, 2, 0, 1]);
    }
}
