use std::collections::VecDeque;

use super::BuildError;
use crate::gf2::BitMatrix;

const NIL: usize = usize::MAX;

/// Maximum bipartite matching (Hopcroft-Karp). `adj[l]` lists the right
/// vertices adjacent to left vertex `l`; returns the partner of each left
/// vertex or `NIL`.
pub(crate) fn max_matching(adj: &[Vec<usize>], right: usize) -> Vec<usize> {
    let left = adj.len();
    let mut mate_l = vec![NIL; left];
    let mut mate_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut next_edge = vec![0usize; left];
    loop {
        // Layer free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..left {
            if mate_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = NIL;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate_r[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == NIL {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            return mate_l;
        }
        // Layered augmenting paths, iterative DFS.
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..left {
            if mate_l[root] != NIL {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&l) = stack.last() {
                if next_edge[l] == adj[l].len() {
                    dist[l] = NIL;
                    stack.pop();
                    continue;
                }
                let r = adj[l][next_edge[l]];
                next_edge[l] += 1;
                let m = mate_r[r];
                if m == NIL {
                    // Flip the path held on the stack.
                    let mut r = r;
                    while let Some(l) = stack.pop() {
                        let prev = mate_l[l];
                        mate_l[l] = r;
                        mate_r[r] = l;
                        r = prev;
                    }
                    break;
                }
                if dist[m] != NIL && dist[m] == dist[l] + 1 {
                    stack.push(m);
                }
            }
        }
    }
}

/// Row and column permutations, in the convention of
/// [`BitMatrix::permute`], that place ones on the whole main diagonal.
///
/// An invertible column subset is found by elimination; its nonzero
/// determinant guarantees a row-to-column perfect matching over the support,
/// and the matched column of row `i` is moved to position `i`.
pub fn all_one_diagonalize(a: &BitMatrix) -> Result<(Vec<usize>, Vec<usize>), BuildError> {
    let (rows, cols) = a.shape();
    if rows > cols {
        return Err(BuildError::NotDiagonalizable(format!(
            "{rows}x{cols} has more rows than columns"
        )));
    }
    let pivots = a.pivot_columns();
    if pivots.len() < rows {
        return Err(BuildError::NotDiagonalizable(format!(
            "rank {} below row count {rows}",
            pivots.len()
        )));
    }
    let mut slot = vec![NIL; cols];
    for (k, &c) in pivots.iter().enumerate() {
        slot[c] = k;
    }
    let adj: Vec<Vec<usize>> = (0..rows)
        .map(|i| a.row(i).iter().filter_map(|&c| (slot[c] != NIL).then_some(slot[c])).collect())
        .collect();
    let mate = max_matching(&adj, pivots.len());
    let mut col_perm = Vec::with_capacity(cols);
    let mut used = vec![false; cols];
    for &k in &mate {
        // A nonsingular block always has a perfect matching.
        assert!(k != NIL, "nonsingular block without perfect matching");
        col_perm.push(pivots[k]);
        used[pivots[k]] = true;
    }
    col_perm.extend((0..cols).filter(|&c| !used[c]));
    Ok(((0..rows).collect(), col_perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn random_full_rank(rows: usize, cols: usize, rng: &mut seed::Rng) -> BitMatrix {
        loop {
            let dense: Vec<Vec<u8>> = (0..rows)
                .map(|_| (0..cols).map(|_| u8::from(rng.gen_bool(0.3))).collect())
                .collect();
            let m = BitMatrix::from_dense(&dense).unwrap();
            if m.rank() == rows {
                return m;
            }
        }
    }

    /// Brute force over all injective row-to-column assignments.
    fn has_diagonal_permutation(a: &BitMatrix) -> bool {
        fn go(a: &BitMatrix, row: usize, used: &mut Vec<bool>) -> bool {
            if row == a.rows() {
                return true;
            }
            for &c in a.row(row) {
                if !used[c] {
                    used[c] = true;
                    if go(a, row + 1, used) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        go(a, 0, &mut vec![false; a.cols()])
    }

    #[test]
    fn anti_diagonal() {
        let a = BitMatrix::from_dense(&[[0u8, 1], [1, 0]]).unwrap();
        let (r, c) = all_one_diagonalize(&a).unwrap();
        assert!(a.permute(&r, &c).unwrap().is_all_one_diagonal());
    }

    #[test]
    fn identity_leading_needs_nothing() {
        let a = BitMatrix::from_dense(&[[1u8, 0, 1], [0, 1, 1]]).unwrap();
        let (r, c) = all_one_diagonalize(&a).unwrap();
        assert_eq!(r, vec![0, 1]);
        assert_eq!(c, vec![0, 1, 2]);
    }

    #[test]
    fn random_eight_by_fourteen() {
        let mut rng = seed::rng(42);
        for _ in 0..100 {
            let a = random_full_rank(8, 14, &mut rng);
            let (r, c) = all_one_diagonalize(&a).unwrap();
            let p = a.permute(&r, &c).unwrap();
            assert!(p.is_all_one_diagonal());
            assert_eq!(p.rank(), a.rank());
            let mut w0 = a.col_weights();
            let mut w1 = p.col_weights();
            w0.sort_unstable();
            w1.sort_unstable();
            assert_eq!(w0, w1);
        }
    }

    #[test]
    fn small_instances_agree_with_exhaustive_search() {
        let mut rng = seed::rng(9);
        for _ in 0..200 {
            let a = random_full_rank(4, 6, &mut rng);
            assert!(has_diagonal_permutation(&a));
            let (r, c) = all_one_diagonalize(&a).unwrap();
            assert!(a.permute(&r, &c).unwrap().is_all_one_diagonal());
        }
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = BitMatrix::from_dense(&[[1u8, 1, 0], [1, 1, 0]]).unwrap();
        assert!(matches!(all_one_diagonalize(&a), Err(BuildError::NotDiagonalizable(_))));
    }

    #[test]
    fn matching_on_a_path() {
        // l0-{r0,r1}, l1-{r0}: perfect matching needs an augmenting path.
        let mate = max_matching(&[vec![0, 1], vec![0]], 2);
        assert_eq!(mate, vec![1, 0]);
    }
}
