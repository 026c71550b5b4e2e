//! Discretization of a relaxed matching to a permutation: an O(n^3)
//! Hungarian solver in maximization form, an exhaustive reference for
//! small sizes, and conversions between permutations and matrices.

use crate::error::{FramError, Result};
use crate::matrix::Matrix;

/// Budget for the exhaustive reference solver.
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// A row-to-column assignment: `perm[i]` is the column matched to row
/// `i`, with `score = sum_i N[i, perm[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub score: f64,
}

fn require_square(n: &Matrix) -> Result<usize> {
    if !n.is_square() {
        return Err(FramError::NotSquare {
            rows: n.rows(),
            cols: n.cols(),
        });
    }
    Ok(n.rows())
}

fn recompute_score(n: &Matrix, perm: &[usize]) -> f64 {
    let mut s = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        s += n.get(i, j);
    }
    s
}

/// Maximum-score assignment via the Hungarian method with potentials
/// (shortest augmenting paths). Deterministic under ties: the scan order
/// is fixed, so identical input bits give identical output.
pub fn hungarian_max(n: &Matrix) -> Result<Assignment> {
    let size = require_square(n)?;
    // Minimize the negated scores; the virtual column index is `size`.
    let none = usize::MAX;
    let mut u = vec![0.0_f64; size + 1];
    let mut v = vec![0.0_f64; size + 1];
    let mut owner = vec![none; size + 1];

    for i in 0..size {
        owner[size] = i;
        let mut j_cur = size;
        let mut min_to = vec![f64::INFINITY; size + 1];
        let mut prev = vec![size; size + 1];
        let mut used = vec![false; size + 1];

        loop {
            used[j_cur] = true;
            let i_cur = owner[j_cur];
            let mut delta = f64::INFINITY;
            let mut j_next = size;
            for j in 0..size {
                if used[j] {
                    continue;
                }
                let reduced = -n.get(i_cur, j) - u[i_cur] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    prev[j] = j_cur;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j_next = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j_cur = j_next;
            if owner[j_cur] == none {
                break;
            }
        }

        // Augment along the alternating path.
        loop {
            let j_prev = prev[j_cur];
            owner[j_cur] = owner[j_prev];
            j_cur = j_prev;
            if j_cur == size {
                break;
            }
        }
    }

    let mut perm = vec![0usize; size];
    for j in 0..size {
        perm[owner[j]] = j;
    }
    let score = recompute_score(n, &perm);
    Ok(Assignment { perm, score })
}

/// Exhaustive maximum over all permutations, enumerated in lexicographic
/// order so ties resolve to the lexicographically smallest permutation.
/// Limited to `n <= 8`.
pub fn brute_force_max(n: &Matrix) -> Result<Assignment> {
    let size = require_square(n)?;
    if size > BRUTE_FORCE_MAX_N {
        return Err(FramError::SizeLimit {
            n: size,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut perm = Vec::with_capacity(size);
    let mut used = vec![false; size];
    recurse(n, size, &mut perm, &mut used, 0.0, &mut best);
    let (perm, score) = best.expect("at least one permutation");
    Ok(Assignment { perm, score })
}

fn recurse(
    n: &Matrix,
    size: usize,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    partial: f64,
    best: &mut Option<(Vec<usize>, f64)>,
) {
    let row = perm.len();
    if row == size {
        let better = match best {
            None => true,
            Some((_, s)) => partial > *s,
        };
        if better {
            *best = Some((perm.clone(), partial));
        }
        return;
    }
    for j in 0..size {
        if used[j] {
            continue;
        }
        used[j] = true;
        perm.push(j);
        recurse(n, size, perm, used, partial + n.get(row, j), best);
        perm.pop();
        used[j] = false;
    }
}

/// The 0/1 matrix of an assignment: exactly one 1 per row and column.
pub fn assignment_to_matrix(a: &Assignment, n: usize) -> Matrix {
    assert_eq!(a.perm.len(), n, "permutation length must equal n");
    let mut m = Matrix::zeros(n, n);
    for (i, &j) in a.perm.iter().enumerate() {
        m.set(i, j, 1.0);
    }
    m
}

/// Extracts the permutation from a 0/1 permutation matrix, validating
/// that every row and column holds exactly one 1.
pub fn permutation_from_matrix(m: &Matrix) -> Result<Vec<usize>> {
    let n = require_square(m)?;
    let mut perm = vec![usize::MAX; n];
    let mut col_seen = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if v == 1.0 {
                if perm[i] != usize::MAX {
                    return Err(FramError::NotPermutation(format!("row {i} has two ones")));
                }
                if col_seen[j] {
                    return Err(FramError::NotPermutation(format!("column {j} has two ones")));
                }
                perm[i] = j;
                col_seen[j] = true;
            } else if v != 0.0 {
                return Err(FramError::NotPermutation(format!(
                    "entry ({i}, {j}) = {v} is not 0 or 1"
                )));
            }
        }
    }
    if perm.iter().any(|&j| j == usize::MAX) {
        return Err(FramError::NotPermutation("a row has no 1".to_string()));
    }
    Ok(perm)
}
