//! Evaluation measures: matching error, node accuracy, objective
//! reporting.

use crate::assignment::permutation_from_matrix;
use crate::error::{FramError, Result};
use crate::graph::{objective, MatchingProblem};
use crate::matrix::Matrix;

/// Evaluation summary for one solve. `accuracy` is present exactly when
/// ground truth was supplied.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub matching_error: f64,
    pub accuracy: Option<f64>,
    pub objective: f64,
}

/// Structural matching error
/// `1/2 ||A - M A~ M^T||_F + ||F - M F~||_F`,
/// with the feature term omitted for attribute-free problems.
///
/// `M A~ M^T` and `M F~` only permute entries, so both terms are
/// evaluated by indexing: a perfect isomorphism yields exactly zero.
pub fn matching_error(p: &MatchingProblem, m: &Matrix) -> Result<f64> {
    if m.rows() != p.n() || m.cols() != p.n() {
        return Err(FramError::Dimension(format!(
            "matching matrix must be {0}x{0}, got {1}x{2}",
            p.n(),
            m.rows(),
            m.cols()
        )));
    }
    let perm = permutation_from_matrix(m)?;
    let n = p.n();
    let a = p.g().adjacency();
    let at = p.g_tilde().adjacency();

    let mut edge_sq = 0.0;
    for i in 0..n {
        let mut partial = 0.0;
        for j in 0..n {
            let d = a.get(i, j) - at.get(perm[i], perm[j]);
            partial += d * d;
        }
        edge_sq += partial;
    }
    let mut err = 0.5 * edge_sq.sqrt();

    if let (Some(f), Some(ft)) = (p.g().features(), p.g_tilde().features()) {
        let mut feat_sq = 0.0;
        for i in 0..n {
            let fi = f.row(i);
            let gi = ft.row(perm[i]);
            let mut partial = 0.0;
            for d in 0..f.cols() {
                let x = fi[d] - gi[d];
                partial += x * x;
            }
            feat_sq += partial;
        }
        err += feat_sq.sqrt();
    }
    Ok(err)
}

/// Fraction of nodes matched exactly as in the ground truth:
/// `<M, P_true> / n`.
pub fn node_accuracy(m: &Matrix, p_true: &Matrix) -> Result<f64> {
    if m.shape() != p_true.shape() {
        return Err(FramError::Dimension(format!(
            "shape mismatch: {:?} vs {:?}",
            m.shape(),
            p_true.shape()
        )));
    }
    let ours = permutation_from_matrix(m)?;
    let truth = permutation_from_matrix(p_true)?;
    let hits = ours.iter().zip(&truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / ours.len() as f64)
}

/// Evaluates a discretized matching against the problem and optional
/// ground truth.
pub fn evaluate(p: &MatchingProblem, m: &Matrix, truth: Option<&Matrix>) -> Result<EvalReport> {
    Ok(EvalReport {
        matching_error: matching_error(p, m)?,
        accuracy: truth.map(|t| node_accuracy(m, t)).transpose()?,
        objective: objective(p, m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{assignment_to_matrix, Assignment};
    use crate::graph::AttributedGraph;
    use crate::rng::{random_matrix, random_permutation, seeded_rng};

    fn perm_matrix(perm: &[usize]) -> Matrix {
        assignment_to_matrix(
            &Assignment {
                perm: perm.to_vec(),
                score: 0.0,
            },
            perm.len(),
        )
    }

    fn symmetric_random(n: usize, seed: u64) -> Matrix {
        let mut rng = seeded_rng(seed, 0);
        let raw = random_matrix(n, n, &mut rng);
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                raw.get(a, b)
            }
        })
    }

    fn relabel(g: &AttributedGraph, perm: &[usize]) -> AttributedGraph {
        let n = g.node_count();
        let adj = Matrix::from_fn(n, n, |i, j| {
            // inverse relabeling: entry (perm[i], perm[j]) carries A[i][j]
            let mut v = 0.0;
            for a in 0..n {
                for b in 0..n {
                    if perm[a] == i && perm[b] == j {
                        v = g.adjacency().get(a, b);
                    }
                }
            }
            v
        });
        let features = g.features().map(|f| {
            Matrix::from_fn(n, f.cols(), |i, d| {
                let mut v = 0.0;
                for a in 0..n {
                    if perm[a] == i {
                        v = f.get(a, d);
                    }
                }
                v
            })
        });
        AttributedGraph::new(adj, features).unwrap()
    }

    #[test]
    fn identical_graphs_identity_error_is_zero() {
        let g = AttributedGraph::new(symmetric_random(5, 80), None).unwrap();
        let p = MatchingProblem::new(g.clone(), g, 1.0).unwrap();
        let err = matching_error(&p, &Matrix::identity(5)).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn matching_error_direct_value() {
        // A = I2, A~ = 0, no features, M = I: error = ||I2||_F / 2.
        let a = AttributedGraph::new(Matrix::identity(2), None).unwrap();
        let b = AttributedGraph::new(Matrix::zeros(2, 2), None).unwrap();
        let p = MatchingProblem::new(a, b, 0.0).unwrap();
        let err = matching_error(&p, &Matrix::identity(2)).unwrap();
        assert!((err - 2.0_f64.sqrt() / 2.0).abs() <= 1e-15);
    }

    #[test]
    fn matching_error_zero_iff_isomorphic() {
        let mut rng = seeded_rng(81, 0);
        let g = AttributedGraph::new(
            symmetric_random(6, 82),
            Some(random_matrix(6, 2, &mut rng)),
        )
        .unwrap();
        let perm = random_permutation(6, &mut rng);
        let g_tilde = relabel(&g, &perm);
        let p = MatchingProblem::new(g.clone(), g_tilde, 1.0).unwrap();

        // The planted permutation is an exact isomorphism.
        assert_eq!(matching_error(&p, &perm_matrix(&perm)).unwrap(), 0.0);

        // Any other permutation has strictly positive error on
        // distinct-entry attributes.
        let mut other = perm.clone();
        other.swap(0, 1);
        assert!(matching_error(&p, &perm_matrix(&other)).unwrap() > 0.0);
    }

    #[test]
    fn matching_error_rejects_non_permutation() {
        let g = AttributedGraph::new(symmetric_random(3, 83), None).unwrap();
        let p = MatchingProblem::new(g.clone(), g, 0.0).unwrap();
        assert!(matches!(
            matching_error(&p, &Matrix::uniform(3)),
            Err(FramError::NotPermutation(_))
        ));
    }

    #[test]
    fn node_accuracy_cases() {
        let id = Matrix::identity(4);
        assert_eq!(node_accuracy(&id, &id).unwrap(), 1.0);

        let anti = perm_matrix(&[3, 2, 1, 0]);
        assert_eq!(node_accuracy(&id, &anti).unwrap(), 0.0);

        // Swapping one 2-cycle leaves exactly half the rows agreeing.
        let half = perm_matrix(&[1, 0, 2, 3]);
        assert_eq!(node_accuracy(&half, &id).unwrap(), 0.5);
    }

    #[test]
    fn node_accuracy_is_symmetric() {
        let mut rng = seeded_rng(84, 0);
        for _ in 0..20 {
            let a = perm_matrix(&random_permutation(6, &mut rng));
            let b = perm_matrix(&random_permutation(6, &mut rng));
            assert_eq!(
                node_accuracy(&a, &b).unwrap(),
                node_accuracy(&b, &a).unwrap()
            );
        }
    }

    #[test]
    fn min_error_permutation_maximizes_objective() {
        // Attribute-free case: the two criteria are exactly equivalent,
        // checked by enumeration at n = 5. Self-match keeps the instance
        // lambda-consistent.
        let g = AttributedGraph::new(symmetric_random(5, 85), None).unwrap();
        let p = MatchingProblem::new(g.clone(), g, 0.0).unwrap();

        let mut best_err = f64::INFINITY;
        let mut best_obj = f64::NEG_INFINITY;
        let mut argmin_err = Vec::new();
        let mut argmax_obj = Vec::new();
        let mut perm: Vec<usize> = (0..5).collect();
        loop {
            let m = perm_matrix(&perm);
            let err = matching_error(&p, &m).unwrap();
            let obj = crate::graph::objective(&p, &m).unwrap();
            if err < best_err - 1e-12 {
                best_err = err;
                argmin_err = perm.clone();
            }
            if obj > best_obj + 1e-12 {
                best_obj = obj;
                argmax_obj = perm.clone();
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        assert_eq!(argmin_err, argmax_obj);
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        let n = p.len();
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    #[test]
    fn evaluate_populates_accuracy_only_with_truth() {
        let g = AttributedGraph::new(symmetric_random(4, 86), None).unwrap();
        let p = MatchingProblem::new(g.clone(), g, 0.0).unwrap();
        let id = Matrix::identity(4);
        let without = evaluate(&p, &id, None).unwrap();
        assert!(without.accuracy.is_none());
        let with = evaluate(&p, &id, Some(&id)).unwrap();
        assert_eq!(with.accuracy, Some(1.0));
    }
}
