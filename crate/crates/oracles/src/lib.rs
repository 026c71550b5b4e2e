//! Independent brute-force references for the matching test suites.
//!
//! Nothing here shares an algorithm with the implementation it checks:
//! the affine projection is solved through the KKT system with a dense
//! SVD instead of the closed form, and the quadratic objective is
//! evaluated by direct double summation over permutations enumerated
//! exhaustively. Exhaustive linear assignment and the Dykstra projector
//! live in `fram-core` and are re-exported here so the test plan has one
//! place to find every oracle.

use fram_core::error::{FramError, Result};
use fram_core::graph::MatchingProblem;
use fram_core::matrix::Matrix;
use nalgebra::{DMatrix, DVector};

pub use fram_core::assignment::brute_force_max as lap_brute_force;
pub use fram_core::projection::dykstra_project;

/// Hard limits for the exhaustive routines.
#[derive(Debug, Clone)]
pub struct OracleBudget {
    pub qap_max_n: usize,
    pub lap_max_n: usize,
    pub dykstra_max_iters: usize,
    pub tol: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            qap_max_n: QAP_MAX_N,
            lap_max_n: fram_core::assignment::BRUTE_FORCE_MAX_N,
            dykstra_max_iters: 100_000,
            tol: 1e-12,
        }
    }
}

pub const QAP_MAX_N: usize = 6;

/// Exact maximizer of the matching objective over all permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct QapSolution {
    pub perm: Vec<usize>,
    pub objective: f64,
}

/// Exhaustive quadratic assignment: enumerates every permutation in
/// lexicographic order (ties keep the first, hence smallest) and scores
/// each by direct double summation
/// `1/2 sum_ij A_ij A~_{p(i) p(j)} + lambda sum_i K_{i p(i)}`.
pub fn qap_brute_force(p: &MatchingProblem) -> Result<QapSolution> {
    let n = p.n();
    if n > QAP_MAX_N {
        return Err(FramError::SizeLimit { n, max: QAP_MAX_N });
    }
    let a = p.g().adjacency();
    let at = p.g_tilde().adjacency();
    let k = p.similarity();
    let lambda = p.lambda();

    let mut best: Option<QapSolution> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut edge = 0.0;
        for i in 0..n {
            for j in 0..n {
                edge += a.get(i, j) * at.get(perm[i], perm[j]);
            }
        }
        let mut node = 0.0;
        for i in 0..n {
            node += k.get(i, perm[i]);
        }
        let objective = 0.5 * edge + lambda * node;
        if best.as_ref().map_or(true, |b| objective > b.objective) {
            best = Some(QapSolution {
                perm: perm.clone(),
                objective,
            });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one permutation"))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
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

/// Projection onto `{Y : Y1 = Y^T 1 = 1}` through the KKT system.
///
/// With multipliers `mu`, `nu` the stationary point is
/// `Y = X + mu 1^T + 1 nu^T`, and the constraints give the 2n x 2n
/// system
///
/// ```text
/// [ nI   11^T ] [mu]   [ 1 - X 1    ]
/// [ 11^T  nI  ] [nu] = [ 1 - X^T 1  ]
/// ```
///
/// which is rank deficient by one (shifting mass between `mu` and `nu`
/// leaves `Y` unchanged); the SVD least-squares solve picks the
/// minimum-norm multipliers.
pub fn affine_projection_kkt(x: &Matrix) -> Result<Matrix> {
    if !x.is_square() {
        return Err(FramError::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let n = x.rows();
    let nf = n as f64;
    let row_sums = x.row_sums();
    let col_sums = x.col_sums();

    let mut system = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut rhs = DVector::<f64>::zeros(2 * n);
    for i in 0..n {
        system[(i, i)] = nf;
        for j in 0..n {
            system[(i, n + j)] = 1.0;
        }
        rhs[i] = 1.0 - row_sums[i];
    }
    for j in 0..n {
        system[(n + j, n + j)] = nf;
        for i in 0..n {
            system[(n + j, i)] = 1.0;
        }
        rhs[n + j] = 1.0 - col_sums[j];
    }

    let svd = system.svd(true, true);
    let solution = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| FramError::Degenerate(format!("SVD solve failed: {e}")))?;

    let mu = solution.rows(0, n);
    let nu = solution.rows(n, n);
    Ok(Matrix::from_fn(n, n, |i, j| x.get(i, j) + mu[i] + nu[j]))
}
