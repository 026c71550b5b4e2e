//! Attributed graphs, matching problems, and the quadratic matching
//! objective.

use serde::{Deserialize, Serialize};

use crate::error::{FramError, Result};
use crate::matrix::Matrix;

const SYMMETRY_TOL: f64 = 1e-12;

/// Undirected attributed graph: a nonnegative symmetric edge attribute
/// matrix plus an optional nonnegative node feature matrix.
#[derive(Debug, Clone)]
pub struct AttributedGraph {
    n: usize,
    adjacency: Matrix,
    features: Option<Matrix>,
}

impl AttributedGraph {
    /// Validates symmetry (within 1e-12 per entry) and nonnegativity of
    /// the edge attributes, and nonnegativity plus row count of the
    /// features.
    pub fn new(adjacency: Matrix, features: Option<Matrix>) -> Result<Self> {
        if !adjacency.is_square() {
            return Err(FramError::NotSquare {
                rows: adjacency.rows(),
                cols: adjacency.cols(),
            });
        }
        let n = adjacency.rows();
        for i in 0..n {
            for j in 0..n {
                let v = adjacency.get(i, j);
                if v < 0.0 {
                    return Err(FramError::Negative {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                if j > i {
                    let w = adjacency.get(j, i);
                    if (v - w).abs() > SYMMETRY_TOL {
                        return Err(FramError::NotSymmetric {
                            row: i,
                            col: j,
                            lhs: v,
                            rhs: w,
                        });
                    }
                }
            }
        }
        if let Some(f) = &features {
            if f.rows() != n {
                return Err(FramError::Dimension(format!(
                    "feature matrix has {} rows for a {n}-node graph",
                    f.rows()
                )));
            }
            for i in 0..f.rows() {
                for (j, &v) in f.row(i).iter().enumerate() {
                    if v < 0.0 {
                        return Err(FramError::Negative {
                            row: i,
                            col: j,
                            value: v,
                        });
                    }
                }
            }
        }
        Ok(Self {
            n,
            adjacency,
            features,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn features(&self) -> Option<&Matrix> {
        self.features.as_ref()
    }

    /// Number of undirected edges (nonzero strict upper-triangle entries).
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacency.get(i, j) != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// A pair of graphs to match, with the node-similarity matrix
/// `K = F F~^T` precomputed (zero when the graphs carry no features).
#[derive(Debug, Clone)]
pub struct MatchingProblem {
    g: AttributedGraph,
    g_tilde: AttributedGraph,
    lambda: f64,
    similarity: Matrix,
}

impl MatchingProblem {
    pub fn new(g: AttributedGraph, g_tilde: AttributedGraph, lambda: f64) -> Result<Self> {
        if g.node_count() != g_tilde.node_count() {
            return Err(FramError::Dimension(format!(
                "graphs must have equal node counts, got {} and {}",
                g.node_count(),
                g_tilde.node_count()
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(FramError::Config(format!("lambda must be >= 0, got {lambda}")));
        }
        let similarity = match (g.features(), g_tilde.features()) {
            (Some(f), Some(ft)) => node_similarity(f, ft)?,
            (None, None) => Matrix::zeros(g.node_count(), g.node_count()),
            _ => {
                return Err(FramError::Dimension(
                    "one graph has node features and the other does not".to_string(),
                ))
            }
        };
        Ok(Self {
            g,
            g_tilde,
            lambda,
            similarity,
        })
    }

    pub fn n(&self) -> usize {
        self.g.node_count()
    }

    pub fn g(&self) -> &AttributedGraph {
        &self.g
    }

    pub fn g_tilde(&self) -> &AttributedGraph {
        &self.g_tilde
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The precomputed node-similarity matrix K.
    pub fn similarity(&self) -> &Matrix {
        &self.similarity
    }
}

/// Node-similarity matrix `K = F F~^T` (shape n x n~).
pub fn node_similarity(f: &Matrix, f_tilde: &Matrix) -> Result<Matrix> {
    if f.cols() != f_tilde.cols() {
        return Err(FramError::Dimension(format!(
            "feature dimensions differ: {} vs {}",
            f.cols(),
            f_tilde.cols()
        )));
    }
    f.matmul(&f_tilde.transpose())
}

/// The matching objective `1/2 <N^T A N, A~> + lambda <N, K>`.
pub fn objective(p: &MatchingProblem, n: &Matrix) -> Result<f64> {
    if n.rows() != p.n() || n.cols() != p.n() {
        return Err(FramError::Dimension(format!(
            "N must be {0}x{0}, got {1}x{2}",
            p.n(),
            n.rows(),
            n.cols()
        )));
    }
    // <N^T A N, A~> = <A N, N A~> for symmetric A, A~.
    let an = p.g.adjacency().matmul(n)?;
    let na = n.matmul(p.g_tilde.adjacency())?;
    let edge_term = an.frobenius_inner(&na)?;
    let node_term = n.frobenius_inner(&p.similarity)?;
    Ok(0.5 * edge_term + p.lambda * node_term)
}

/// Serialized graph schema:
/// `{"n": int, "edges": [[i, j, w], ...], "features": [[...], ...] | null}`
/// with 0-based indices. The loader stores `w` at both `(i, j)` and
/// `(j, i)` and rejects negative weights.
#[derive(Debug, Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    features: Option<Vec<Vec<f64>>>,
}

/// Parses a graph from its JSON representation.
pub fn graph_from_json(text: &str) -> Result<AttributedGraph> {
    let raw: GraphJson =
        serde_json::from_str(text).map_err(|e| FramError::Parse(format!("graph JSON: {e}")))?;
    if raw.n == 0 {
        return Err(FramError::Parse("graph must have at least one node".to_string()));
    }
    let mut adj = Matrix::zeros(raw.n, raw.n);
    for &(i, j, w) in &raw.edges {
        if i >= raw.n || j >= raw.n {
            return Err(FramError::Parse(format!(
                "edge ({i}, {j}) out of range for n={}",
                raw.n
            )));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(FramError::Parse(format!(
                "edge ({i}, {j}) has invalid weight {w}"
            )));
        }
        adj.set(i, j, w);
        adj.set(j, i, w);
    }
    let features = match raw.features {
        None => None,
        Some(rows) => {
            if rows.len() != raw.n {
                return Err(FramError::Parse(format!(
                    "expected {} feature rows, found {}",
                    raw.n,
                    rows.len()
                )));
            }
            let d = rows.first().map(|r| r.len()).unwrap_or(0);
            if d == 0 {
                return Err(FramError::Parse("feature rows must be nonempty".to_string()));
            }
            if rows.iter().any(|r| r.len() != d) {
                return Err(FramError::Parse("ragged feature rows".to_string()));
            }
            Some(Matrix::new(raw.n, d, rows.into_iter().flatten().collect())?)
        }
    };
    AttributedGraph::new(adj, features)
}

/// Serializes a graph to the JSON schema read by [`graph_from_json`].
/// Edges are emitted from the upper triangle (including the diagonal).
pub fn graph_to_json(g: &AttributedGraph) -> String {
    let n = g.node_count();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            let w = g.adjacency().get(i, j);
            if w != 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    let features = g
        .features()
        .map(|f| (0..f.rows()).map(|i| f.row(i).to_vec()).collect::<Vec<_>>());
    serde_json::to_string(&GraphJson { n, edges, features }).expect("serialization")
}
