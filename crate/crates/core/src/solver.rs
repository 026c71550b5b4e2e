//! The outer projected fixed-point loop: max-preconditioning, gradient,
//! inner projection (scaling normalization or the fixed-budget baseline),
//! convex update, and the normalized stopping criterion, followed by
//! Hungarian discretization.

use std::time::Instant;

use crate::assignment::{assignment_to_matrix, hungarian_max, Assignment};
use crate::error::{FramError, Result};
use crate::graph::{objective, MatchingProblem};
use crate::matrix::Matrix;
use crate::metrics::matching_error;
use crate::precision::{
    matmul_emulated, round_to_format, ExactRound, FormatRound, PrecisionPolicy, Rounder,
};
use crate::projection::{dsn_fixed_with, sdsn_with, SdsnConfig};

/// Which inner projection drives the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Scaling doubly stochastic normalization with the mass criterion.
    Fram,
    /// Unscaled normalization with a fixed iteration budget (the
    /// baseline this method descends from).
    Dspfp,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Fram => "fram",
            Variant::Dspfp => "dspfp",
        }
    }

    pub fn by_name(name: &str) -> Option<Variant> {
        match name {
            "fram" => Some(Variant::Fram),
            "dspfp" => Some(Variant::Dspfp),
            _ => None,
        }
    }
}

/// Solver configuration. `lambda` is the node-term weight applied when
/// callers construct problems; during a solve the problem's own lambda
/// governs, keeping the optimized and reported objectives consistent.
#[derive(Debug, Clone)]
pub struct FramConfig {
    pub theta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub delta_th: f64,
    pub gamma_th: f64,
    pub max_outer: usize,
    pub sdsn_max: usize,
    pub variant: Variant,
    pub dsn_iters: usize,
}

impl Default for FramConfig {
    fn default() -> Self {
        Self {
            theta: 2.0,
            alpha: 0.95,
            lambda: 1.0,
            delta_th: 1e-4,
            gamma_th: 1e-3,
            max_outer: 100,
            sdsn_max: 1000,
            variant: Variant::Fram,
            dsn_iters: 30,
        }
    }
}

impl FramConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(FramError::Config(format!("theta must be positive, got {}", self.theta)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(FramError::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(FramError::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.delta_th > 0.0) {
            return Err(FramError::Config(format!(
                "delta threshold must be positive, got {}",
                self.delta_th
            )));
        }
        if !(self.gamma_th > 0.0 && self.gamma_th < 1.0) {
            return Err(FramError::Config(format!(
                "gamma threshold must lie in (0, 1), got {}",
                self.gamma_th
            )));
        }
        if self.max_outer == 0 || self.sdsn_max == 0 || self.dsn_iters == 0 {
            return Err(FramError::Config("iteration caps must be positive".to_string()));
        }
        Ok(())
    }

    fn sdsn_config(&self) -> SdsnConfig {
        SdsnConfig::new(self.theta, self.gamma_th, self.sdsn_max)
    }
}

/// One outer iteration of the trace. `objective` is the matching
/// objective of the iterate the step started from (free via the
/// preconditioning identity); `wall_ms` is the only nondeterministic
/// field.
#[derive(Debug, Clone)]
pub struct OuterRecord {
    pub delta: f64,
    pub objective: f64,
    pub inner_iterations: usize,
    pub wall_ms: f64,
}

/// Result of a matching solve.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub assignment: Assignment,
    pub n_final: Matrix,
    /// Objective of the discretized matching, recomputed on the
    /// unscaled problem.
    pub objective: f64,
    pub matching_error: f64,
    /// Populated by callers holding ground truth.
    pub accuracy: Option<f64>,
    pub converged: bool,
    pub outer_iters: usize,
    pub trace: Vec<OuterRecord>,
}

impl MatchResult {
    /// Total inner projection iterations across the outer loop.
    pub fn inner_iterations_total(&self) -> usize {
        self.trace.iter().map(|r| r.inner_iterations).sum()
    }

    /// Equality up to the nondeterministic wall-clock fields.
    pub fn same_outcome(&self, other: &MatchResult) -> bool {
        self.assignment == other.assignment
            && self.n_final == other.n_final
            && self.objective == other.objective
            && self.matching_error == other.matching_error
            && self.converged == other.converged
            && self.outer_iters == other.outer_iters
            && self.trace.len() == other.trace.len()
            && self
                .trace
                .iter()
                .zip(&other.trace)
                .all(|(a, b)| {
                    a.delta == b.delta
                        && a.objective == b.objective
                        && a.inner_iterations == b.inner_iterations
                })
    }
}

/// Max-scaling preconditioning: `c = max(A, A~, K)`, `A' = A/sqrt(c)`,
/// `A~' = A~/sqrt(c)`, `K' = K/c`. Leaves the gradient scaled by `1/c`.
pub fn precondition(p: &MatchingProblem) -> Result<(Matrix, Matrix, Matrix, f64)> {
    precondition_with(p, &ExactRound)
}

fn precondition_with<R: Rounder>(
    p: &MatchingProblem,
    rnd: &R,
) -> Result<(Matrix, Matrix, Matrix, f64)> {
    let a = p.g().adjacency();
    let at = p.g_tilde().adjacency();
    let k = p.similarity();
    let c = a.max_entry().max(at.max_entry()).max(k.max_entry());
    if c == 0.0 {
        return Err(FramError::Degenerate(
            "all attribute and similarity entries are zero".to_string(),
        ));
    }
    let sqrt_c = rnd.round(c.sqrt());
    let a_s = a.map(|v| rnd.round(v / sqrt_c));
    let at_s = at.map(|v| rnd.round(v / sqrt_c));
    let k_s = k.map(|v| rnd.round(v / c));
    rnd.check()?;
    Ok((a_s, at_s, k_s, c))
}

/// The fixed-point gradient `X = A' N A~' + lambda K'`; nonnegative for
/// nonnegative inputs.
pub fn gradient(
    a: &Matrix,
    at: &Matrix,
    k: &Matrix,
    n: &Matrix,
    lambda: f64,
) -> Result<Matrix> {
    let t = a.matmul(n)?.matmul(at)?;
    if t.shape() != k.shape() {
        return Err(FramError::Dimension(format!(
            "gradient shape {:?} does not match similarity shape {:?}",
            t.shape(),
            k.shape()
        )));
    }
    Ok(Matrix::from_fn(t.rows(), t.cols(), |i, j| {
        t.get(i, j) + lambda * k.get(i, j)
    }))
}

fn gradient_emulated(
    a: &Matrix,
    at: &Matrix,
    k: &Matrix,
    n: &Matrix,
    lambda: f64,
    pol: &PrecisionPolicy,
) -> Result<Matrix> {
    let t1 = matmul_emulated(a, n, pol)?;
    let t = matmul_emulated(&t1, at, pol)?;
    if t.shape() != k.shape() {
        return Err(FramError::Dimension(format!(
            "gradient shape {:?} does not match similarity shape {:?}",
            t.shape(),
            k.shape()
        )));
    }
    let mut out = Matrix::zeros(t.rows(), t.cols());
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            let term = round_to_format(lambda * k.get(i, j), &pol.gradient_fmt)?;
            out.set(
                i,
                j,
                round_to_format(t.get(i, j) + term, &pol.accumulate_fmt)?,
            );
        }
    }
    Ok(out)
}

fn update_and_delta<R: Rounder>(
    n_prev: &Matrix,
    d: &Matrix,
    alpha: f64,
    rnd: &R,
) -> (Matrix, f64) {
    let size = n_prev.rows();
    let one_minus = rnd.round(1.0 - alpha);
    let n_new = Matrix::from_fn(size, size, |i, j| {
        let keep = rnd.round(one_minus * n_prev.get(i, j));
        let step = rnd.round(alpha * d.get(i, j));
        rnd.round(keep + step)
    });
    let mut num_sq = 0.0;
    let mut den_sq = 0.0;
    for i in 0..size {
        let mut num_partial = 0.0;
        let mut den_partial = 0.0;
        for j in 0..size {
            let v = n_new.get(i, j);
            let diff = rnd.round(v - n_prev.get(i, j));
            num_partial = rnd.round(num_partial + rnd.round(diff * diff));
            den_partial = rnd.round(den_partial + rnd.round(v * v));
        }
        num_sq = rnd.round(num_sq + num_partial);
        den_sq = rnd.round(den_sq + den_partial);
    }
    let delta = rnd.round(rnd.round(num_sq.sqrt()) / rnd.round(den_sq.sqrt()));
    (n_new, delta)
}

/// Runs the matching solve in plain binary64.
pub fn fram_match(p: &MatchingProblem, cfg: &FramConfig) -> Result<MatchResult> {
    solve_impl(p, cfg, None)
}

pub(crate) fn solve_impl(
    p: &MatchingProblem,
    cfg: &FramConfig,
    pol: Option<&PrecisionPolicy>,
) -> Result<MatchResult> {
    cfg.validate()?;
    let lambda = p.lambda();
    let size = p.n();

    let update_rounder = pol.map(|pl| FormatRound::new(pl.update_fmt));
    let (a, at, k, c) = match &update_rounder {
        None => precondition_with(p, &ExactRound)?,
        Some(r) => precondition_with(p, r)?,
    };

    let sdsn_cfg = cfg.sdsn_config();
    let mut n_cur = Matrix::uniform(size);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut outer_iters = 0;

    for t in 1..=cfg.max_outer {
        let started = Instant::now();
        let x = match pol {
            None => gradient(&a, &at, &k, &n_cur, lambda)?,
            Some(pl) => gradient_emulated(&a, &at, &k, &n_cur, lambda, pl)?,
        };

        // Objective of the entering iterate, via the preconditioning
        // identity Phi(N) = c (<X, N>/2 + lambda <K', N>/2); diagnostic,
        // always evaluated in binary64.
        let phi = c * (0.5 * x.frobenius_inner(&n_cur)? + 0.5 * lambda * k.frobenius_inner(&n_cur)?);

        let (d, inner_iterations) = match cfg.variant {
            Variant::Fram => {
                let (d, tr) = match pol {
                    None => sdsn_with(&x, &sdsn_cfg, &ExactRound)?,
                    Some(pl) => {
                        let rounder = FormatRound::new(pl.projection_fmt);
                        let out = sdsn_with(&x, &sdsn_cfg, &rounder)?;
                        rounder.check()?;
                        out
                    }
                };
                (d, tr.iterations)
            }
            Variant::Dspfp => {
                let d = match pol {
                    None => dsn_fixed_with(&x, cfg.dsn_iters, &ExactRound)?,
                    Some(pl) => {
                        let rounder = FormatRound::new(pl.projection_fmt);
                        let out = dsn_fixed_with(&x, cfg.dsn_iters, &rounder)?;
                        rounder.check()?;
                        out
                    }
                };
                (d, cfg.dsn_iters)
            }
        };

        let (n_new, delta) = match &update_rounder {
            None => update_and_delta(&n_cur, &d, cfg.alpha, &ExactRound),
            Some(r) => update_and_delta(&n_cur, &d, cfg.alpha, r),
        };
        if let Some(r) = &update_rounder {
            r.check()?;
        }

        trace.push(OuterRecord {
            delta,
            objective: phi,
            inner_iterations,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        n_cur = n_new;
        outer_iters = t;
        if delta <= cfg.delta_th {
            converged = true;
            break;
        }
    }

    let assignment = hungarian_max(&n_cur)?;
    let m = assignment_to_matrix(&assignment, size);
    Ok(MatchResult {
        objective: objective(p, &m)?,
        matching_error: matching_error(p, &m)?,
        assignment,
        n_final: n_cur,
        accuracy: None,
        converged,
        outer_iters,
        trace,
    })
}
