//! Dense row-major matrix and the small numeric kernels shared by every
//! other module: Frobenius products and norms, marginal sums, matrix
//! products, CSV I/O.
//!
//! All reductions fold per-row partial sums in row order, so the
//! sequential and data-parallel code paths produce bit-identical results.

use crate::error::{FramError, Result};
use crate::precision::Rounder;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows below this count are multiplied sequentially even when the
/// `parallel` feature is enabled.
#[cfg(feature = "parallel")]
const PAR_MIN_ROWS: usize = 32;

/// Dense matrix of IEEE binary64 values in row-major order.
///
/// Shape is validated eagerly and all entries must be finite at
/// construction. There is no interior mutability: once a matrix is
/// shared, readers on any thread see a fixed value.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(FramError::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(FramError::Dimension(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(FramError::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// All-zero matrix. Panics on zero dimensions.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Uniform doubly stochastic matrix: every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "matrix dimensions must be positive");
        let v = 1.0 / n as f64;
        Self {
            rows: n,
            cols: n,
            data: vec![v; n * n],
        }
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Applies `f` to every entry, producing a new matrix.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Largest entry (not largest magnitude).
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(FramError::Dimension(format!(
                "expected identical shapes, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Frobenius inner product `sum_ij a_ij * b_ij`.
    pub fn frobenius_inner(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        let mut total = 0.0;
        for i in 0..self.rows {
            let a = self.row(i);
            let b = other.row(i);
            let mut partial = 0.0;
            for j in 0..self.cols {
                partial += a[j] * b[j];
            }
            total += partial;
        }
        Ok(total)
    }

    /// Frobenius norm `sqrt(<a, a>)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_inner(self).expect("same shape").sqrt()
    }

    /// Frobenius distance `||a - b||_F`.
    pub fn frobenius_distance(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        let mut total = 0.0;
        for i in 0..self.rows {
            let a = self.row(i);
            let b = other.row(i);
            let mut partial = 0.0;
            for j in 0..self.cols {
                let d = a[j] - b[j];
                partial += d * d;
            }
            total += partial;
        }
        Ok(total.sqrt())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sum of all entries, folded as row partial sums in row order.
    pub fn total_sum(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.rows {
            let mut partial = 0.0;
            for &v in self.row(i) {
                partial += v;
            }
            total += partial;
        }
        total
    }

    /// Per-row sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let mut s = 0.0;
                for &v in self.row(i) {
                    s += v;
                }
                s
            })
            .collect()
    }

    /// Per-column sums, each accumulated in row order.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..self.cols {
                sums[j] += row[j];
            }
        }
        sums
    }

    /// `a * b` with the default execution policy: row-parallel when the
    /// `parallel` feature is on and the matrix is large enough, otherwise
    /// sequential. Both paths produce bit-identical output because each
    /// output entry accumulates over `k` in ascending order.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.matmul_with(other, &crate::precision::ExactRound)
    }

    /// `a * b` forced onto the sequential path (benchmark baseline).
    pub fn matmul_seq(&self, other: &Matrix) -> Result<Matrix> {
        self.check_matmul(other)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            matmul_row(self.row(i), other, row_mut(&mut out, i), &crate::precision::ExactRound);
        }
        Ok(out)
    }

    /// `a * b` with every accumulator update passed through `rounder`.
    pub(crate) fn matmul_with<R: Rounder>(&self, other: &Matrix, rounder: &R) -> Result<Matrix> {
        self.check_matmul(other)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        let cols = other.cols;

        #[cfg(feature = "parallel")]
        {
            if self.rows >= PAR_MIN_ROWS {
                out.data
                    .par_chunks_mut(cols)
                    .enumerate()
                    .for_each(|(i, out_row)| {
                        matmul_row(self.row(i), other, out_row, rounder);
                    });
                rounder.check()?;
                return Ok(out);
            }
        }

        for i in 0..self.rows {
            matmul_row(self.row(i), other, &mut out.data[i * cols..(i + 1) * cols], rounder);
        }
        rounder.check()?;
        Ok(out)
    }

    fn check_matmul(&self, other: &Matrix) -> Result<()> {
        if self.cols != other.rows {
            return Err(FramError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Serializes as CSV: one row per line, comma-separated, no header.
    /// Entries are written with the shortest decimal representation that
    /// round-trips, so write-then-read is bit-stable.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{v}"));
            }
            s.push('\n');
        }
        s
    }

    /// Parses the CSV format written by [`Matrix::to_csv`].
    pub fn from_csv(text: &str) -> Result<Matrix> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| {
                        FramError::Parse(format!("line {}: {:?}: {e}", lineno + 1, tok))
                    })
                })
                .collect::<Result<_>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(FramError::Parse(format!(
                        "line {}: expected {} columns, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(FramError::Parse("empty matrix CSV".to_string()));
        }
        let r = rows.len();
        let c = rows[0].len();
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }
}

fn row_mut(m: &mut Matrix, i: usize) -> &mut [f64] {
    let c = m.cols;
    &mut m.data[i * c..(i + 1) * c]
}

/// One output row of a matrix product: `out[j] = sum_k a[k] * b[k][j]`,
/// accumulated in ascending `k`. Zero entries of `a` are skipped; this is
/// arithmetically neutral for the nonnegative matrices used here.
#[inline]
fn matmul_row<R: Rounder>(a_row: &[f64], b: &Matrix, out: &mut [f64], rounder: &R) {
    out.fill(0.0);
    for (k, &aik) in a_row.iter().enumerate() {
        if aik == 0.0 {
            continue;
        }
        let b_row = b.row(k);
        for j in 0..out.len() {
            out[j] = rounder.round(out[j] + aik * b_row[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_matrix, seeded_rng};
    use proptest::prelude::*;

    fn m(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::new(rows, cols, data.to_vec()).unwrap()
    }

    /// Distance in units in the last place between two finite doubles.
    fn ulp_diff(a: f64, b: f64) -> u64 {
        let to_ordered = |x: f64| {
            let bits = x.to_bits() as i64;
            if bits < 0 {
                i64::MIN - bits
            } else {
                bits
            }
        };
        (to_ordered(a) - to_ordered(b)).unsigned_abs()
    }

    #[test]
    fn construction_validates_shape_and_finiteness() {
        assert!(Matrix::new(0, 3, vec![]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(FramError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            Matrix::new(2, 1, vec![1.0, f64::INFINITY]),
            Err(FramError::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn frobenius_inner_cases() {
        let i2 = Matrix::identity(2);
        assert_eq!(i2.frobenius_inner(&i2).unwrap(), 2.0);

        let x = m(2, 2, &[3.0, -1.0, 0.5, 2.0]);
        let z = Matrix::zeros(2, 2);
        assert_eq!(x.frobenius_inner(&z).unwrap(), 0.0);

        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let ones = m(2, 2, &[1.0; 4]);
        assert_eq!(a.frobenius_inner(&ones).unwrap(), 10.0);

        assert!(a.frobenius_inner(&m(1, 4, &[0.0; 4])).is_err());
    }

    #[test]
    fn frobenius_norm_cases() {
        assert_eq!(Matrix::identity(3).frobenius_norm(), 3.0_f64.sqrt());
        assert_eq!(Matrix::zeros(4, 2).frobenius_norm(), 0.0);
        assert_eq!(m(1, 2, &[3.0, 4.0]).frobenius_norm(), 5.0);
    }

    #[test]
    fn total_sum_cases() {
        assert_eq!(Matrix::identity(2).total_sum(), 2.0);
        assert_eq!(Matrix::uniform(4).total_sum(), 4.0);
        assert_eq!(m(2, 2, &[1.0, 2.0, 3.0, 4.0]).total_sum(), 10.0);
    }

    #[test]
    fn marginal_sum_cases() {
        assert_eq!(Matrix::identity(3).row_sums(), vec![1.0, 1.0, 1.0]);
        assert_eq!(Matrix::uniform(2).col_sums(), vec![1.0, 1.0]);
        assert_eq!(m(2, 2, &[1.0, 2.0, 3.0, 4.0]).row_sums(), vec![3.0, 7.0]);
    }

    #[test]
    fn norm_squared_matches_inner_within_8_ulp() {
        let mut rng = seeded_rng(11, 0);
        for _ in 0..10 {
            let a = random_matrix(20, 20, &mut rng);
            let n2 = a.frobenius_norm().powi(2);
            let inner = a.frobenius_inner(&a).unwrap();
            assert!(
                ulp_diff(n2, inner) <= 8,
                "norm^2={n2} inner={inner} ulps={}",
                ulp_diff(n2, inner)
            );
        }
    }

    #[test]
    fn total_sum_consistent_with_marginals_within_8_ulp() {
        let mut rng = seeded_rng(12, 0);
        for _ in 0..10 {
            let a = random_matrix(20, 20, &mut rng);
            let t = a.total_sum();
            let by_rows: f64 = a.row_sums().iter().sum();
            let by_cols: f64 = a.col_sums().iter().sum();
            assert!(ulp_diff(t, by_rows) <= 8);
            assert!(ulp_diff(t, by_cols) <= 8);
        }
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = seeded_rng(13, 0);
        let a = random_matrix(5, 4, &mut rng);
        let b = random_matrix(4, 6, &mut rng);
        let c = a.matmul(&b).unwrap();
        for i in 0..5 {
            for j in 0..6 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a.get(i, k) * b.get(k, j);
                }
                assert_eq!(c.get(i, j), acc, "entry ({i},{j})");
            }
        }
        assert!(a.matmul(&random_matrix(5, 5, &mut rng)).is_err());
    }

    #[test]
    fn matmul_seq_and_default_agree_bitwise() {
        let mut rng = seeded_rng(14, 0);
        for n in [3usize, 33, 64] {
            let a = random_matrix(n, n, &mut rng);
            let b = random_matrix(n, n, &mut rng);
            let fast = a.matmul(&b).unwrap();
            let seq = a.matmul_seq(&b).unwrap();
            assert_eq!(fast, seq, "n={n}");
        }
    }

    #[test]
    fn transpose_round_trip() {
        let mut rng = seeded_rng(15, 0);
        let a = random_matrix(4, 7, &mut rng);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(Matrix::from_csv("").is_err());
        assert!(Matrix::from_csv("1,2\n3\n").is_err());
        assert!(Matrix::from_csv("1,x\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_stable(seed in 0u64..1000) {
            let mut rng = seeded_rng(seed, 9);
            let a = random_matrix(3, 5, &mut rng).map(|v| (v - 0.5) * 1e6);
            let back = Matrix::from_csv(&a.to_csv()).unwrap();
            prop_assert_eq!(a, back);
        }

        #[test]
        fn inner_product_is_symmetric(seed in 0u64..1000) {
            let mut rng = seeded_rng(seed, 10);
            let a = random_matrix(6, 6, &mut rng);
            let b = random_matrix(6, 6, &mut rng);
            let ab = a.frobenius_inner(&b).unwrap();
            let ba = b.frobenius_inner(&a).unwrap();
            prop_assert_eq!(ab, ba);
        }
    }
}
