//! Software emulation of reduced-precision floating-point execution.
//!
//! Narrow formats are emulated on binary64 carriers: every arithmetic
//! result is re-rounded to the target format (round-to-nearest-even at
//! the format's mantissa width, subnormals flushed to zero). The same
//! generic kernels run the exact FP64 path with an identity rounder, so
//! the all-FP64 policy is bit-identical to the plain solver by
//! construction.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{FramError, Result};
use crate::graph::MatchingProblem;
use crate::matrix::Matrix;
use crate::projection::{self, ProjectionTrace, SdsnConfig};
use crate::solver::{FramConfig, MatchResult};

/// A binary floating-point format described by its exponent and stored
/// (explicit) mantissa widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatFormat {
    pub name: &'static str,
    pub exponent_bits: u32,
    pub mantissa_bits: u32,
}

/// IEEE binary64.
pub const FP64: FloatFormat = FloatFormat {
    name: "fp64",
    exponent_bits: 11,
    mantissa_bits: 52,
};

/// IEEE binary32.
pub const FP32: FloatFormat = FloatFormat {
    name: "fp32",
    exponent_bits: 8,
    mantissa_bits: 23,
};

/// TensorFloat-32: binary32 exponent range with a 10-bit mantissa.
pub const TF32: FloatFormat = FloatFormat {
    name: "tf32",
    exponent_bits: 8,
    mantissa_bits: 10,
};

/// bfloat16.
pub const BF16: FloatFormat = FloatFormat {
    name: "bf16",
    exponent_bits: 8,
    mantissa_bits: 7,
};

/// IEEE binary16.
pub const FP16: FloatFormat = FloatFormat {
    name: "fp16",
    exponent_bits: 5,
    mantissa_bits: 10,
};

impl FloatFormat {
    /// Looks up a built-in format by its lowercase name.
    pub fn by_name(name: &str) -> Option<FloatFormat> {
        match name {
            "fp64" => Some(FP64),
            "fp32" => Some(FP32),
            "tf32" => Some(TF32),
            "bf16" => Some(BF16),
            "fp16" => Some(FP16),
            _ => None,
        }
    }

    /// Largest unbiased exponent of a normal value.
    fn exp_max(&self) -> i32 {
        (1i32 << (self.exponent_bits - 1)) - 1
    }

    /// Smallest unbiased exponent of a normal value.
    fn exp_min(&self) -> i32 {
        1 - self.exp_max()
    }

    /// True when rounding to this format is the identity on binary64.
    pub fn is_host(&self) -> bool {
        self.mantissa_bits >= 52 && self.exponent_bits >= 11
    }
}

/// Rounds the trailing `52 - mantissa_bits` bits of the binary64
/// representation, ties to even. Carries may propagate into the exponent
/// field, which correctly rounds up to the next binade (or to infinity,
/// caught by the caller).
fn round_mantissa_rne(x: f64, mantissa_bits: u32) -> f64 {
    let shift = 52 - mantissa_bits;
    let bits = x.to_bits();
    let mask = (1u64 << shift) - 1;
    let tail = bits & mask;
    let half = 1u64 << (shift - 1);
    let mut out = bits & !mask;
    if tail > half || (tail == half && (out >> shift) & 1 == 1) {
        out += 1u64 << shift;
    }
    f64::from_bits(out)
}

fn unbiased_exp(x: f64) -> i32 {
    let field = ((x.to_bits() >> 52) & 0x7ff) as i32;
    if field == 0 {
        // Subnormal in the binary64 carrier: below every emulated
        // format's normal range.
        i32::MIN / 2
    } else {
        field - 1023
    }
}

/// Rounds `x` to the nearest representable value of `fmt`.
///
/// Round-to-nearest-even at the format's mantissa width; values whose
/// rounded exponent falls below the format's minimum normal are flushed
/// to zero; values beyond the exponent range are a range error.
/// Rounding to FP64 is the identity.
pub fn round_to_format(x: f64, fmt: &FloatFormat) -> Result<f64> {
    if !x.is_finite() {
        return Err(FramError::Range {
            value: x,
            format: fmt.name,
        });
    }
    if fmt.is_host() {
        return Ok(x);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let y = round_mantissa_rne(x, fmt.mantissa_bits);
    if y.is_infinite() {
        return Err(FramError::Range {
            value: x,
            format: fmt.name,
        });
    }
    let e = unbiased_exp(y);
    if e > fmt.exp_max() {
        return Err(FramError::Range {
            value: x,
            format: fmt.name,
        });
    }
    if e < fmt.exp_min() {
        return Ok(0.0);
    }
    Ok(y)
}

/// Rounds every entry of a matrix, propagating range errors.
pub fn round_matrix(m: &Matrix, fmt: &FloatFormat) -> Result<Matrix> {
    if fmt.is_host() {
        return Ok(m.clone());
    }
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for &v in m.row(i) {
            data.push(round_to_format(v, fmt)?);
        }
    }
    Matrix::new(m.rows(), m.cols(), data)
}

/// Post-operation rounding hook threaded through the shared numeric
/// kernels. The identity rounder compiles away, keeping the exact path
/// at full speed.
pub(crate) trait Rounder: Sync {
    fn round(&self, x: f64) -> f64;
    fn check(&self) -> Result<()>;
}

/// Identity: the exact binary64 path.
pub(crate) struct ExactRound;

impl Rounder for ExactRound {
    #[inline(always)]
    fn round(&self, x: f64) -> f64 {
        x
    }

    #[inline(always)]
    fn check(&self) -> Result<()> {
        Ok(())
    }
}

/// Rounds every result to a fixed format, latching an overflow flag
/// instead of failing mid-kernel; `check` surfaces the latched error.
pub(crate) struct FormatRound {
    fmt: FloatFormat,
    overflow: AtomicBool,
}

impl FormatRound {
    pub(crate) fn new(fmt: FloatFormat) -> Self {
        Self {
            fmt,
            overflow: AtomicBool::new(false),
        }
    }
}

impl Rounder for FormatRound {
    #[inline]
    fn round(&self, x: f64) -> f64 {
        match round_to_format(x, &self.fmt) {
            Ok(v) => v,
            Err(_) => {
                self.overflow.store(true, Ordering::Relaxed);
                if x.is_sign_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn check(&self) -> Result<()> {
        if self.overflow.load(Ordering::Relaxed) {
            Err(FramError::Range {
                value: f64::INFINITY,
                format: self.fmt.name,
            })
        } else {
            Ok(())
        }
    }
}

/// Per-step format assignment for the mixed-precision solver.
///
/// `gradient_fmt` narrows matmul inputs, `accumulate_fmt` rounds each
/// accumulator update (tensor-core style: narrow inputs, wider
/// accumulator), `projection_fmt` drives every arithmetic step inside the
/// projection, and `update_fmt` covers preconditioning, the convex
/// update, and the stopping criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub gradient_fmt: FloatFormat,
    pub projection_fmt: FloatFormat,
    pub update_fmt: FloatFormat,
    pub accumulate_fmt: FloatFormat,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self::mixed()
    }
}

impl PrecisionPolicy {
    /// The default mixed policy: TF32 matmul inputs with FP32
    /// accumulation, FP32 projection, FP64 updates.
    pub fn mixed() -> Self {
        Self {
            gradient_fmt: TF32,
            projection_fmt: FP32,
            update_fmt: FP64,
            accumulate_fmt: FP32,
        }
    }

    /// Everything in binary64; bit-identical to the plain solver.
    pub fn fp64() -> Self {
        Self {
            gradient_fmt: FP64,
            projection_fmt: FP64,
            update_fmt: FP64,
            accumulate_fmt: FP64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.update_fmt.mantissa_bits < self.projection_fmt.mantissa_bits {
            return Err(FramError::Config(format!(
                "update format {} must be at least as wide as projection format {}",
                self.update_fmt.name, self.projection_fmt.name
            )));
        }
        Ok(())
    }
}

/// Matrix product with tensor-core-style emulation: inputs rounded to
/// `gradient_fmt`, products formed exactly in binary64, accumulator
/// rounded to `accumulate_fmt` after each addition.
pub fn matmul_emulated(a: &Matrix, b: &Matrix, pol: &PrecisionPolicy) -> Result<Matrix> {
    pol.validate()?;
    let ra = round_matrix(a, &pol.gradient_fmt)?;
    let rb = round_matrix(b, &pol.gradient_fmt)?;
    let acc = FormatRound::new(pol.accumulate_fmt);
    ra.matmul_with(&rb, &acc)
}

/// SDSN with every intermediate arithmetic step rounded to
/// `projection_fmt`. Same contract as [`projection::sdsn`].
pub fn sdsn_mixed(
    x: &Matrix,
    cfg: &SdsnConfig,
    pol: &PrecisionPolicy,
) -> Result<(Matrix, ProjectionTrace)> {
    pol.validate()?;
    let rounder = FormatRound::new(pol.projection_fmt);
    let out = projection::sdsn_with(x, cfg, &rounder)?;
    rounder.check()?;
    Ok(out)
}

/// The full matching solve under a mixed-precision policy. With the
/// all-FP64 policy this is bit-identical to
/// [`crate::solver::fram_match`].
pub fn fram_mixed(
    p: &MatchingProblem,
    cfg: &FramConfig,
    pol: &PrecisionPolicy,
) -> Result<MatchResult> {
    pol.validate()?;
    crate::solver::solve_impl(p, cfg, Some(pol))
}
