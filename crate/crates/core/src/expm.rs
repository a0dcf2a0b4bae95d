//! General matrix exponential by scaling and squaring around a Taylor kernel.
//!
//! The input is scaled by `2^-s` until its 1-norm is at most 1, where the
//! degree-18 Taylor polynomial has truncation error below `1/19! ≈ 8e-18`,
//! then squared back `s` times.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[cfg(not(feature = "std"))]
use num_traits::Float;

const DEGREE: usize = 18;
const MAX_SQUARINGS: i32 = 1000;

pub(crate) fn expm(a: &Matrix) -> Result<Matrix> {
    let n = a.dim();
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::Overflow);
    }
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let s = if norm > 1.0 { norm.log2().ceil() as i32 } else { 0 };
    if s > MAX_SQUARINGS {
        return Err(Error::Overflow);
    }
    let scaled = a.scale_real(0.5f64.powi(s));

    // Horner: I + X(I + X/2(I + X/3(...)))
    let identity = Matrix::identity(n);
    let mut acc = identity.clone();
    for k in (1..=DEGREE).rev() {
        acc = identity.add(&scaled.matmul(&acc).scale_real(1.0 / k as f64));
    }
    for _ in 0..s {
        acc = acc.matmul(&acc);
        if !acc.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !acc.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(acc)
}
