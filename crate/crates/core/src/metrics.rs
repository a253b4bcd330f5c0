//! Inner products and the Matrix Hamming distance on level tensors.
//!
//! All quantities count each unordered pair once and skip level 0, so they
//! are half of the corresponding ordered-pair sums.

use crate::error::{Error, Result};
use crate::hctree::{LevelIndicator, LevelTensor};

/// `‖X‖²` shared by every tree on `n` leaves: `(n³ - n)/3 - n(n-1)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormConstant {
    pub n: usize,
    pub value: u64,
}

impl NormConstant {
    pub fn new(n: usize) -> Self {
        let m = n as u64;
        NormConstant {
            n,
            value: (m * m * m - m) / 3 - m * m.saturating_sub(1) / 2,
        }
    }
}

fn check_dims<A, B>(x: &LevelTensor<A>, y: &LevelTensor<B>) -> Result<()>
where
    A: Copy,
    B: Copy,
{
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    Ok(())
}

/// `Σ_{i<j} Σ_t x(i,j,t)·y(i,j,t)`, summed pair-major, level-minor.
pub fn inner_product<A, B>(x: &LevelTensor<A>, y: &LevelTensor<B>) -> Result<f64>
where
    A: Copy + Into<f64>,
    B: Copy + Into<f64>,
{
    check_dims(x, y)?;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .fold(0.0, |acc, (&a, &b)| acc + a.into() * b.into()))
}

/// Exact integer inner product of two indicators.
pub fn inner_product_count(x: &LevelIndicator, y: &LevelIndicator) -> Result<u64> {
    check_dims(x, y)?;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .map(|(&a, &b)| u64::from(a & b))
        .sum())
}

pub fn norm_sq(x: &LevelIndicator) -> u64 {
    x.values().iter().map(|&v| u64::from(v)).sum()
}

/// Number of entries in which the two indicators differ.
pub fn hamming(x: &LevelIndicator, y: &LevelIndicator) -> Result<u64> {
    check_dims(x, y)?;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .filter(|(a, b)| a != b)
        .count() as u64)
}

/// Hamming distance restricted to each level; index 0 is level 1.
pub fn hamming_by_level(x: &LevelIndicator, y: &LevelIndicator) -> Result<Vec<u64>> {
    check_dims(x, y)?;
    let levels = x.levels();
    let mut out = vec![0u64; levels];
    for (k, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
        if a != b {
            out[k % levels] += 1;
        }
    }
    Ok(out)
}

/// Default slack allowed when `delta` overshoots the norm constant.
pub const RADIUS_TOLERANCE: f64 = 1e-6;

/// `ε = 2 (‖X‖² - δ)`, clamped at zero when `delta` exceeds the constant by
/// no more than `tolerance`.
pub fn optimality_radius(n: usize, delta: f64, tolerance: f64) -> Result<f64> {
    let constant = NormConstant::new(n).value as f64;
    if !delta.is_finite() || delta < -tolerance {
        return Err(Error::Inconsistent(format!("delta = {delta} is negative")));
    }
    if delta > constant + tolerance {
        return Err(Error::Inconsistent(format!(
            "delta = {delta} exceeds the norm constant {constant} for n = {n}"
        )));
    }
    Ok((2.0 * (constant - delta)).max(0.0))
}
