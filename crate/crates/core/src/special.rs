//! Scalar normal-distribution helpers and deterministic summation.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Density of `N(mean, sigma^2)` at `x`.
pub fn normal_pdf(x: f64, mean: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param(format!("sigma must be positive, got {sigma}")));
    }
    Ok(normal_pdf_unchecked(x, mean, sigma))
}

#[inline]
pub(crate) fn normal_pdf_unchecked(x: f64, mean: f64, sigma: f64) -> f64 {
    let z = (x - mean) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Cumulative distribution of `N(mean, sigma^2)` at `x`, via `erfc`.
///
/// Infinite arguments are handled exactly.
#[inline]
pub fn normal_cdf(x: f64, mean: f64, sigma: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let z = (x - mean) / (sigma * SQRT_2);
    0.5 * libm::erfc(-z)
}

/// Mass of `N(mean, sigma^2)` on `(a, b]`.
///
/// Differences are taken on the tail closer to the interval so that mass far
/// out in the upper tail does not cancel to zero.
#[inline]
pub(crate) fn normal_interval(a: f64, b: f64, mean: f64, sigma: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a >= mean {
        // both in the upper half: use survival functions
        let sa = normal_cdf(-a, -mean, sigma);
        let sb = normal_cdf(-b, -mean, sigma);
        (sa - sb).max(0.0)
    } else {
        (normal_cdf(b, mean, sigma) - normal_cdf(a, mean, sigma)).max(0.0)
    }
}

/// Neumaier-compensated sum. Result depends only weakly on term order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}
