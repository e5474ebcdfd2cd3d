//! Interval Probability Error and supporting interval-probability operands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_interval, IntervalProbability, Partition};

/// Default number of IPE bins.
pub const DEFAULT_BINS: usize = 100;

/// Result of an IPE comparison, with the partition it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpeReport {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    pub per_bin: Vec<f64>,
}

impl IpeReport {
    pub fn partition(&self) -> Result<Partition> {
        Partition::new(self.lo, self.hi, self.bins)
    }
}

/// `sum_i |P_f(w_i) - P_g(w_i)|` over the bins of `partition`. Lies in `[0, 2]`.
pub fn ipe<F, G>(f: &F, g: &G, partition: &Partition) -> Result<IpeReport>
where
    F: IntervalProbability + ?Sized,
    G: IntervalProbability + ?Sized,
{
    let per_bin = partition
        .intervals()
        .map(|(a, b)| Ok((f.interval_prob(a, b)? - g.interval_prob(a, b)?).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let value = per_bin.iter().sum();
    Ok(IpeReport {
        value,
        lo: partition.lo(),
        hi: partition.hi(),
        bins: partition.bins(),
        per_bin,
    })
}

/// Fraction of samples in `(a, b]`.
pub fn empirical_interval_prob(data: &[f64], a: f64, b: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::input(
            "empirical probability needs at least one sample",
        ));
    }
    check_interval(a, b)?;
    let inside = data.iter().filter(|&&x| x > a && x <= b).count();
    Ok(inside as f64 / data.len() as f64)
}

/// Raw samples viewed as a distribution.
#[derive(Debug, Clone, Copy)]
pub struct Empirical<'a> {
    data: &'a [f64],
    lo: f64,
    hi: f64,
}

impl<'a> Empirical<'a> {
    pub fn new(data: &'a [f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::input(
                "empirical distribution needs at least one sample",
            ));
        }
        let (lo, hi) = data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::input("empirical data contains non-finite values"));
        }
        Ok(Empirical { data, lo, hi })
    }
}

impl IntervalProbability for Empirical<'_> {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        empirical_interval_prob(self.data, a, b)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Equal-width bins over the union of two supports, padded by 1% of its
/// width (half on each side).
pub fn default_partition(
    f_support: (f64, f64),
    g_support: (f64, f64),
    bins: usize,
) -> Result<Partition> {
    let lo = f_support.0.min(g_support.0);
    let hi = f_support.1.max(g_support.1);
    if !lo.is_finite() || !hi.is_finite() || !(hi > lo) {
        return Err(Error::input(format!(
            "degenerate support union [{lo}, {hi}]"
        )));
    }
    let pad = 0.005 * (hi - lo);
    Partition::new(lo - pad, hi + pad, bins)
}

/// [`default_partition`] over the supports of two operands.
pub fn partition_for<F, G>(f: &F, g: &G, bins: usize) -> Result<Partition>
where
    F: IntervalProbability + ?Sized,
    G: IntervalProbability + ?Sized,
{
    default_partition(f.support(), g.support(), bins)
}
