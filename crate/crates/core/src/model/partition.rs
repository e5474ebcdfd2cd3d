use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `bins` equal-width intervals `(e_i, e_{i+1}]` over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionDoc", into = "PartitionDoc")]
pub struct Partition {
    lo: f64,
    hi: f64,
    bins: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    lo: f64,
    hi: f64,
    bins: usize,
}

impl TryFrom<PartitionDoc> for Partition {
    type Error = Error;

    fn try_from(d: PartitionDoc) -> Result<Self> {
        Partition::new(d.lo, d.hi, d.bins)
    }
}

impl From<Partition> for PartitionDoc {
    fn from(p: Partition) -> Self {
        PartitionDoc {
            lo: p.lo,
            hi: p.hi,
            bins: p.bins,
        }
    }
}

impl Partition {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::input(format!(
                "partition needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if bins == 0 {
            return Err(Error::input("partition needs at least one bin"));
        }
        Ok(Partition { lo, hi, bins })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Edge `i` for `i` in `0..=bins`; the last edge is `hi` exactly.
    pub fn edge(&self, i: usize) -> f64 {
        if i >= self.bins {
            self.hi
        } else {
            self.lo + (i as f64 * (self.hi - self.lo)) / self.bins as f64
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.bins).map(|i| (self.edge(i), self.edge(i + 1)))
    }

    /// The same range with twice as many bins.
    pub fn refined(&self) -> Partition {
        Partition {
            bins: 2 * self.bins,
            ..*self
        }
    }
}
