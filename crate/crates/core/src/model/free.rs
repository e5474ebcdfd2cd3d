use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    check_interval, check_sample_count, check_weights, draw_component, log_likelihood_from,
    rng_for, IntervalProbability, SUPPORT_SCALES,
};
use crate::error::{Error, Result};
use crate::special::{normal_interval, normal_pdf_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeComponent {
    pub mean: f64,
    pub variance: f64,
    pub weight: f64,
}

impl FreeComponent {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A one-dimensional Gaussian mixture with per-component mean, variance and
/// weight: the model the EM baseline fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FreeDoc", into = "FreeDoc")]
pub struct FreeGmm {
    components: Vec<FreeComponent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeDoc {
    components: Vec<FreeComponent>,
}

impl TryFrom<FreeDoc> for FreeGmm {
    type Error = Error;

    fn try_from(doc: FreeDoc) -> Result<Self> {
        FreeGmm::new(doc.components)
    }
}

impl From<FreeGmm> for FreeDoc {
    fn from(m: FreeGmm) -> Self {
        FreeDoc {
            components: m.components,
        }
    }
}

impl FreeGmm {
    pub fn new(components: Vec<FreeComponent>) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        check_weights(&weights)?;
        for c in &components {
            if !c.mean.is_finite() {
                return Err(Error::param(format!(
                    "component mean {} is not finite",
                    c.mean
                )));
            }
            if !(c.variance > 0.0) || !c.variance.is_finite() {
                return Err(Error::param(format!(
                    "component variance {} must be positive",
                    c.variance
                )));
            }
        }
        Ok(FreeGmm { components })
    }

    pub fn components(&self) -> &[FreeComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_pdf_unchecked(x, c.mean, c.sd()))
            .sum()
    }

    pub fn log_likelihood(&self, data: &[f64]) -> Result<f64> {
        log_likelihood_from(data.iter().map(|&x| self.pdf(x)))
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        check_sample_count(n)?;
        let weights = self.weights();
        let mut rng = rng_for(seed);
        Ok((0..n)
            .map(|_| {
                let c = &self.components[draw_component(&mut rng, &weights)];
                let z: f64 = StandardNormal.sample(&mut rng);
                c.mean + c.sd() * z
            })
            .collect())
    }
}

impl IntervalProbability for FreeGmm {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        check_interval(a, b)?;
        Ok(self
            .components
            .iter()
            .map(|c| c.weight * normal_interval(a, b, c.mean, c.sd()))
            .sum())
    }

    fn support(&self) -> (f64, f64) {
        self.components
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                let pad = SUPPORT_SCALES * c.sd();
                (lo.min(c.mean - pad), hi.max(c.mean + pad))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_components() {
        let c = |mean, variance, weight| FreeComponent {
            mean,
            variance,
            weight,
        };
        assert!(FreeGmm::new(vec![c(0.0, 1.0, 0.5), c(1.0, 2.0, 0.5)]).is_ok());
        assert!(FreeGmm::new(vec![c(0.0, 0.0, 1.0)]).is_err());
        assert!(FreeGmm::new(vec![c(0.0, 1.0, 0.9)]).is_err());
        assert!(FreeGmm::new(vec![]).is_err());
    }

    #[test]
    fn interval_mass_over_partition_sums_to_one() {
        let m = FreeGmm::new(vec![
            FreeComponent {
                mean: -1.0,
                variance: 0.25,
                weight: 0.3,
            },
            FreeComponent {
                mean: 2.0,
                variance: 1.5,
                weight: 0.7,
            },
        ])
        .unwrap();
        let (lo, hi) = (-1.0 - 20.0 * 0.5, 2.0 + 20.0 * 1.5_f64.sqrt());
        let n = 37;
        let total: f64 = (0..n)
            .map(|i| {
                let a = lo + i as f64 * (hi - lo) / n as f64;
                let b = lo + (i + 1) as f64 * (hi - lo) / n as f64;
                m.interval_prob(a, b).unwrap()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn json_shape() {
        let m = FreeGmm::new(vec![FreeComponent {
            mean: 0.1,
            variance: 0.3,
            weight: 1.0,
        }])
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"components":[{"mean":0.1,"variance":0.3,"weight":1.0}]}"#
        );
    }
}
