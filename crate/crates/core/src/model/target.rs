use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    check_interval, check_sample_count, check_weights, draw_component, rng_for,
    IntervalProbability, SUPPORT_SCALES,
};
use crate::error::{Error, Result};
use crate::special::{normal_interval, normal_pdf_unchecked};

/// Component family of an analytic target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentKind {
    Normal { mean: f64, variance: f64 },
    Uniform { a: f64, b: f64 },
    Laplace { location: f64, scale: f64 },
}

impl ComponentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ComponentKind::Normal { .. } => "normal",
            ComponentKind::Uniform { .. } => "uniform",
            ComponentKind::Laplace { .. } => "laplace",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ComponentKind::Normal { mean, variance } => {
                mean.is_finite() && variance > 0.0 && variance.is_finite()
            }
            ComponentKind::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            ComponentKind::Laplace { location, scale } => {
                location.is_finite() && scale > 0.0 && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!(
                "invalid {} parameters: {self:?}",
                self.name()
            )))
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            ComponentKind::Normal { mean, variance } => {
                normal_pdf_unchecked(x, mean, variance.sqrt())
            }
            ComponentKind::Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            ComponentKind::Laplace { location, scale } => {
                (-(x - location).abs() / scale).exp() / (2.0 * scale)
            }
        }
    }

    /// Exact mass on `(lo, hi]`; `lo <= hi` assumed.
    pub fn interval_prob(&self, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return 0.0;
        }
        match *self {
            ComponentKind::Normal { mean, variance } => {
                normal_interval(lo, hi, mean, variance.sqrt())
            }
            ComponentKind::Uniform { a, b } => {
                let overlap = hi.min(b) - lo.max(a);
                if overlap > 0.0 {
                    overlap / (b - a)
                } else {
                    0.0
                }
            }
            ComponentKind::Laplace { location, scale } => {
                // tail-side differences avoid cancellation far from the peak
                let tail = |x: f64| 0.5 * (-(x - location).abs() / scale).exp();
                if lo >= location {
                    tail(lo) - tail(hi)
                } else if hi <= location {
                    tail(hi) - tail(lo)
                } else {
                    1.0 - tail(lo) - tail(hi)
                }
            }
        }
    }

    /// Truncated support: normal and Laplace at eight scales, uniform exact.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ComponentKind::Normal { mean, variance } => {
                let pad = SUPPORT_SCALES * variance.sqrt();
                (mean - pad, mean + pad)
            }
            ComponentKind::Uniform { a, b } => (a, b),
            ComponentKind::Laplace { location, scale } => {
                let pad = SUPPORT_SCALES * scale;
                (location - pad, location + pad)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ComponentKind::Normal { mean, variance } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + variance.sqrt() * z
            }
            ComponentKind::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            ComponentKind::Laplace { location, scale } => {
                // inverse CDF on u in (-1/2, 1/2)
                let u = rng.random::<f64>() - 0.5;
                location - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            ComponentKind::Normal { mean, variance } => vec![mean, variance],
            ComponentKind::Uniform { a, b } => vec![a, b],
            ComponentKind::Laplace { location, scale } => vec![location, scale],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComponentDoc", into = "ComponentDoc")]
pub struct TargetComponent {
    pub kind: ComponentKind,
    pub weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    kind: String,
    params: Vec<f64>,
    weight: f64,
}

impl TryFrom<ComponentDoc> for TargetComponent {
    type Error = Error;

    fn try_from(doc: ComponentDoc) -> Result<Self> {
        let [p, q] = doc.params[..] else {
            return Err(Error::param(format!(
                "{} component needs 2 params, got {}",
                doc.kind,
                doc.params.len()
            )));
        };
        let kind = match doc.kind.as_str() {
            "normal" => ComponentKind::Normal {
                mean: p,
                variance: q,
            },
            "uniform" => ComponentKind::Uniform { a: p, b: q },
            "laplace" => ComponentKind::Laplace {
                location: p,
                scale: q,
            },
            other => return Err(Error::param(format!("unknown component kind {other:?}"))),
        };
        kind.validate()?;
        Ok(TargetComponent {
            kind,
            weight: doc.weight,
        })
    }
}

impl From<TargetComponent> for ComponentDoc {
    fn from(c: TargetComponent) -> Self {
        ComponentDoc {
            kind: c.kind.name().to_string(),
            params: c.kind.params(),
            weight: c.weight,
        }
    }
}

/// Analytic ground-truth mixture of normal, uniform and Laplace components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TargetDoc", into = "TargetDoc")]
pub struct TargetMixture {
    components: Vec<TargetComponent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    components: Vec<TargetComponent>,
}

impl TryFrom<TargetDoc> for TargetMixture {
    type Error = Error;

    fn try_from(doc: TargetDoc) -> Result<Self> {
        TargetMixture::new(doc.components)
    }
}

impl From<TargetMixture> for TargetDoc {
    fn from(m: TargetMixture) -> Self {
        TargetDoc {
            components: m.components,
        }
    }
}

impl TargetMixture {
    pub fn new(components: Vec<TargetComponent>) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        check_weights(&weights)?;
        for c in &components {
            c.kind.validate()?;
        }
        Ok(TargetMixture { components })
    }

    pub fn components(&self) -> &[TargetComponent] {
        &self.components
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.kind.pdf(x))
            .sum()
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        check_sample_count(n)?;
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        let mut rng = rng_for(seed);
        Ok((0..n)
            .map(|_| {
                let k = draw_component(&mut rng, &weights);
                self.components[k].kind.sample(&mut rng)
            })
            .collect())
    }
}

impl IntervalProbability for TargetMixture {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        check_interval(a, b)?;
        Ok(self
            .components
            .iter()
            .map(|c| c.weight * c.kind.interval_prob(a, b))
            .sum())
    }

    fn support(&self) -> (f64, f64) {
        self.components
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                let (a, b) = c.kind.support();
                (lo.min(a), hi.max(b))
            })
    }
}

/// Axis-aligned normal component of a two-dimensional target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetComponent2d {
    pub mean: [f64; 2],
    pub variance: [f64; 2],
    pub weight: f64,
}

/// Two-dimensional analytic target: a mixture of axis-aligned normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Target2dDoc", into = "Target2dDoc")]
pub struct TargetMixture2d {
    components: Vec<TargetComponent2d>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Target2dDoc {
    components: Vec<TargetComponent2d>,
}

impl TryFrom<Target2dDoc> for TargetMixture2d {
    type Error = Error;

    fn try_from(doc: Target2dDoc) -> Result<Self> {
        TargetMixture2d::new(doc.components)
    }
}

impl From<TargetMixture2d> for Target2dDoc {
    fn from(m: TargetMixture2d) -> Self {
        Target2dDoc {
            components: m.components,
        }
    }
}

impl TargetMixture2d {
    pub fn new(components: Vec<TargetComponent2d>) -> Result<Self> {
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        check_weights(&weights)?;
        if components.iter().any(|c| {
            c.variance.iter().any(|v| !(*v > 0.0)) || c.mean.iter().any(|m| !m.is_finite())
        }) {
            return Err(Error::param(
                "2-d component needs finite means and positive variances",
            ));
        }
        Ok(TargetMixture2d { components })
    }

    pub fn components(&self) -> &[TargetComponent2d] {
        &self.components
    }

    pub fn pdf(&self, x: [f64; 2]) -> f64 {
        self.components
            .iter()
            .map(|c| {
                c.weight
                    * normal_pdf_unchecked(x[0], c.mean[0], c.variance[0].sqrt())
                    * normal_pdf_unchecked(x[1], c.mean[1], c.variance[1].sqrt())
            })
            .sum()
    }

    pub fn axis_support(&self) -> [(f64, f64); 2] {
        let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 2];
        for c in &self.components {
            for (axis, o) in out.iter_mut().enumerate() {
                let pad = SUPPORT_SCALES * c.variance[axis].sqrt();
                o.0 = o.0.min(c.mean[axis] - pad);
                o.1 = o.1.max(c.mean[axis] + pad);
            }
        }
        out
    }

    /// Flat `[x0, y0, x1, y1, ...]` draws.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        check_sample_count(n)?;
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        let mut rng = rng_for(seed);
        let mut out = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let c = &self.components[draw_component(&mut rng, &weights)];
            for axis in 0..2 {
                let z: f64 = StandardNormal.sample(&mut rng);
                out.push(c.mean[axis] + c.variance[axis].sqrt() * z);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(kind: ComponentKind) -> TargetMixture {
        TargetMixture::new(vec![TargetComponent { kind, weight: 1.0 }]).unwrap()
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(
            single(ComponentKind::Uniform { a: 0.0, b: 1.0 }).pdf(0.5),
            1.0
        );
        assert_eq!(
            single(ComponentKind::Laplace {
                location: 0.0,
                scale: 1.0
            })
            .pdf(0.0),
            0.5
        );
        let mix = TargetMixture::new(vec![
            TargetComponent {
                kind: ComponentKind::Normal {
                    mean: 0.0,
                    variance: 1.0,
                },
                weight: 0.5,
            },
            TargetComponent {
                kind: ComponentKind::Uniform { a: 0.0, b: 2.0 },
                weight: 0.5,
            },
        ])
        .unwrap();
        assert!((mix.pdf(1.0) - 0.370985).abs() < 1e-5);
    }

    #[test]
    fn interval_examples() {
        let u = single(ComponentKind::Uniform { a: 0.0, b: 1.0 });
        assert_eq!(u.interval_prob(0.0, 0.25).unwrap(), 0.25);
        let l = single(ComponentKind::Laplace {
            location: 0.0,
            scale: 1.0,
        });
        assert!((l.interval_prob(0.0, 40.0).unwrap() - 0.5).abs() < 1e-9);
        let n = single(ComponentKind::Normal {
            mean: 0.0,
            variance: 1.0,
        });
        assert!((n.interval_prob(-1.0, 1.0).unwrap() - 0.682689).abs() < 1e-5);
        assert!(matches!(
            n.interval_prob(1.0, -1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn covering_partition_sums_to_one_per_kind() {
        for kind in [
            ComponentKind::Normal {
                mean: 1.0,
                variance: 0.4,
            },
            ComponentKind::Uniform { a: -2.0, b: 0.5 },
            ComponentKind::Laplace {
                location: 3.0,
                scale: 0.7,
            },
        ] {
            let t = single(kind);
            let (lo, hi) = t.support();
            let (lo, hi) = (lo - 20.0, hi + 20.0);
            let n = 53;
            let total: f64 = (0..n)
                .map(|i| {
                    let a = lo + i as f64 * (hi - lo) / n as f64;
                    let b = lo + (i + 1) as f64 * (hi - lo) / n as f64;
                    t.interval_prob(a, b).unwrap()
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "{kind:?}: {total}");
        }
    }

    #[test]
    fn laplace_interval_matches_cdf_difference() {
        let k = ComponentKind::Laplace {
            location: 0.5,
            scale: 2.0,
        };
        let cdf = |x: f64| {
            if x < 0.5 {
                0.5 * ((x - 0.5) / 2.0).exp()
            } else {
                1.0 - 0.5 * (-(x - 0.5) / 2.0).exp()
            }
        };
        for (a, b) in [(-3.0, -1.0), (-1.0, 2.0), (1.0, 4.0)] {
            assert!((k.interval_prob(a, b) - (cdf(b) - cdf(a))).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_samples_stay_in_support() {
        let u = single(ComponentKind::Uniform { a: 0.0, b: 1.0 });
        let xs = u.sample(5000, 9).unwrap();
        assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
        assert_eq!(xs, u.sample(5000, 9).unwrap());
    }

    #[test]
    fn laplace_samples_match_mass() {
        let l = single(ComponentKind::Laplace {
            location: 1.0,
            scale: 0.5,
        });
        let xs = l.sample(100_000, 4).unwrap();
        let frac = xs.iter().filter(|&&x| x > 1.0 && x <= 1.5).count() as f64 / xs.len() as f64;
        assert!((frac - l.interval_prob(1.0, 1.5).unwrap()).abs() < 0.01);
    }

    #[test]
    fn json_params_layout() {
        let t = single(ComponentKind::Laplace {
            location: -1.5,
            scale: 0.25,
        });
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(
            text,
            r#"{"components":[{"kind":"laplace","params":[-1.5,0.25],"weight":1.0}]}"#
        );
        assert!(serde_json::from_str::<TargetMixture>(
            r#"{"components":[{"kind":"uniform","params":[2.0,1.0],"weight":1.0}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<TargetMixture>(
            r#"{"components":[{"kind":"cauchy","params":[0.0,1.0],"weight":1.0}]}"#
        )
        .is_err());
    }
}
