//! Synthetic target distributions: seeded random mixtures and fixed presets.
//!
//! The presets other than `cardioid_noise` are fixtures chosen to have the
//! described shape; their parameters are not taken from any published data.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ComponentKind, ModelFile, TargetComponent, TargetComponent2d, TargetMixture, TargetMixture2d,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Normal,
    Uniform,
    Laplace,
}

/// Parameters of the random target generator. Each kind draws its own scale
/// parameter from its own range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub seed: u64,
    pub min_components: usize,
    pub kinds: BTreeSet<Kind>,
    pub location_range: (f64, f64),
    pub normal_variance: (f64, f64),
    pub uniform_width: (f64, f64),
    pub laplace_scale: (f64, f64),
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec {
            seed: 0,
            min_components: 6,
            kinds: [Kind::Normal, Kind::Uniform].into_iter().collect(),
            location_range: (-10.0, 10.0),
            normal_variance: (0.1, 2.0),
            uniform_width: (0.5, 4.0),
            laplace_scale: (0.3, 1.5),
        }
    }
}

impl TargetSpec {
    pub fn with_seed(seed: u64) -> Self {
        TargetSpec {
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::param(
                "target spec needs at least one component kind",
            ));
        }
        if self.min_components == 0 {
            return Err(Error::param("target spec needs min_components >= 1"));
        }
        let (lo, hi) = self.location_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param(format!(
                "location range [{lo}, {hi}] is empty"
            )));
        }
        for (name, (a, b)) in [
            ("normal variance", self.normal_variance),
            ("uniform width", self.uniform_width),
            ("laplace scale", self.laplace_scale),
        ] {
            if !(a > 0.0) || !(a <= b) || !b.is_finite() {
                return Err(Error::param(format!(
                    "{name} range [{a}, {b}] must be positive and ordered"
                )));
            }
        }
        Ok(())
    }
}

fn uniform_in<R: Rng>(rng: &mut R, (a, b): (f64, f64)) -> f64 {
    if a == b {
        a
    } else {
        rng.random_range(a..b)
    }
}

/// Draws a random mixture with between `min_components` and
/// `min_components + 4` components. Weights are normalized unit-exponential
/// draws, which is uniform on the simplex.
///
/// Generation uses stream 1 of the ChaCha generator seeded with `spec.seed`,
/// so a target and a sample drawn with the same seed are independent.
pub fn random_target(spec: &TargetSpec) -> Result<TargetMixture> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let kinds: Vec<Kind> = spec.kinds.iter().copied().collect();
    let count = rng.random_range(spec.min_components..=spec.min_components + 4);
    let raw: Vec<f64> = (0..count).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut components = Vec::with_capacity(count);
    for w in raw {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let location = uniform_in(&mut rng, spec.location_range);
        let kind = match kind {
            Kind::Normal => ComponentKind::Normal {
                mean: location,
                variance: uniform_in(&mut rng, spec.normal_variance),
            },
            Kind::Uniform => {
                let width = uniform_in(&mut rng, spec.uniform_width);
                ComponentKind::Uniform {
                    a: location - 0.5 * width,
                    b: location + 0.5 * width,
                }
            }
            Kind::Laplace => ComponentKind::Laplace {
                location,
                scale: uniform_in(&mut rng, spec.laplace_scale),
            },
        };
        components.push(TargetComponent {
            kind,
            weight: w / total,
        });
    }
    TargetMixture::new(components)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    FourNormals,
    NormalUniformLaplace,
    Grid2d,
    CardioidNoise,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::FourNormals,
        Preset::NormalUniformLaplace,
        Preset::Grid2d,
        Preset::CardioidNoise,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FourNormals => "four_normals",
            Preset::NormalUniformLaplace => "normal_uniform_laplace",
            Preset::Grid2d => "grid2d",
            Preset::CardioidNoise => "cardioid_noise",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(format!("unknown preset {s:?}")))
    }
}

fn c(kind: ComponentKind, weight: f64) -> TargetComponent {
    TargetComponent { kind, weight }
}

/// Fixed target by name. `grid2d` is two-dimensional; the rest are 1-d.
pub fn preset_target(name: &str) -> Result<ModelFile> {
    use ComponentKind::*;
    let preset: Preset = name.parse()?;
    Ok(match preset {
        Preset::FourNormals => TargetMixture::new(vec![
            c(
                Normal {
                    mean: -6.0,
                    variance: 0.5,
                },
                0.2,
            ),
            c(
                Normal {
                    mean: -2.0,
                    variance: 1.0,
                },
                0.3,
            ),
            c(
                Normal {
                    mean: 2.0,
                    variance: 0.3,
                },
                0.25,
            ),
            c(
                Normal {
                    mean: 6.0,
                    variance: 1.5,
                },
                0.25,
            ),
        ])?
        .into(),
        Preset::NormalUniformLaplace => TargetMixture::new(vec![
            c(
                Normal {
                    mean: -4.0,
                    variance: 1.0,
                },
                0.4,
            ),
            c(Uniform { a: 0.0, b: 3.0 }, 0.3),
            c(
                Laplace {
                    location: 7.0,
                    scale: 0.8,
                },
                0.3,
            ),
        ])?
        .into(),
        Preset::CardioidNoise => TargetMixture::new(vec![
            c(
                Normal {
                    mean: 2.0,
                    variance: 0.1,
                },
                0.5,
            ),
            c(Uniform { a: -0.3, b: -0.1 }, 0.5),
        ])?
        .into(),
        Preset::Grid2d => TargetMixture2d::new(vec![
            TargetComponent2d {
                mean: [-2.0, -1.0],
                variance: [0.5, 0.8],
                weight: 0.4,
            },
            TargetComponent2d {
                mean: [2.0, 1.5],
                variance: [1.0, 0.3],
                weight: 0.35,
            },
            TargetComponent2d {
                mean: [0.0, 3.0],
                variance: [0.4, 0.4],
                weight: 0.25,
            },
        ])?
        .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_target_is_deterministic() {
        let spec = TargetSpec::with_seed(17);
        assert_eq!(random_target(&spec).unwrap(), random_target(&spec).unwrap());
        assert_ne!(
            random_target(&spec).unwrap(),
            random_target(&TargetSpec::with_seed(18)).unwrap()
        );
    }

    #[test]
    fn kind_restriction() {
        let spec = TargetSpec {
            kinds: [Kind::Uniform].into_iter().collect(),
            ..TargetSpec::with_seed(4)
        };
        let t = random_target(&spec).unwrap();
        assert!(t.components().len() >= 6);
        for c in t.components() {
            match c.kind {
                ComponentKind::Uniform { a, b } => assert!(a < b),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn component_count_range() {
        let counts: BTreeSet<usize> = (0..300)
            .map(|s| {
                random_target(&TargetSpec::with_seed(s))
                    .unwrap()
                    .components()
                    .len()
            })
            .collect();
        assert_eq!(counts, (6..=10).collect());
    }

    #[test]
    fn every_kind_appears() {
        let spec = |seed| TargetSpec {
            kinds: [Kind::Normal, Kind::Uniform, Kind::Laplace]
                .into_iter()
                .collect(),
            ..TargetSpec::with_seed(seed)
        };
        let mut seen = BTreeSet::new();
        for s in 0..1000 {
            for comp in random_target(&spec(s)).unwrap().components() {
                seen.insert(comp.kind.name());
            }
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn empty_kinds_rejected() {
        let spec = TargetSpec {
            kinds: BTreeSet::new(),
            ..Default::default()
        };
        assert!(matches!(
            random_target(&spec),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn cardioid_noise_values() {
        let ModelFile::Target(t) = preset_target("cardioid_noise").unwrap() else {
            panic!()
        };
        let peak = 0.5 / (2.0 * std::f64::consts::PI * 0.1).sqrt();
        assert!((t.pdf(2.0) - peak).abs() < 1e-12);
        assert!((t.pdf(2.0) - 0.63078).abs() < 1e-4);
        assert!((t.pdf(-0.2) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn presets() {
        let ModelFile::Target(t) = preset_target("four_normals").unwrap() else {
            panic!()
        };
        assert_eq!(t.components().len(), 4);
        assert!(t.components().iter().all(|c| c.kind.name() == "normal"));
        assert!(matches!(
            preset_target("grid2d").unwrap(),
            ModelFile::Target2d(_)
        ));
        assert!(matches!(
            preset_target("nope"),
            Err(Error::InvalidParameter(_))
        ));
    }
}
