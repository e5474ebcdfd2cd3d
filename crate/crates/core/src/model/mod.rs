//! Mixture model types, exact density and interval-probability evaluation,
//! and seeded sampling.

mod free;
mod grid;
mod partition;
mod target;

pub use free::{FreeComponent, FreeGmm};
pub use grid::{GridAxis, GridGmm};
pub use partition::Partition;
pub use target::{
    ComponentKind, TargetComponent, TargetComponent2d, TargetMixture, TargetMixture2d,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that assigns a probability to a half-open interval `(a, b]`.
pub trait IntervalProbability {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64>;

    /// A finite interval holding all but a negligible part of the mass.
    fn support(&self) -> (f64, f64);
}

impl<T: IntervalProbability + ?Sized> IntervalProbability for &T {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        (**self).interval_prob(a, b)
    }

    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
}

/// Scale multiple used when truncating unbounded components to a finite support.
pub const SUPPORT_SCALES: f64 = 8.0;

/// Weight vectors may drift from 1 by this much.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

pub(crate) fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::input("interval bound is NaN"));
    }
    if a > b {
        return Err(Error::input(format!("interval [{a}, {b}] has a > b")));
    }
    Ok(())
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::param("mixture needs at least one component"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::param(format!(
            "weight {w} is negative or not finite"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::param(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

pub(crate) fn check_sample_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("sample count must be at least 1"));
    }
    Ok(())
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a component index from a categorical distribution over `weights`.
pub(crate) fn draw_component<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let u: f64 = rng.random::<f64>();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

pub(crate) fn log_likelihood_from<I>(densities: I) -> Result<f64>
where
    I: IntoIterator<Item = f64>,
{
    let mut count = 0usize;
    let mut total = 0.0;
    for (d, p) in densities.into_iter().enumerate() {
        if !(p > 0.0) {
            return Err(Error::NumericalUnderflow(format!(
                "model density is zero at sample {d}"
            )));
        }
        total += p.ln();
        count += 1;
    }
    if count == 0 {
        return Err(Error::input("log-likelihood needs at least one sample"));
    }
    Ok(total)
}

/// Any model or target that can be stored as JSON. The variant is
/// recognized from the document's shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelFile {
    Grid(GridGmm),
    Free(FreeGmm),
    Target(TargetMixture),
    Target2d(TargetMixture2d),
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::input(format!(
                "not a recognized model document (grid, free, or target mixture): {e}"
            ))
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelFile::Grid(g) => g.dim(),
            ModelFile::Free(_) | ModelFile::Target(_) => 1,
            ModelFile::Target2d(_) => 2,
        }
    }

    /// Density at a point of length `dim()`.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::input(format!(
                "point has dimension {}, model has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(match self {
            ModelFile::Grid(g) => g.pdf(x)?,
            ModelFile::Free(f) => f.pdf(x[0]),
            ModelFile::Target(t) => t.pdf(x[0]),
            ModelFile::Target2d(t) => t.pdf([x[0], x[1]]),
        })
    }

    /// Flat, row-per-point samples.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            ModelFile::Grid(g) => g.sample(n, seed),
            ModelFile::Free(f) => f.sample(n, seed),
            ModelFile::Target(t) => t.sample(n, seed),
            ModelFile::Target2d(t) => t.sample(n, seed),
        }
    }

    /// The one-dimensional interval-probability view, if there is one.
    pub fn as_interval_probability(&self) -> Option<&dyn IntervalProbability> {
        match self {
            ModelFile::Grid(g) if g.dim() == 1 => Some(g),
            ModelFile::Free(f) => Some(f),
            ModelFile::Target(t) => Some(t),
            _ => None,
        }
    }

    /// Per-axis bounding box of the model's support.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            ModelFile::Grid(g) => g.axis_support(),
            ModelFile::Free(f) => vec![f.support()],
            ModelFile::Target(t) => vec![t.support()],
            ModelFile::Target2d(t) => t.axis_support().to_vec(),
        }
    }
}

impl From<GridGmm> for ModelFile {
    fn from(m: GridGmm) -> Self {
        ModelFile::Grid(m)
    }
}

impl From<FreeGmm> for ModelFile {
    fn from(m: FreeGmm) -> Self {
        ModelFile::Free(m)
    }
}

impl From<TargetMixture> for ModelFile {
    fn from(m: TargetMixture) -> Self {
        ModelFile::Target(m)
    }
}

impl From<TargetMixture2d> for ModelFile {
    fn from(m: TargetMixture2d) -> Self {
        ModelFile::Target2d(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn categorical_draw_skips_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let k = draw_component(&mut rng, &[0.0, 0.5, 0.0, 0.5, 0.0]);
            assert!(k == 1 || k == 3);
        }
    }

    #[test]
    fn model_file_shape_detection() {
        let grid = GridGmm::from_centers_1d(vec![0.0, 1.0], 0.5, vec![0.5, 0.5]).unwrap();
        let free = FreeGmm::new(vec![FreeComponent {
            mean: 0.0,
            variance: 1.0,
            weight: 1.0,
        }])
        .unwrap();
        let target = TargetMixture::new(vec![TargetComponent {
            kind: ComponentKind::Uniform { a: 0.0, b: 1.0 },
            weight: 1.0,
        }])
        .unwrap();
        for m in [ModelFile::from(grid), free.into(), target.into()] {
            let text = m.to_json().unwrap();
            assert_eq!(ModelFile::from_json(&text).unwrap(), m);
        }
        assert!(ModelFile::from_json("{\"components\": 3}").is_err());
    }
}
