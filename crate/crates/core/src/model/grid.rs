use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    check_interval, check_sample_count, check_weights, draw_component, log_likelihood_from,
    rng_for, IntervalProbability, SUPPORT_SCALES,
};
use crate::error::{Error, Result};
use crate::special::{normal_interval, normal_pdf_unchecked};

/// One axis of an evenly spaced grid: `units` cells of width `spacing`
/// covering `[min, max]`, with a component mean at each cell midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub spacing: f64,
    pub units: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, units: usize) -> Self {
        GridAxis {
            min,
            max,
            spacing: (max - min) / units as f64,
            units,
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.spacing
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.units).map(|i| self.center(i)).collect()
    }
}

/// The expansion model: a Gaussian mixture with means fixed on an even grid,
/// one shared isotropic scale, and learnable weights.
///
/// In two dimensions the component for grid cell `(ix, iy)` is stored at
/// index `ix * units_y + iy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct GridGmm {
    axes: Vec<GridAxis>,
    /// Per-axis center coordinates.
    axis_centers: Vec<Vec<f64>>,
    sigma: f64,
    weights: Vec<f64>,
}

impl GridGmm {
    /// A uniform-weight grid over the given axes.
    pub fn uniform(axes: Vec<GridAxis>, sigma: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::param(format!(
                "grid dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        for a in &axes {
            if a.units == 0 || !(a.spacing > 0.0) || !a.spacing.is_finite() {
                return Err(Error::param(format!("invalid grid axis {a:?}")));
            }
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param(format!("sigma must be positive, got {sigma}")));
        }
        let n: usize = axes.iter().map(|a| a.units).product();
        let axis_centers = axes.iter().map(GridAxis::centers).collect();
        Ok(GridGmm {
            axes,
            axis_centers,
            sigma,
            weights: vec![1.0 / n as f64; n],
        })
    }

    /// A one-dimensional grid from explicit, evenly spaced centers.
    ///
    /// The covered range extends half a gap beyond the outer centers. A lone
    /// center gets a nominal gap of `sigma`.
    pub fn from_centers_1d(centers: Vec<f64>, sigma: f64, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::param("grid needs at least one center"));
        }
        let gap = if centers.len() > 1 {
            centers[1] - centers[0]
        } else {
            sigma
        };
        let axis = GridAxis {
            min: centers[0] - 0.5 * gap,
            max: centers[centers.len() - 1] + 0.5 * gap,
            spacing: gap,
            units: centers.len(),
        };
        GridGmm::from_parts(vec![axis], vec![centers], sigma, weights)
    }

    fn from_parts(
        axes: Vec<GridAxis>,
        axis_centers: Vec<Vec<f64>>,
        sigma: f64,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::param(format!(
                "grid dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param(format!("sigma must be positive, got {sigma}")));
        }
        for (axis, cs) in axes.iter().zip(&axis_centers) {
            if !(axis.spacing > 0.0) || cs.len() != axis.units || cs.is_empty() {
                return Err(Error::param(format!("invalid grid axis {axis:?}")));
            }
            for pair in cs.windows(2) {
                let gap = pair[1] - pair[0];
                let tol = 1e-9 * pair[0].abs().max(pair[1].abs()).max(1.0);
                if !(gap > 0.0) || (gap - axis.spacing).abs() > tol {
                    return Err(Error::param(format!(
                        "grid centers must increase with constant gap {}, found gap {gap}",
                        axis.spacing
                    )));
                }
            }
        }
        let n: usize = axes.iter().map(|a| a.units).product();
        if weights.len() != n {
            return Err(Error::param(format!(
                "{} weights for {n} components",
                weights.len()
            )));
        }
        check_weights(&weights)?;
        Ok(GridGmm {
            axes,
            axis_centers,
            sigma,
            weights,
        })
    }

    /// Same grid and scale with a new weight vector.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        GridGmm::from_parts(
            self.axes.clone(),
            self.axis_centers.clone(),
            self.sigma,
            weights,
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn axis_centers(&self, axis: usize) -> &[f64] {
        &self.axis_centers[axis]
    }

    /// Coordinates of component `n`.
    pub fn center(&self, n: usize) -> Vec<f64> {
        match self.dim() {
            1 => vec![self.axis_centers[0][n]],
            _ => {
                let ny = self.axes[1].units;
                vec![self.axis_centers[0][n / ny], self.axis_centers[1][n % ny]]
            }
        }
    }

    /// True when every weight equals `1/N` to within rounding.
    pub fn has_uniform_weights(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - u).abs() <= 1e-12)
    }

    /// Writes the unweighted density of every component at `x` into `out`.
    /// `x` must have length `dim()` and `out` length `len()`.
    pub(crate) fn component_densities(&self, x: &[f64], out: &mut [f64]) {
        let s = self.sigma;
        match self.dim() {
            1 => {
                for (o, &c) in out.iter_mut().zip(&self.axis_centers[0]) {
                    *o = normal_pdf_unchecked(x[0], c, s);
                }
            }
            _ => {
                let py: Vec<f64> = self.axis_centers[1]
                    .iter()
                    .map(|&c| normal_pdf_unchecked(x[1], c, s))
                    .collect();
                let ny = py.len();
                for (ix, &cx) in self.axis_centers[0].iter().enumerate() {
                    let px = normal_pdf_unchecked(x[0], cx, s);
                    for (o, &q) in out[ix * ny..(ix + 1) * ny].iter_mut().zip(&py) {
                        *o = px * q;
                    }
                }
            }
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(format!(
                "point has dimension {}, model has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_data(&self, data: &[f64]) -> Result<()> {
        if data.is_empty() {
            return Err(Error::input("data is empty"));
        }
        if !data.len().is_multiple_of(self.dim()) {
            return Err(Error::input(format!(
                "flat data of length {} is not a whole number of {}-d points",
                data.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn pdf_unchecked(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        self.component_densities(x, scratch);
        scratch.iter().zip(&self.weights).map(|(p, w)| p * w).sum()
    }

    /// Mixture density at `x`.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let mut scratch = vec![0.0; self.len()];
        Ok(self.pdf_unchecked(x, &mut scratch))
    }

    /// `sum_d log G(x_d)` over flat, row-per-point data.
    pub fn log_likelihood(&self, data: &[f64]) -> Result<f64> {
        self.check_data(data)?;
        let mut scratch = vec![0.0; self.len()];
        log_likelihood_from(
            data.chunks(self.dim())
                .map(|x| self.pdf_unchecked(x, &mut scratch)),
        )
    }

    /// Per-axis `(min center - 8 sigma, max center + 8 sigma)`.
    pub fn axis_support(&self) -> Vec<(f64, f64)> {
        let pad = SUPPORT_SCALES * self.sigma;
        self.axis_centers
            .iter()
            .map(|c| (c[0] - pad, c[c.len() - 1] + pad))
            .collect()
    }

    /// `n` i.i.d. draws as flat, row-per-point data.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        check_sample_count(n)?;
        let mut rng = rng_for(seed);
        let mut out = Vec::with_capacity(n * self.dim());
        for _ in 0..n {
            let k = draw_component(&mut rng, &self.weights);
            for c in self.center(k) {
                let z: f64 = StandardNormal.sample(&mut rng);
                out.push(c + self.sigma * z);
            }
        }
        Ok(out)
    }
}

impl IntervalProbability for GridGmm {
    fn interval_prob(&self, a: f64, b: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::input(
                "interval probability is defined for 1-d models only",
            ));
        }
        check_interval(a, b)?;
        Ok(self.axis_centers[0]
            .iter()
            .zip(&self.weights)
            .map(|(&c, &w)| w * normal_interval(a, b, c, self.sigma))
            .sum())
    }

    fn support(&self) -> (f64, f64) {
        self.axis_support()[0]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    dim: usize,
    centers: Vec<Vec<f64>>,
    sigma: f64,
    weights: Vec<f64>,
    spacing: Vec<f64>,
    range: Vec<[f64; 2]>,
}

impl TryFrom<GridDoc> for GridGmm {
    type Error = Error;

    fn try_from(doc: GridDoc) -> Result<Self> {
        if doc.dim == 0 || doc.dim > 2 || doc.spacing.len() != doc.dim || doc.range.len() != doc.dim
        {
            return Err(Error::param(
                "grid document dim, spacing and range disagree",
            ));
        }
        if doc.centers.iter().any(|c| c.len() != doc.dim) {
            return Err(Error::param("grid center has the wrong dimension"));
        }
        let mut axes = Vec::with_capacity(doc.dim);
        let mut axis_centers = Vec::with_capacity(doc.dim);
        if doc.dim == 1 {
            let cs: Vec<f64> = doc.centers.iter().map(|c| c[0]).collect();
            axes.push(GridAxis {
                min: doc.range[0][0],
                max: doc.range[0][1],
                spacing: doc.spacing[0],
                units: cs.len(),
            });
            axis_centers.push(cs);
        } else {
            // x-major layout: the y coordinate cycles fastest
            let ny = doc
                .centers
                .iter()
                .take_while(|c| c[0] == doc.centers[0][0])
                .count();
            if ny == 0 || !doc.centers.len().is_multiple_of(ny) {
                return Err(Error::param(
                    "2-d grid centers are not a full x-major lattice",
                ));
            }
            let nx = doc.centers.len() / ny;
            let xs: Vec<f64> = (0..nx).map(|i| doc.centers[i * ny][0]).collect();
            let ys: Vec<f64> = (0..ny).map(|j| doc.centers[j][1]).collect();
            for (n, c) in doc.centers.iter().enumerate() {
                if c[0] != xs[n / ny] || c[1] != ys[n % ny] {
                    return Err(Error::param(
                        "2-d grid centers are not a full x-major lattice",
                    ));
                }
            }
            for (axis, cs) in [xs, ys].into_iter().enumerate() {
                axes.push(GridAxis {
                    min: doc.range[axis][0],
                    max: doc.range[axis][1],
                    spacing: doc.spacing[axis],
                    units: cs.len(),
                });
                axis_centers.push(cs);
            }
        }
        GridGmm::from_parts(axes, axis_centers, doc.sigma, doc.weights)
    }
}

impl From<GridGmm> for GridDoc {
    fn from(g: GridGmm) -> Self {
        GridDoc {
            dim: g.dim(),
            centers: (0..g.len()).map(|n| g.center(n)).collect(),
            sigma: g.sigma,
            spacing: g.axes.iter().map(|a| a.spacing).collect(),
            range: g.axes.iter().map(|a| [a.min, a.max]).collect(),
            weights: g.weights,
        }
    }
}
