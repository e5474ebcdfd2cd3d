use rand::Rng;
use serde::{Deserialize, Serialize};

use super::data_range;
use crate::error::{Error, Result};
use crate::model::{rng_for, FreeComponent, FreeGmm, GridAxis};
use crate::special::normal_pdf_unchecked;

/// Starting point for EM.
#[derive(Debug, Clone, PartialEq)]
pub enum EmInit {
    /// Means at the cell midpoints of an even grid over the data range,
    /// variances `(t * r)^2`, uniform weights.
    EvenGrid {
        t: f64,
    },
    /// Means uniform over the data range, variances equal to the sample
    /// variance, uniform weights.
    Random {
        seed: u64,
    },
    Explicit(FreeGmm),
}

impl Default for EmInit {
    fn default() -> Self {
        EmInit::EvenGrid { t: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmConfig {
    pub k: usize,
    pub init: EmInit,
    pub max_iters: usize,
    /// Lower clamp on every variance. `None` means `1e-6 * range^2`.
    pub variance_floor: Option<f64>,
    /// Stop once `|delta log-likelihood| < tol`; 0 runs exactly `max_iters`.
    pub tol: f64,
}

impl EmConfig {
    pub fn new(k: usize, max_iters: usize) -> Self {
        EmConfig {
            k,
            init: EmInit::default(),
            max_iters,
            variance_floor: None,
            tol: 0.0,
        }
    }
}

/// Log-likelihood after each iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmTrace {
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl EmTrace {
    /// True when no step lowers the log-likelihood by more than `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.log_likelihood.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

/// Posterior component probabilities, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    k: usize,
    values: Vec<f64>,
}

impl Responsibilities {
    pub fn rows(&self) -> usize {
        self.values.len() / self.k
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    pub fn row(&self, d: usize) -> &[f64] {
        &self.values[d * self.k..(d + 1) * self.k]
    }

    pub fn get(&self, d: usize, n: usize) -> f64 {
        self.values[d * self.k + n]
    }
}

/// E-step: `Gamma_dn = pi_n phi_n(x_d) / sum_m pi_m phi_m(x_d)`.
pub fn em_responsibilities(model: &FreeGmm, data: &[f64]) -> Result<Responsibilities> {
    if data.is_empty() {
        return Err(Error::input("data is empty"));
    }
    let comps = model.components();
    let k = comps.len();
    let sds: Vec<f64> = comps.iter().map(FreeComponent::sd).collect();
    let mut values = Vec::with_capacity(data.len() * k);
    for (d, &x) in data.iter().enumerate() {
        let start = values.len();
        let mut total = 0.0;
        for (c, &sd) in comps.iter().zip(&sds) {
            let p = c.weight * normal_pdf_unchecked(x, c.mean, sd);
            values.push(p);
            total += p;
        }
        if !(total > 0.0) {
            return Err(Error::NumericalUnderflow(format!(
                "every component density underflows at sample {d} (x = {x})"
            )));
        }
        for v in &mut values[start..] {
            *v /= total;
        }
    }
    Ok(Responsibilities { k, values })
}

/// M-step from given responsibilities. A component with no responsibility
/// mass keeps its mean and variance and gets weight zero.
fn maximize(model: &FreeGmm, data: &[f64], resp: &Responsibilities, floor: f64) -> Result<FreeGmm> {
    let k = resp.cols();
    let mut mass = vec![0.0; k];
    let mut weighted_sum = vec![0.0; k];
    for (d, &x) in data.iter().enumerate() {
        for (n, &g) in resp.row(d).iter().enumerate() {
            mass[n] += g;
            weighted_sum[n] += g * x;
        }
    }
    let means: Vec<f64> = (0..k)
        .map(|n| {
            if mass[n] > 0.0 {
                weighted_sum[n] / mass[n]
            } else {
                model.components()[n].mean
            }
        })
        .collect();
    let mut sq = vec![0.0; k];
    for (d, &x) in data.iter().enumerate() {
        for (n, &g) in resp.row(d).iter().enumerate() {
            let dx = x - means[n];
            sq[n] += g * dx * dx;
        }
    }
    let total_mass: f64 = mass.iter().sum();
    let components = (0..k)
        .map(|n| {
            let variance = if mass[n] > 0.0 {
                sq[n] / mass[n]
            } else {
                model.components()[n].variance
            };
            FreeComponent {
                mean: means[n],
                variance: variance.max(floor),
                weight: mass[n] / total_mass,
            }
        })
        .collect();
    FreeGmm::new(components)
}

/// One full E+M step with variances clamped at `floor`.
pub fn em_step(model: &FreeGmm, data: &[f64], floor: f64) -> Result<FreeGmm> {
    let resp = em_responsibilities(model, data)?;
    maximize(model, data, &resp, floor)
}

fn sample_variance(data: &[f64]) -> f64 {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

fn initial_model(data: &[f64], cfg: &EmConfig, floor: f64) -> Result<FreeGmm> {
    let k = cfg.k;
    match &cfg.init {
        EmInit::Explicit(m) => {
            if m.len() != k {
                return Err(Error::param(format!(
                    "explicit init has {} components, k = {k}",
                    m.len()
                )));
            }
            Ok(m.clone())
        }
        EmInit::EvenGrid { t } => {
            if !(*t > 0.0) {
                return Err(Error::param(format!(
                    "init scale ratio t must be positive, got {t}"
                )));
            }
            let (lo, hi) = data_range(data, 1, 0)?;
            let axis = GridAxis::new(lo, hi, k);
            let variance = ((t * axis.spacing).powi(2)).max(floor);
            FreeGmm::new(
                axis.centers()
                    .into_iter()
                    .map(|mean| FreeComponent {
                        mean,
                        variance,
                        weight: 1.0 / k as f64,
                    })
                    .collect(),
            )
        }
        EmInit::Random { seed } => {
            let (lo, hi) = data_range(data, 1, 0)?;
            let variance = sample_variance(data).max(floor);
            let mut rng = rng_for(*seed);
            FreeGmm::new(
                (0..k)
                    .map(|_| FreeComponent {
                        mean: rng.random_range(lo..=hi),
                        variance,
                        weight: 1.0 / k as f64,
                    })
                    .collect(),
            )
        }
    }
}

/// Classical EM for a free 1-d Gaussian mixture.
pub fn em_fit(data: &[f64], cfg: &EmConfig) -> Result<(FreeGmm, EmTrace)> {
    if data.is_empty() {
        return Err(Error::input("data is empty"));
    }
    if cfg.k == 0 {
        return Err(Error::param("EM needs k >= 1"));
    }
    if cfg.max_iters == 0 {
        return Err(Error::param("EM needs max_iters >= 1"));
    }
    if !matches!(cfg.init, EmInit::Explicit(_)) && data.len() < cfg.k {
        return Err(Error::input(format!(
            "{} samples for k = {} components",
            data.len(),
            cfg.k
        )));
    }
    if !(cfg.tol >= 0.0) {
        return Err(Error::param(format!(
            "tolerance must be nonnegative, got {}",
            cfg.tol
        )));
    }
    let floor = match cfg.variance_floor {
        Some(f) if f > 0.0 && f.is_finite() => f,
        Some(f) => {
            return Err(Error::param(format!(
                "variance floor must be positive, got {f}"
            )))
        }
        None => {
            let (lo, hi) = data_range(data, 1, 0)?;
            1e-6 * (hi - lo) * (hi - lo)
        }
    };

    let mut model = initial_model(data, cfg, floor)?;
    let mut previous = model.log_likelihood(data)?;
    let mut trace = EmTrace {
        log_likelihood: Vec::with_capacity(cfg.max_iters),
        iterations: 0,
        converged: false,
    };
    for _ in 0..cfg.max_iters {
        model = em_step(&model, data, floor)?;
        let ll = model.log_likelihood(data)?;
        trace.log_likelihood.push(ll);
        trace.iterations += 1;
        if (ll - previous).abs() < cfg.tol {
            trace.converged = true;
            break;
        }
        previous = ll;
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_component_closed_form() {
        let data = [1.0, 2.5, -0.5, 4.0, 3.0];
        let cfg = EmConfig::new(1, 1);
        let (m, trace) = em_fit(&data, &cfg).unwrap();
        let mean = data.iter().sum::<f64>() / 5.0;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 5.0;
        let c = m.components()[0];
        assert_eq!(c.weight, 1.0);
        assert_eq!(c.mean, mean);
        assert_eq!(c.variance, var);
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn single_component_responsibilities_are_one() {
        let m = FreeGmm::new(vec![FreeComponent {
            mean: 0.0,
            variance: 2.0,
            weight: 1.0,
        }])
        .unwrap();
        let r = em_responsibilities(&m, &[-3.0, 0.0, 5.0]).unwrap();
        assert!((0..3).all(|d| r.get(d, 0) == 1.0));
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let m = FreeGmm::new(vec![
            FreeComponent {
                mean: -1.0,
                variance: 0.5,
                weight: 0.5,
            },
            FreeComponent {
                mean: 1.0,
                variance: 0.5,
                weight: 0.5,
            },
        ])
        .unwrap();
        let r = em_responsibilities(&m, &[0.0]).unwrap();
        assert!((r.get(0, 0) - 0.5).abs() < 1e-12 && (r.get(0, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn underflow_is_reported() {
        let m = FreeGmm::new(vec![FreeComponent {
            mean: 0.0,
            variance: 1e-6,
            weight: 1.0,
        }])
        .unwrap();
        assert!(matches!(
            em_responsibilities(&m, &[1e3]),
            Err(Error::NumericalUnderflow(_))
        ));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            em_fit(&[], &EmConfig::new(2, 5)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            em_fit(&[1.0, 2.0], &EmConfig::new(0, 5)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            em_fit(&[1.0, 2.0], &EmConfig::new(3, 5)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn variance_floor_applies() {
        let data = [0.0, 0.0, 0.0, 10.0];
        let cfg = EmConfig {
            variance_floor: Some(0.01),
            ..EmConfig::new(2, 10)
        };
        let (m, _) = em_fit(&data, &cfg).unwrap();
        assert!(m.components().iter().all(|c| c.variance >= 0.01));
    }

    #[test]
    fn tolerance_stops_early() {
        let data: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let cfg = EmConfig {
            tol: 1e-3,
            ..EmConfig::new(2, 500)
        };
        let (_, trace) = em_fit(&data, &cfg).unwrap();
        assert!(trace.converged);
        assert!(trace.iterations < 500);
        assert_eq!(trace.log_likelihood.len(), trace.iterations);
    }
}
