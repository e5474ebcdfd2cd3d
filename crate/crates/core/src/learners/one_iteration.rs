use serde::{Deserialize, Serialize};

use super::mass::{component_mass, ComponentMass};
use super::normalized;
use crate::error::{Error, Result};
use crate::model::GridGmm;

/// How the single weight update is formed from the component masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OneIterationMode {
    /// `(pi_n + l_n) / (1 + sum l)`, then renormalized.
    Exact,
    /// `l_n / sum l`: the large-grid limit, independent of the prior weights.
    #[default]
    Approximate,
}

/// The exact one-step update `(pi_n + l_n) / (1 + sum_m l_m)` before any
/// renormalization.
///
/// For normalized `prior` the entries satisfy
/// `l_n / (1 + L) <= out_n <= 1 / (1 + N) + l_n / (1 + L)` whenever
/// `N * L >= 1` and the prior is uniform.
pub fn exact_update(prior: &[f64], mass: &ComponentMass) -> Vec<f64> {
    let denom = 1.0 + mass.total();
    prior
        .iter()
        .zip(mass.values())
        .map(|(p, l)| (p + l) / denom)
        .collect()
}

/// Learns the grid weights in a single pass over the data. Means and scale
/// are left as they are.
pub fn fit_one_iteration(
    scaffold: &GridGmm,
    data: &[f64],
    mode: OneIterationMode,
) -> Result<GridGmm> {
    if !scaffold.has_uniform_weights() {
        log::warn!("one-iteration fit called on a scaffold with non-uniform weights");
    }
    let mass = component_mass(scaffold, data)?;
    let total = mass.total();
    if !(total > 0.0) {
        return Err(Error::NoMass);
    }
    if !total.is_finite() {
        return Err(Error::NumericalUnderflow(format!(
            "component mass total is {total}"
        )));
    }
    let weights = match mode {
        OneIterationMode::Exact => normalized(exact_update(scaffold.weights(), &mass))?,
        OneIterationMode::Approximate => normalized(mass.into_inner())?,
    };
    scaffold.with_weights(weights)
}

/// The weights after one EM step from the scaffold with the grid means and
/// scale held fixed: `pi_n = (1/D) sum_d Gamma_dn`, renormalized.
pub fn first_em_step_weights(data: &[f64], scaffold: &GridGmm) -> Result<Vec<f64>> {
    scaffold.check_data(data)?;
    let n = scaffold.len();
    let prior = scaffold.weights();
    let mut scratch = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut rows = 0usize;
    for (d, x) in data.chunks(scaffold.dim()).enumerate() {
        scaffold.component_densities(x, &mut scratch);
        let mut total = 0.0;
        for (s, p) in scratch.iter_mut().zip(prior) {
            *s *= p;
            total += *s;
        }
        if !(total > 0.0) {
            return Err(Error::NumericalUnderflow(format!(
                "zero mixture density at sample {d}"
            )));
        }
        for (a, s) in acc.iter_mut().zip(&scratch) {
            *a += s / total;
        }
        rows += 1;
    }
    for a in &mut acc {
        *a /= rows as f64;
    }
    normalized(acc)
}
