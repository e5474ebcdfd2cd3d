//! Weight learning for the grid model, the legacy incremental learner, and the
//! classical EM baseline.

mod em;
mod grid;
mod incremental;
mod mass;
mod one_iteration;

pub use em::{em_fit, em_responsibilities, em_step, EmConfig, EmInit, EmTrace, Responsibilities};
pub use grid::{build_grid, build_grid_2d, DEFAULT_T};
pub use incremental::{fit_incremental, incremental_step_size};
pub use mass::{component_mass, ComponentMass};
pub use one_iteration::{exact_update, first_em_step_weights, fit_one_iteration, OneIterationMode};

use crate::error::{Error, Result};

pub(crate) fn data_range(data: &[f64], dim: usize, axis: usize) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::input("data is empty"));
    }
    if !data.len().is_multiple_of(dim) {
        return Err(Error::input(format!(
            "flat data of length {} is not a whole number of {dim}-d points",
            data.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in data.iter().skip(axis).step_by(dim) {
        if !x.is_finite() {
            return Err(Error::input(format!("non-finite sample value {x}")));
        }
        lo = lo.min(*x);
        hi = hi.max(*x);
    }
    if hi == lo {
        return Err(Error::DegenerateRange { axis, value: lo });
    }
    Ok((lo, hi))
}

/// Divides by the sum; fails when there is nothing to divide.
pub(crate) fn normalized(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = v.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NoMass);
    }
    for x in &mut v {
        *x /= total;
    }
    Ok(v)
}
