use super::data_range;
use crate::error::{Error, Result};
use crate::model::{GridAxis, GridGmm};

/// Default ratio of component scale to grid spacing.
pub const DEFAULT_T: f64 = 3.0;

fn check_grid_params(units: usize, t: f64) -> Result<()> {
    if units < 2 {
        return Err(Error::param(format!(
            "need at least 2 grid units per axis, got {units}"
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param(format!(
            "scale ratio t must be positive, got {t}"
        )));
    }
    Ok(())
}

/// Lays `n_units` components at the cell midpoints of the data range with
/// `sigma = t * r`, `r = (max - min) / n_units`, and uniform weights.
pub fn build_grid(data: &[f64], n_units: usize, t: f64) -> Result<GridGmm> {
    check_grid_params(n_units, t)?;
    let (lo, hi) = data_range(data, 1, 0)?;
    let axis = GridAxis::new(lo, hi, n_units);
    GridGmm::uniform(vec![axis], t * axis.spacing)
}

/// Two-dimensional grid over row-per-point data. Each axis gets its own
/// spacing; the shared isotropic scale is `t` times the wider spacing.
pub fn build_grid_2d(data: &[f64], units: [usize; 2], t: f64) -> Result<GridGmm> {
    check_grid_params(units[0], t)?;
    check_grid_params(units[1], t)?;
    let axes: Vec<GridAxis> = (0..2)
        .map(|axis| data_range(data, 2, axis).map(|(lo, hi)| GridAxis::new(lo, hi, units[axis])))
        .collect::<Result<_>>()?;
    let r = axes[0].spacing.max(axes[1].spacing);
    GridGmm::uniform(axes, t * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_unit_grid_on_zero_to_ten() {
        let data = [0.0, 3.0, 10.0, 7.5];
        let g = build_grid(&data, 10, 1.0).unwrap();
        assert_eq!(g.axes()[0].spacing, 1.0);
        assert_eq!(g.sigma(), 1.0);
        let expect: Vec<f64> = (0..10).map(|i| i as f64 + 0.5).collect();
        assert_eq!(g.axis_centers(0), &expect[..]);
        assert!(g.weights().iter().all(|&w| w == 0.1));
    }

    #[test]
    fn weights_sum_to_one_and_spacing() {
        let g = build_grid(&[0.0, 10.0], 200, 3.0).unwrap();
        assert_eq!(g.axes()[0].spacing, 0.05);
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            build_grid(&[2.0, 2.0], 10, 1.0),
            Err(Error::DegenerateRange { .. })
        ));
        assert!(matches!(
            build_grid(&[0.0, 1.0], 1, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_grid(&[], 10, 1.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            build_grid(&[0.0, 1.0], 4, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            build_grid_2d(&[0.0, 1.0, 2.0, 1.0], [3, 3], 1.0),
            Err(Error::DegenerateRange { axis: 1, .. })
        ));
    }

    #[test]
    fn two_dim_grid() {
        let data = [0.0, 0.0, 4.0, 2.0, 1.0, 1.0];
        let g = build_grid_2d(&data, [4, 4], 2.0).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.axes()[0].spacing, 1.0);
        assert_eq!(g.axes()[1].spacing, 0.5);
        assert_eq!(g.sigma(), 2.0);
    }
}
