use super::normalized;
use crate::error::{Error, Result};
use crate::model::GridGmm;
use crate::special::normal_interval;

/// Mass of a grid component on its middle interval `(mu - d, mu + d]` minus
/// its mass on the equal-width interval centred one grid step away.
///
/// The value is the same on either side and for every component, and it is
/// strictly positive for `0 < d < r` because the normal is unimodal.
pub fn incremental_step_size(sigma: f64, spacing: f64, d: f64) -> f64 {
    let mid = normal_interval(-d, d, 0.0, sigma);
    let side = normal_interval(spacing - d, spacing + d, 0.0, sigma);
    mid - side
}

/// The legacy sample-by-sample learner.
///
/// Each sample adds the step size to its nearest component's weight and takes
/// `step / N` from every other component. Negative weights are clamped to
/// zero before the final renormalization. `d` defaults to `sigma / 4`.
pub fn fit_incremental(scaffold: &GridGmm, data: &[f64], d: Option<f64>) -> Result<GridGmm> {
    if scaffold.dim() != 1 {
        return Err(Error::input(
            "the incremental learner supports 1-d grids only",
        ));
    }
    scaffold.check_data(data)?;
    let centers = scaffold.axis_centers(0);
    let r = scaffold.axes()[0].spacing;
    let sigma = scaffold.sigma();
    let d = d.unwrap_or(sigma / 4.0);
    if !(d > 0.0) || d >= r {
        return Err(Error::param(format!(
            "interval half-width d = {d} must lie in (0, r) with r = {r}"
        )));
    }
    let n = centers.len();
    let mut weights = scaffold.weights().to_vec();
    for &x in data {
        let i = nearest(centers, x);
        // the side interval faces the sample; both sides have equal mass
        let mu = centers[i];
        let side = if x >= mu { mu + r } else { mu - r };
        let mid_mass = normal_interval(mu - d, mu + d, mu, sigma);
        let side_mass = normal_interval(side - d, side + d, mu, sigma);
        let step = mid_mass - side_mass;
        let share = step / n as f64;
        for (m, w) in weights.iter_mut().enumerate() {
            if m == i {
                *w += step;
            } else {
                *w -= share;
            }
        }
    }
    for w in &mut weights {
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    scaffold.with_weights(normalized(weights)?)
}

/// Index of the center closest to `x`; ties go to the lower index.
fn nearest(centers: &[f64], x: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, &c) in centers.iter().enumerate() {
        let dist = (x - c).abs();
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::build_grid;

    #[test]
    fn single_point_pulls_weight_to_its_center() {
        let g = build_grid(&[0.0, 10.0], 10, 1.0).unwrap();
        let fitted = fit_incremental(&g, &[3.5], None).unwrap();
        let w = fitted.weights();
        let argmax = (0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap();
        assert_eq!(argmax, 3);
    }

    #[test]
    fn step_is_positive() {
        for (sigma, r, d) in [
            (1.0, 1.0, 0.25),
            (3.0, 1.0, 0.75),
            (0.2, 1.0, 0.9),
            (5.0, 0.5, 0.49),
        ] {
            assert!(incremental_step_size(sigma, r, d) > 0.0);
        }
    }

    #[test]
    fn d_must_be_below_spacing() {
        let g = build_grid(&[0.0, 10.0], 10, 5.0).unwrap();
        // default d = 5r/4 >= r
        assert!(matches!(
            fit_incremental(&g, &[1.0], None),
            Err(Error::InvalidParameter(_))
        ));
        assert!(fit_incremental(&g, &[1.0], Some(0.5)).is_ok());
        assert!(matches!(
            fit_incremental(&g, &[1.0], Some(0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }
}
