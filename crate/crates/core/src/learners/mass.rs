use crate::error::Result;
use crate::model::GridGmm;

/// Summed unweighted density of the data under each grid component,
/// `l_n = sum_d phi_n(x_d)`.
///
/// `l_n` is the derivative with respect to `pi_n` of the surrogate objective
/// `L(pi) = sum_n sum_d pi_n phi_n(x_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMass(Vec<f64>);

impl ComponentMass {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, t: f64) {
        let s = self.sum + t;
        if self.sum.abs() >= t.abs() {
            self.comp += (self.sum - s) + t;
        } else {
            self.comp += (t - s) + self.sum;
        }
        self.sum = s;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Computes `l_n` for every component. Per-component sums are compensated, so
/// the result is insensitive to the order of `data`.
pub fn component_mass(model: &GridGmm, data: &[f64]) -> Result<ComponentMass> {
    model.check_data(data)?;
    let mut acc = vec![Neumaier::default(); model.len()];
    let mut scratch = vec![0.0; model.len()];
    for x in data.chunks(model.dim()) {
        model.component_densities(x, &mut scratch);
        for (a, &p) in acc.iter_mut().zip(&scratch) {
            a.add(p);
        }
    }
    Ok(ComponentMass(
        acc.into_iter().map(Neumaier::value).collect(),
    ))
}
