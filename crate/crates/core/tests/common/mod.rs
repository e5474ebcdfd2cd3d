#![allow(clippy::needless_range_loop)]

//! Straight-line reference implementations used as test oracles. Nothing here
//! calls into the library's numeric code paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn phi(x: f64, mean: f64, sd: f64) -> f64 {
    let pi = std::f64::consts::PI;
    1.0 / (sd * (2.0 * pi).sqrt()) * (-(x - mean) * (x - mean) / (2.0 * sd * sd)).exp()
}

/// Composite Simpson integration of the normal density over `[a, b]`.
pub fn normal_mass_quadrature(a: f64, b: f64, mean: f64, sd: f64) -> f64 {
    let n = 4000;
    let h = (b - a) / n as f64;
    let mut s = phi(a, mean, sd) + phi(b, mean, sd);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(x, mean, sd);
    }
    s * h / 3.0
}

pub fn naive_component_mass(centers: &[f64], sd: f64, data: &[f64]) -> Vec<f64> {
    let mut l = vec![0.0; centers.len()];
    for n in 0..centers.len() {
        for d in 0..data.len() {
            l[n] += phi(data[d], centers[n], sd);
        }
    }
    l
}

#[derive(Debug, Clone)]
pub struct NaiveGmm {
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn naive_responsibilities(m: &NaiveGmm, data: &[f64]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &x in data {
        let mut row = Vec::new();
        let mut total = 0.0;
        for k in 0..m.means.len() {
            let p = m.weights[k] * phi(x, m.means[k], m.vars[k].sqrt());
            row.push(p);
            total += p;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
        out.push(row);
    }
    out
}

pub fn naive_em_step(m: &NaiveGmm, data: &[f64], floor: f64) -> NaiveGmm {
    let g = naive_responsibilities(m, data);
    let k = m.means.len();
    let mut next = m.clone();
    let mut masses = vec![0.0; k];
    for j in 0..k {
        let mut nk = 0.0;
        let mut sx = 0.0;
        for d in 0..data.len() {
            nk += g[d][j];
            sx += g[d][j] * data[d];
        }
        masses[j] = nk;
        let mean = sx / nk;
        let mut sv = 0.0;
        for d in 0..data.len() {
            sv += g[d][j] * (data[d] - mean) * (data[d] - mean);
        }
        next.means[j] = mean;
        next.vars[j] = f64::max(sv / nk, floor);
    }
    let total: f64 = masses.iter().sum();
    for j in 0..k {
        next.weights[j] = masses[j] / total;
    }
    next
}

pub fn naive_log_likelihood(m: &NaiveGmm, data: &[f64]) -> f64 {
    let mut ll = 0.0;
    for &x in data {
        let mut p = 0.0;
        for k in 0..m.means.len() {
            p += m.weights[k] * phi(x, m.means[k], m.vars[k].sqrt());
        }
        ll += p.ln();
    }
    ll
}

/// Replays the legacy incremental learner step by step, with interval masses
/// from quadrature.
pub fn scripted_incremental(centers: &[f64], sd: f64, r: f64, d: f64, data: &[f64]) -> Vec<f64> {
    let n = centers.len();
    let mut w = vec![1.0 / n as f64; n];
    for &x in data {
        let mut i = 0;
        for j in 1..n {
            if (x - centers[j]).abs() < (x - centers[i]).abs() {
                i = j;
            }
        }
        let mu = centers[i];
        let side = if x >= mu { mu + r } else { mu - r };
        let dl = normal_mass_quadrature(mu - d, mu + d, mu, sd)
            - normal_mass_quadrature(side - d, side + d, mu, sd);
        for m in 0..n {
            if m == i {
                w[m] += dl;
            } else {
                w[m] -= dl / n as f64;
            }
        }
    }
    for v in w.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// One line of acceptance output.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id}: {name} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}
