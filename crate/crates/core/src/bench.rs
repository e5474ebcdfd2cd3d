//! Seeded benchmark comparing the learners by IPE against random targets.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{
    build_grid, em_fit, fit_incremental, fit_one_iteration, EmConfig, EmInit, OneIterationMode,
};
use crate::metrics::{default_partition, ipe, Empirical, DEFAULT_BINS};
use crate::model::{IntervalProbability, Partition, TargetMixture};
use crate::synth::{random_target, TargetSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ours,
    OursIncremental,
    Em,
}

/// One learner configuration.
///
/// For `em`, `t` sets the even-grid initial variances to `(t * r)^2`; for the
/// grid learners it sets `sigma = t * r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub algorithm: Algorithm,
    pub units: usize,
    pub iterations: usize,
    pub t: f64,
}

impl MethodSpec {
    pub fn ours(units: usize, t: f64) -> Self {
        MethodSpec {
            algorithm: Algorithm::Ours,
            units,
            iterations: 1,
            t,
        }
    }

    pub fn em(units: usize, iterations: usize) -> Self {
        MethodSpec {
            algorithm: Algorithm::Em,
            units,
            iterations,
            t: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min_units = if self.algorithm == Algorithm::Em {
            1
        } else {
            2
        };
        if self.units < min_units {
            return Err(Error::param(format!(
                "{self}: needs at least {min_units} units"
            )));
        }
        if self.iterations == 0 {
            return Err(Error::param(format!(
                "{self}: needs at least one iteration"
            )));
        }
        if self.algorithm != Algorithm::Em && self.iterations != 1 {
            return Err(Error::param(format!(
                "{self}: grid learners make exactly one pass"
            )));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::param(format!("{self}: t must be positive")));
        }
        Ok(())
    }

    /// Fits this method and returns the fitted model as an interval-probability operand.
    pub fn fit(&self, data: &[f64]) -> Result<Box<dyn IntervalProbability + Send + Sync>> {
        Ok(match self.algorithm {
            Algorithm::Ours => {
                let scaffold = build_grid(data, self.units, self.t)?;
                Box::new(fit_one_iteration(
                    &scaffold,
                    data,
                    OneIterationMode::Approximate,
                )?)
            }
            Algorithm::OursIncremental => {
                let scaffold = build_grid(data, self.units, self.t)?;
                Box::new(fit_incremental(&scaffold, data, None)?)
            }
            Algorithm::Em => {
                let cfg = EmConfig {
                    init: EmInit::EvenGrid { t: self.t },
                    ..EmConfig::new(self.units, self.iterations)
                };
                Box::new(em_fit(data, &cfg)?.0)
            }
        })
    }

    fn init_description(&self) -> &'static str {
        match self.algorithm {
            Algorithm::Ours | Algorithm::OursIncremental => {
                "uniform weights on the midpoint grid, sigma = t*r"
            }
            Algorithm::Em => "uniform weights, means on the midpoint grid, variances (t*r)^2",
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.algorithm {
            Algorithm::Ours => "ours",
            Algorithm::OursIncremental => "ours_incremental",
            Algorithm::Em => "em",
        };
        write!(
            f,
            "{name}/{}u/{}it/t={}",
            self.units, self.iterations, self.t
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub trials: usize,
    pub samples_per_trial: usize,
    pub master_seed: u64,
    pub methods: Vec<MethodSpec>,
    pub bins: usize,
    /// Template for the random targets; its seed is replaced per trial.
    pub target: TargetSpec,
    #[serde(default)]
    pub partition: PartitionSource,
}

/// Which range the shared IPE partition of a trial spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSource {
    /// The sampled data range, padded 1%.
    #[default]
    Data,
    /// The truncated support of the analytic target, padded 1%.
    Target,
}

impl Default for BenchConfig {
    /// One-pass grid learner against EM at decreasing unit counts, all with
    /// component scale equal to the grid spacing.
    fn default() -> Self {
        BenchConfig {
            trials: 50,
            samples_per_trial: 2000,
            master_seed: 2023,
            methods: vec![
                MethodSpec::ours(200, 1.0),
                MethodSpec::em(200, 5),
                MethodSpec::em(50, 5),
                MethodSpec::em(10, 5),
                MethodSpec::em(2, 5),
            ],
            bins: DEFAULT_BINS,
            target: TargetSpec::default(),
            partition: PartitionSource::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.samples_per_trial == 0 || self.bins == 0 {
            return Err(Error::param(
                "trials, samples_per_trial and bins must all be at least 1",
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::param("bench needs at least one method"));
        }
        self.methods.iter().try_for_each(MethodSpec::validate)
    }

    /// Seed of trial `i`: master seed plus trial index.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.master_seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub label: String,
    pub method: MethodSpec,
    pub init: String,
    /// Mean IPE over successful trials; `None` if every trial failed.
    pub mean_ipe: Option<f64>,
    /// Sample standard deviation over successful trials.
    pub std_ipe: Option<f64>,
    /// IPE against the analytic target; `None` marks a failed trial.
    pub per_trial: Vec<Option<f64>>,
    /// Mean IPE against the sampled dataset itself.
    pub mean_ipe_empirical: Option<f64>,
    pub per_trial_empirical: Vec<Option<f64>>,
    pub failures: usize,
    pub failure_details: Vec<TrialFailure>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub methods: Vec<MethodReport>,
}

impl BenchReport {
    /// Copy with every timing field zeroed.
    pub fn without_timing(&self) -> BenchReport {
        let mut r = self.clone();
        for m in &mut r.methods {
            m.wall_time_secs = 0.0;
        }
        r
    }

    pub fn method(&self, label: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.label == label)
    }
}

/// Analytic and empirical IPE of one fitted method in one trial.
struct TrialOutcome {
    ipe: Result<(f64, f64)>,
    secs: f64,
}

/// The dataset and shared partition for one trial.
pub struct Trial {
    pub target: TargetMixture,
    pub data: Vec<f64>,
    pub partition: Partition,
}

pub fn prepare_trial(config: &BenchConfig, trial: usize) -> Result<Trial> {
    let seed = config.trial_seed(trial);
    let target = random_target(&TargetSpec {
        seed,
        ..config.target.clone()
    })?;
    let data = target.sample(config.samples_per_trial, seed)?;
    let range = match config.partition {
        PartitionSource::Data => Empirical::new(&data)?.support(),
        PartitionSource::Target => target.support(),
    };
    let partition = default_partition(range, range, config.bins)?;
    Ok(Trial {
        target,
        data,
        partition,
    })
}

fn run_method(method: &MethodSpec, trial: &Trial) -> TrialOutcome {
    let start = Instant::now();
    let fitted = method.fit(&trial.data);
    let secs = start.elapsed().as_secs_f64();
    let ipe = fitted.and_then(|model| {
        let analytic = ipe(&*model, &trial.target, &trial.partition)?.value;
        let empirical = ipe(&*model, &Empirical::new(&trial.data)?, &trial.partition)?.value;
        Ok((analytic, empirical))
    });
    TrialOutcome { ipe, secs }
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

/// Runs every trial, fitting all methods on each trial's shared dataset.
///
/// Trials run in parallel; results are merged by trial index. A learner
/// failure is recorded against its method and never aborts the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let per_trial: Vec<Vec<TrialOutcome>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let trial = prepare_trial(config, i)?;
            Ok(config
                .methods
                .iter()
                .map(|m| run_method(m, &trial))
                .collect())
        })
        .collect::<Result<_>>()?;

    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(k, method)| {
            let mut analytic = Vec::with_capacity(config.trials);
            let mut empirical = Vec::with_capacity(config.trials);
            let mut failure_details = Vec::new();
            let mut wall = 0.0;
            for (trial, outcomes) in per_trial.iter().enumerate() {
                let o = &outcomes[k];
                wall += o.secs;
                match &o.ipe {
                    Ok((a, e)) => {
                        analytic.push(Some(*a));
                        empirical.push(Some(*e));
                    }
                    Err(err) => {
                        analytic.push(None);
                        empirical.push(None);
                        failure_details.push(TrialFailure {
                            trial,
                            message: err.to_string(),
                        });
                    }
                }
            }
            let ok: Vec<f64> = analytic.iter().flatten().copied().collect();
            let ok_emp: Vec<f64> = empirical.iter().flatten().copied().collect();
            let (mean_ipe, std_ipe) = mean_std(&ok);
            MethodReport {
                label: method.to_string(),
                method: *method,
                init: method.init_description().to_string(),
                mean_ipe,
                std_ipe,
                per_trial: analytic,
                mean_ipe_empirical: mean_std(&ok_emp).0,
                per_trial_empirical: empirical,
                failures: failure_details.len(),
                failure_details,
                wall_time_secs: wall,
            }
        })
        .collect();
    Ok(BenchReport {
        config: config.clone(),
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            trials: 3,
            samples_per_trial: 300,
            methods: vec![MethodSpec::ours(50, 3.0), MethodSpec::em(3, 5)],
            ..Default::default()
        }
    }

    #[test]
    fn report_is_consistent() {
        let r = run_bench(&small()).unwrap();
        for m in &r.methods {
            assert_eq!(m.per_trial.len(), 3);
            let ok: Vec<f64> = m.per_trial.iter().flatten().copied().collect();
            let mean = ok.iter().sum::<f64>() / ok.len() as f64;
            assert!((m.mean_ipe.unwrap() - mean).abs() < 1e-12);
            assert!(ok.iter().all(|v| (0.0..=2.0).contains(v)));
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(run_bench(&BenchConfig {
            trials: 0,
            ..small()
        })
        .is_err());
        let mut c = small();
        c.methods.push(MethodSpec {
            algorithm: Algorithm::Ours,
            units: 200,
            iterations: 3,
            t: 3.0,
        });
        assert!(run_bench(&c).is_err());
    }

    #[test]
    fn failures_are_counted_not_fatal() {
        // more EM components than samples fails every trial
        let c = BenchConfig {
            samples_per_trial: 5,
            methods: vec![MethodSpec::em(10, 5), MethodSpec::ours(4, 1.0)],
            ..small()
        };
        let r = run_bench(&c).unwrap();
        assert_eq!(r.methods[0].failures, 3);
        assert_eq!(r.methods[0].mean_ipe, None);
        assert_eq!(r.methods[1].failures, 0);
    }
}
