//! The `gmmx` command line: fit, eval, sample, export-density and bench.
//!
//! Samples and density curves are CSV; models and reports are JSON.
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, Algorithm, BenchConfig, MethodSpec, PartitionSource};
use crate::error::{Error, Result};
use crate::learners::{
    build_grid, build_grid_2d, em_fit, fit_incremental, fit_one_iteration, EmConfig, EmInit,
    OneIterationMode, DEFAULT_T,
};
use crate::metrics::{default_partition, ipe, Empirical, DEFAULT_BINS};
use crate::model::{IntervalProbability, ModelFile};

#[derive(Debug, Parser)]
#[command(
    name = "gmmx",
    version,
    about = "Fixed-grid Gaussian mixture density estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to a CSV sample file and write it as JSON.
    Fit(FitArgs),
    /// Compare a model against a target (or data file) by IPE.
    Eval(EvalArgs),
    /// Draw samples from a model or target.
    Sample(SampleArgs),
    /// Write a density curve (or 2-d grid) as CSV.
    ExportDensity(ExportArgs),
    /// Run the seeded IPE benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ours,
    #[value(name = "ours_incremental", alias = "ours-incremental")]
    OursIncremental,
    Em,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    #[value(name = "even_grid", alias = "even-grid")]
    EvenGrid,
    Random,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV samples: one column for 1-d, two for 2-d.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "ours")]
    pub algo: AlgoArg,
    /// Grid units per axis (components for EM).
    #[arg(long, default_value_t = 200)]
    pub units: usize,
    /// Units on the second axis for 2-d data; defaults to --units.
    #[arg(long)]
    pub units_y: Option<usize>,
    /// Component scale as a multiple of the grid spacing.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    #[arg(long, value_enum, default_value = "approximate")]
    pub mode: ModeArg,
    /// Interval half-width for the incremental learner; defaults to sigma/4.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, value_enum, default_value = "even_grid")]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long)]
    pub variance_floor: Option<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    /// Reference model or target JSON.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub target: Option<PathBuf>,
    /// Reference CSV samples; also reports the model's log-likelihood.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub model: PathBuf,
    #[arg(long, short)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub model: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub y_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_hi: Option<f64>,
    #[arg(long)]
    pub y_points: Option<usize>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Full JSON config; the flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Comma-separated `algo:units:iters:t` descriptors,
    /// e.g. `ours:200:1:3,em:200:5:1`.
    #[arg(long)]
    pub methods: Option<String>,
    /// Range spanned by the IPE partition: `data` or `target`.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => 2,
        Error::NoMass | Error::NumericalUnderflow(_) => 4,
        _ => 3,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => fit(&a),
        Command::Eval(a) => eval(&a),
        Command::Sample(a) => sample(&a),
        Command::ExportDensity(a) => export_density(&a),
        Command::Bench(a) => bench(&a),
    }
}

/// Reads row-per-point samples. Blank lines and `#` comments are skipped;
/// every data row must have the same number of columns (1 or 2).
pub fn read_samples(path: &Path) -> Result<(usize, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    parse_samples(&text)
}

pub fn parse_samples(text: &str) -> Result<(usize, Vec<f64>)> {
    let mut dim = 0;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if dim == 0 {
            if fields.len() > 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 1 or 2 columns, found {}", fields.len()),
                });
            }
            dim = fields.len();
        } else if fields.len() != dim {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {dim} columns, found {}", fields.len()),
            });
        }
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("not a number: {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("non-finite value {f:?}"),
                });
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(Error::input("sample file has no data rows"));
    }
    Ok((dim, values))
}

pub fn write_samples(path: &Path, dim: usize, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(values.len() * 20);
    for row in values.chunks(dim) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Loads a model document, or a built-in target when `path` reads
/// `preset:<name>`.
pub fn read_model(path: &Path) -> Result<ModelFile> {
    if let Some(name) = path.to_str().and_then(|p| p.strip_prefix("preset:")) {
        return crate::synth::preset_target(name);
    }
    ModelFile::from_json(&fs::read_to_string(path)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Fits the model described by `args` to row-per-point `data`.
pub fn fit_model(args: &FitArgs, dim: usize, data: &[f64]) -> Result<ModelFile> {
    match (args.algo, dim) {
        (AlgoArg::Ours, 1) | (AlgoArg::OursIncremental, 1) => {
            let scaffold = build_grid(data, args.units, args.t.unwrap_or(DEFAULT_T))?;
            if args.algo == AlgoArg::Ours {
                Ok(fit_one_iteration(&scaffold, data, mode(args.mode))?.into())
            } else {
                Ok(fit_incremental(&scaffold, data, args.d)?.into())
            }
        }
        (AlgoArg::Ours, 2) => {
            let units = [args.units, args.units_y.unwrap_or(args.units)];
            let scaffold = build_grid_2d(data, units, args.t.unwrap_or(DEFAULT_T))?;
            Ok(fit_one_iteration(&scaffold, data, mode(args.mode))?.into())
        }
        (AlgoArg::Em, 1) => {
            let init = match args.init {
                InitArg::EvenGrid => EmInit::EvenGrid {
                    t: args.t.unwrap_or(1.0),
                },
                InitArg::Random => EmInit::Random { seed: args.seed },
            };
            let cfg = EmConfig {
                k: args.units,
                init,
                max_iters: args.iters,
                variance_floor: args.variance_floor,
                tol: args.tol,
            };
            Ok(em_fit(data, &cfg)?.0.into())
        }
        (algo, d) => Err(Error::input(format!(
            "{algo:?} does not support {d}-d data"
        ))),
    }
}

fn mode(m: ModeArg) -> OneIterationMode {
    match m {
        ModeArg::Exact => OneIterationMode::Exact,
        ModeArg::Approximate => OneIterationMode::Approximate,
    }
}

fn model_log_likelihood(model: &ModelFile, dim: usize, data: &[f64]) -> Result<f64> {
    if dim != model.dim() {
        return Err(Error::input(format!(
            "data is {dim}-d, model is {}-d",
            model.dim()
        )));
    }
    match model {
        ModelFile::Grid(g) => g.log_likelihood(data),
        ModelFile::Free(f) => f.log_likelihood(data),
        other => {
            crate::model::log_likelihood_from(data.chunks(dim).map(|x| other.pdf(x).unwrap_or(0.0)))
        }
    }
}

fn fit(args: &FitArgs) -> Result<()> {
    let (dim, data) = read_samples(&args.input)?;
    let start = Instant::now();
    let model = fit_model(args, dim, &data)?;
    let secs = start.elapsed().as_secs_f64();
    let ll = model_log_likelihood(&model, dim, &data)?;
    fs::write(&args.out, model.to_json()?)?;
    println!("log_likelihood: {ll:?}");
    println!("fit_time_secs: {secs}");
    Ok(())
}

fn one_d<'a>(m: &'a ModelFile, what: &str) -> Result<&'a dyn IntervalProbability> {
    m.as_interval_probability()
        .ok_or_else(|| Error::input(format!("{what} is not a 1-d distribution; IPE is 1-d only")))
}

fn eval(args: &EvalArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let f = one_d(&model, "model")?;
    let report = if let Some(target) = &args.target {
        let target = read_model(target)?;
        let g = one_d(&target, "target")?;
        let partition = default_partition(f.support(), g.support(), args.bins)?;
        ipe(f, g, &partition)?
    } else {
        let path = args
            .data
            .as_ref()
            .ok_or_else(|| Error::param("eval needs --target or --data"))?;
        let (dim, data) = read_samples(path)?;
        let ll = model_log_likelihood(&model, dim, &data)?;
        eprintln!("log_likelihood: {ll:?}");
        let emp = Empirical::new(&data)?;
        let partition = default_partition(f.support(), emp.support(), args.bins)?;
        ipe(f, &emp, &partition)?
    };
    write_text(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn sample(args: &SampleArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let values = model.sample(args.n, args.seed)?;
    write_samples(&args.out, model.dim(), &values)
}

fn axis_points(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::input(format!("need at least 2 points, got {n}")));
    }
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(Error::input(format!("invalid range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect())
}

/// Renders the density as CSV: `x,pdf` rows in 1-d, `x,y,pdf` rows in 2-d.
pub fn density_csv(model: &ModelFile, args: &ExportArgs) -> Result<String> {
    let bounds = model.bounds();
    let xs = axis_points(
        args.lo.unwrap_or(bounds[0].0),
        args.hi.unwrap_or(bounds[0].1),
        args.points,
    )?;
    let mut out = String::new();
    if model.dim() == 1 {
        out.push_str("x,pdf\n");
        for x in xs {
            writeln!(out, "{x},{}", model.pdf(&[x])?).expect("write to String");
        }
    } else {
        let ys = axis_points(
            args.y_lo.unwrap_or(bounds[1].0),
            args.y_hi.unwrap_or(bounds[1].1),
            args.y_points.unwrap_or(args.points),
        )?;
        out.push_str("x,y,pdf\n");
        for &x in &xs {
            for &y in &ys {
                writeln!(out, "{x},{y},{}", model.pdf(&[x, y])?).expect("write to String");
            }
        }
    }
    Ok(out)
}

fn export_density(args: &ExportArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    fs::write(&args.out, density_csv(&model, args)?)?;
    Ok(())
}

/// Parses `algo:units:iters:t` descriptors separated by commas.
pub fn parse_methods(text: &str) -> Result<Vec<MethodSpec>> {
    text.split(',')
        .map(|item| {
            let parts: Vec<&str> = item.trim().split(':').collect();
            if parts.len() != 4 {
                return Err(Error::param(format!(
                    "method {item:?} is not algo:units:iters:t"
                )));
            }
            let algorithm = match parts[0] {
                "ours" => Algorithm::Ours,
                "ours_incremental" => Algorithm::OursIncremental,
                "em" => Algorithm::Em,
                other => return Err(Error::param(format!("unknown algorithm {other:?}"))),
            };
            let num = |s: &str| Error::param(format!("bad number {s:?} in method {item:?}"));
            let m = MethodSpec {
                algorithm,
                units: parts[1].parse().map_err(|_| num(parts[1]))?,
                iterations: parts[2].parse().map_err(|_| num(parts[2]))?,
                t: parts[3].parse().map_err(|_| num(parts[3]))?,
            };
            m.validate()?;
            Ok(m)
        })
        .collect()
}

pub fn bench_config(args: &BenchArgs) -> Result<BenchConfig> {
    let mut config = match &args.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => BenchConfig::default(),
    };
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.samples {
        config.samples_per_trial = s;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(b) = args.bins {
        config.bins = b;
    }
    if let Some(p) = &args.partition {
        config.partition = match p.as_str() {
            "data" => PartitionSource::Data,
            "target" => PartitionSource::Target,
            other => return Err(Error::param(format!("unknown partition source {other:?}"))),
        };
    }
    if let Some(m) = &args.methods {
        config.methods = parse_methods(m)?;
    }
    config.validate()?;
    Ok(config)
}

fn bench(args: &BenchArgs) -> Result<()> {
    let config = bench_config(args)?;
    let report = run_bench(&config)?;
    println!(
        "{:<32} {:>10} {:>10} {:>9} {:>9}",
        "method", "mean IPE", "std", "failures", "secs"
    );
    for m in &report.methods {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.5}"));
        println!(
            "{:<32} {:>10} {:>10} {:>9} {:>9.3}",
            m.label,
            fmt(m.mean_ipe),
            fmt(m.std_ipe),
            m.failures,
            m.wall_time_secs
        );
    }
    if let Some(out) = &args.out {
        fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}
