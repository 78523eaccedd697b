//! Command-line front end.
//!
//! Every subcommand writes its effective configuration to
//! `<output>.config.json`. Passing that file back through `--config`
//! reproduces the output byte for byte.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 runtime or
//! numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use predasym_core::asymmetry::{detect, AsymmetryCurve};
use predasym_core::data::TimeSeries;
use predasym_core::embedding::EmbeddingParams;
use predasym_core::estimators::{te_spectrum, Estimator};
use predasym_core::resampling::{EnsembleConfig, EnsembleInput, SegmentSpec};
use predasym_core::robustness::SweepConfig;
use predasym_core::systems::{generate, random_bidirectional, random_chain, Coupling, Family, SystemSpec};
use predasym_core::Seed;

use crate::error::{Error, Result};
use crate::io;
use crate::parallel;

/// Seed fallback when `--seed` is absent.
pub const SEED_ENV: &str = "PREDASYM_SEED";

#[derive(Debug, Parser)]
#[command(name = "predasym", version, about = "Predictive-asymmetry causality test")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a synthetic system and write its series and coupling graph.
    Generate(GenerateArgs),
    /// TE spectra, asymmetry curves and verdicts for one pair of columns.
    Asymmetry(AsymmetryArgs),
    /// Coupling × length robustness sweep from a JSON config.
    Sweep(SweepArgs),
    /// Random-segment / resampling ensemble with percentile ribbons.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Primary output file; sidecars are written next to it.
    #[arg(long, short)]
    output: PathBuf,
    /// JSON run configuration, e.g. a previously written `.config.json`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct EmbeddingArgs {
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Lags per conditional series.
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    tau: usize,
}

impl EmbeddingArgs {
    fn params(&self) -> EmbeddingParams {
        EmbeddingParams { k: self.k, l: self.l, m: self.m, n: self.n, tau: self.tau }
    }
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    /// `vf` (visitation frequency) or `nn` (nearest neighbour).
    #[arg(long, default_value = "vf")]
    estimator: String,
    #[arg(long, default_value_t = 10)]
    eta_max: usize,
    #[arg(long, default_value_t = 1.0)]
    f: f64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: Common,
    /// System family, e.g. `logistic_bidir` or `henon_chain`.
    #[arg(long)]
    family: Option<String>,
    /// Number of observations.
    #[arg(long, default_value_t = 1000)]
    length: usize,
    /// Fixed coupling strength.
    #[arg(long, conflicts_with = "coupling_range")]
    coupling: Option<f64>,
    /// Coupling drawn uniformly from `[LO, HI)`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    coupling_range: Option<Vec<f64>>,
    /// Reverse coupling for bidirectional families.
    #[arg(long)]
    coupling_yx: Option<f64>,
    /// Variables per chain system.
    #[arg(long, default_value_t = 2)]
    chain_len: usize,
    #[arg(long)]
    transient: Option<usize>,
    /// Comma-separated initial state.
    #[arg(long, value_delimiter = ',')]
    initial: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct AsymmetryArgs {
    #[command(flatten)]
    common: Common,
    /// Series file (`.csv` or `.json`).
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// Conditioning column; repeatable.
    #[arg(long = "conditional")]
    conditionals: Vec<String>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[command(flatten)]
    embedding: EmbeddingArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// Uncertain records (`age_mean, age_sd, value_mean, value_sd`).
    #[arg(long, requires = "uncertain_y", conflicts_with = "input")]
    uncertain_x: Option<PathBuf>,
    #[arg(long, requires = "uncertain_x")]
    uncertain_y: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,
    #[arg(long, default_value_t = 100)]
    segments: usize,
    #[arg(long, default_value_t = 0.75)]
    min_frac: f64,
    #[arg(long, default_value_t = 1.0)]
    max_frac: f64,
    #[arg(long, default_value_t = 0)]
    resamples: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [10.0, 90.0])]
    percentiles: Vec<f64>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[command(flatten)]
    embedding: EmbeddingArgs,
}

/// Effective configuration of an `asymmetry` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymmetryRun {
    pub input: PathBuf,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub conditionals: Vec<String>,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default)]
    pub params: EmbeddingParams,
    pub eta_max: usize,
    pub f: f64,
}

/// Where ensemble inputs come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSource {
    Series { path: PathBuf, source: String, target: String },
    Uncertain { x: PathBuf, y: PathBuf, bin_width: f64 },
}

/// Effective configuration of an `ensemble` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleRun {
    pub input: EnsembleSource,
    pub config: EnsembleConfig,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Asymmetry(a) => cmd_asymmetry(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ensemble(a) => cmd_ensemble(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// `--seed`, else `PREDASYM_SEED`, else `None`.
fn flag_or_env_seed(flag: Option<u64>) -> Result<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Invalid(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn estimator(id: &str) -> Result<Estimator> {
    Ok(Estimator::from_id(id)?)
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Invalid(format!("{flag} is required without --config")))
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let spec = match &a.common.config {
        Some(path) => {
            let mut spec: SystemSpec = io::read_json(path)?;
            if let Some(s) = a.common.seed {
                spec.seed = Seed(s);
            }
            spec
        }
        None => {
            let family = Family::from_name(&required(a.family.clone(), "--family")?)?;
            let seed = Seed(flag_or_env_seed(a.common.seed)?.unwrap_or(0));
            let coupling = match (&a.coupling, &a.coupling_range) {
                (Some(c), _) => Coupling::Fixed(*c),
                (None, Some(r)) => Coupling::Range(r[0], r[1]),
                (None, None) => Coupling::Fixed(0.0),
            };
            let mut spec = match a.coupling_yx {
                Some(c) => random_bidirectional(family, coupling, Coupling::Fixed(c), a.length, seed)?,
                None => random_chain(family, coupling, a.length, a.chain_len, seed)?,
            };
            spec.transient = a.transient;
            spec.initial = a.initial.clone();
            spec
        }
    };
    let real = generate(&spec)?;
    let out = &a.common.output;
    io::write_file(out, |w| io::write_series_csv(w, &real.series))?;
    io::write_json(&io::sidecar(out, "truth.json"), &real.truth)?;
    io::write_json(&io::sidecar(out, "config.json"), &spec)
}

fn column<'a>(ms: &'a predasym_core::data::MultiSeries, label: &str, path: &Path) -> Result<&'a TimeSeries> {
    ms.by_label(label)
        .ok_or_else(|| Error::Invalid(format!("{}: no column '{label}' (have {:?})", path.display(), ms.labels())))
}

fn cmd_asymmetry(a: AsymmetryArgs) -> Result<()> {
    let run = match &a.common.config {
        Some(path) => io::read_json::<AsymmetryRun>(path)?,
        None => AsymmetryRun {
            input: required(a.input.clone(), "--input")?,
            source: required(a.source.clone(), "--source")?,
            target: required(a.target.clone(), "--target")?,
            conditionals: a.conditionals.clone(),
            estimator: estimator(&a.estimator.estimator)?,
            params: a.embedding.params(),
            eta_max: a.estimator.eta_max,
            f: a.estimator.f,
        },
    };
    let ms = io::read_series(&run.input)?;
    let x = column(&ms, &run.source, &run.input)?;
    let y = column(&ms, &run.target, &run.input)?;
    let conds = run
        .conditionals
        .iter()
        .map(|c| column(&ms, c, &run.input).cloned())
        .collect::<Result<Vec<_>>>()?;
    let needed = 2 * run.eta_max + 2;
    if x.len() < needed {
        return Err(Error::Invalid(format!(
            "eta_max {} needs at least {needed} observations, the input has {}",
            run.eta_max,
            x.len()
        )));
    }
    let fwd = te_spectrum(x, y, &conds, &run.params, run.eta_max, &run.estimator)?;
    let bwd = te_spectrum(y, x, &conds, &run.params, run.eta_max, &run.estimator)?;
    let cf = AsymmetryCurve::from_spectrum(&fwd, run.f)?;
    let cb = AsymmetryCurve::from_spectrum(&bwd, run.f)?;
    let (d1, d2) = (format!("{}->{}", run.source, run.target), format!("{}->{}", run.target, run.source));

    let out = &a.common.output;
    io::write_file(out, |w| io::write_curves_csv(w, &[(&d1, &cf), (&d2, &cb)]))?;
    io::write_file(&io::sidecar(out, "spectrum.csv"), |w| io::write_spectra_csv(w, &[(&d1, &fwd), (&d2, &bwd)]))?;
    io::write_json(&io::sidecar(out, "config.json"), &run)?;
    for (d, c) in [(&d1, &cf), (&d2, &cb)] {
        let a_norm = c.last_normalized();
        let verdict = if detect(a_norm, 1.0).is_positive() { "positive" } else { "negative" };
        let shown = a_norm.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(std::io::stdout(), "{d}: {verdict} (A_norm({}) = {shown})", run.eta_max);
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let path = required(a.common.config.clone(), "--config")?;
    let mut value: serde_json::Value = io::read_json(&path)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Invalid(format!("{}: sweep config must be a JSON object", path.display())))?;
    if let Some(s) = a.common.seed {
        obj.insert("master_seed".into(), s.into());
    } else if !obj.contains_key("master_seed") {
        obj.insert("master_seed".into(), flag_or_env_seed(None)?.unwrap_or(0).into());
    }
    let cfg: SweepConfig =
        serde_json::from_value(value).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let result = parallel::sweep(&cfg, a.jobs)?;
    let out = &a.common.output;
    io::write_file(out, |w| io::write_sweep_csv(w, &result))?;
    io::write_json(&io::sidecar(out, "json"), &result)?;
    io::write_json(&io::sidecar(out, "config.json"), &cfg)
}

fn cmd_ensemble(a: EnsembleArgs) -> Result<()> {
    let mut run = match &a.common.config {
        Some(path) => io::read_json::<EnsembleRun>(path)?,
        None => {
            let input = match (&a.uncertain_x, &a.uncertain_y) {
                (Some(x), Some(y)) => EnsembleSource::Uncertain { x: x.clone(), y: y.clone(), bin_width: a.bin_width },
                _ => EnsembleSource::Series {
                    path: required(a.input.clone(), "--input or --uncertain-x/--uncertain-y")?,
                    source: required(a.source.clone(), "--source")?,
                    target: required(a.target.clone(), "--target")?,
                },
            };
            let config = EnsembleConfig {
                segments: SegmentSpec {
                    count: a.segments,
                    min_frac: a.min_frac,
                    max_frac: a.max_frac,
                    seed: Seed(flag_or_env_seed(None)?.unwrap_or(0)),
                },
                resamples: a.resamples,
                eta_max: a.estimator.eta_max,
                f: a.estimator.f,
                estimator: estimator(&a.estimator.estimator)?,
                params: a.embedding.params(),
                percentiles: (a.percentiles[0], a.percentiles[1]),
            };
            EnsembleRun { input, config }
        }
    };
    if let Some(s) = a.common.seed {
        run.config.segments.seed = Seed(s);
    }
    run.config.validate()?;
    let input = match &run.input {
        EnsembleSource::Series { path, source, target } => {
            let ms = io::read_series(path)?;
            EnsembleInput::Series { x: column(&ms, source, path)?.clone(), y: column(&ms, target, path)?.clone() }
        }
        EnsembleSource::Uncertain { x, y, bin_width } => {
            EnsembleInput::Uncertain { x: io::read_uncertain(x)?, y: io::read_uncertain(y)?, bin_width: *bin_width }
        }
    };
    let result = parallel::ensemble(&input, &run.config, a.jobs)?;
    let out = &a.common.output;
    io::write_file(out, |w| io::write_ensemble_csv(w, &result))?;
    io::write_json(&io::sidecar(out, "config.json"), &run)?;
    eprintln!(
        "{} members, {} failed, {} age inversions",
        result.members, result.failures, result.inversions
    );
    Ok(())
}
