//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a failed `verify`, 2 bad arguments or config,
//! 3 a policy outside its regime, 4 an I/O failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bounds::{bounds_report, prop1_lower_bound};
use crate::error::{Error, Result};
use crate::harness::{preset, run_sweep, ExperimentSpec, Policy, SweepResult};
use crate::ksmlp::DEFAULT_DELTA;
use crate::popularity::PopularityModel;
use crate::report::{render_svg, write_summary_csv, write_trials_csv};
use crate::system::{StorageProfile, SystemConfig};
use crate::verify::run_verify;

/// Master seed when neither a flag, the config nor `CACHESIM_SEED` gives one.
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const SEED_ENV: &str = "CACHESIM_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "cachesim",
    version,
    about = "Distributed cache cluster simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single-point experiment and print its mean rate.
    Simulate(RunArgs),
    /// Run every point of an experiment sweep.
    Sweep(RunArgs),
    /// Print the lower bound and scaling exponents for a cluster as JSON.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Cross-check the solvers against exhaustive oracles.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Random instances per suite.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
    /// Run one of the built-in figure sweeps.
    Preset {
        #[arg(value_enum)]
        name: PresetName,
        #[command(flatten)]
        opts: Overrides,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetName {
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    delta: Option<f64>,
    /// Also write an SVG chart.
    #[arg(long)]
    plot: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Ppmm,
    Ksmlp,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Ppmm => Policy::Ppmm,
            PolicyArg::Ksmlp => Policy::Ksmlp,
        }
    }
}

/// Cluster description for `bounds`. Unlike sweeps it accepts `M < m`,
/// including `M = 0`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    m: usize,
    n: usize,
    #[serde(rename = "M")]
    memory: usize,
    #[serde(default = "default_rho")]
    rho: f64,
    beta: f64,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    capacities: Option<Vec<usize>>,
}

fn default_rho() -> f64 {
    crate::harness::PRESET_RHO
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::UnsupportedRegime(_) => EXIT_REGIME,
        Error::Io(_) => EXIT_IO,
        Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        Error::Json(e) if e.is_io() => EXIT_IO,
        _ => EXIT_BAD_CONFIG,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_BAD_CONFIG
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cachesim: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Simulate(args) => {
            let spec = read_json::<ExperimentSpec>(&args.config)?;
            let spec = apply_overrides(spec, &args.opts);
            if spec.points()?.len() != 1 {
                return Err(Error::InvalidArgument(
                    "simulate expects a spec with exactly one point; use sweep".into(),
                ));
            }
            run_and_write(spec, &args.opts)
        }
        Command::Sweep(args) => {
            let spec = read_json::<ExperimentSpec>(&args.config)?;
            let spec = apply_overrides(spec, &args.opts);
            run_and_write(spec, &args.opts)
        }
        Command::Preset { name, opts } => {
            let key = match name {
                PresetName::Fig4 => "fig4",
                PresetName::Fig5 => "fig5",
                PresetName::Fig6 => "fig6",
            };
            let spec = preset(key).expect("built-in preset");
            let spec = apply_overrides(spec, &opts);
            run_and_write(spec, &opts)
        }
        Command::Bounds { config, delta } => {
            let cfg = read_json::<BoundsConfig>(&config)?;
            let system = SystemConfig {
                m: cfg.m,
                n: cfg.n,
                memory: cfg.memory,
                rho: cfg.rho,
                beta: cfg.beta,
            };
            check_bounds_config(&system)?;
            let profile = match cfg.capacities {
                Some(c) => {
                    let p = StorageProfile::from_capacities(c)?;
                    if p.len() != system.m || p.total() != system.memory {
                        return Err(Error::InvalidArgument(format!(
                            "capacities describe {} caches and {} slots, config says m = {} and M = {}",
                            p.len(),
                            p.total(),
                            system.m,
                            system.memory
                        )));
                    }
                    Some(p)
                }
                None => None,
            };
            let delta = delta.or(cfg.delta).unwrap_or(DEFAULT_DELTA);
            let report = bounds_report(&system, profile.as_ref(), delta)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(EXIT_OK)
        }
        Command::Verify { seed, cases } => {
            let seed = resolve_seed(seed, None)?;
            let report = run_verify(cases, seed);
            for s in &report.suites {
                println!(
                    "{:<9} passed {:>5}  failed {:>3}",
                    s.name, s.passed, s.failed
                );
            }
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn check_bounds_config(c: &SystemConfig) -> Result<()> {
    if c.m == 0 || c.n == 0 {
        return Err(Error::InvalidArgument(
            "m and n must both be at least 1".into(),
        ));
    }
    if !(c.rho > 0.0 && c.rho < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rho must lie in (0, 1), got {}",
            c.rho
        )));
    }
    if !(c.beta.is_finite() && c.beta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and non-negative, got {}",
            c.beta
        )));
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn apply_overrides(mut spec: ExperimentSpec, o: &Overrides) -> ExperimentSpec {
    if let Some(t) = o.trials {
        spec.trials = t;
    }
    if let Some(p) = o.policy {
        spec.policy = p.into();
    }
    if let Some(d) = o.delta {
        spec.delta = d;
    }
    if o.seed.is_some() {
        spec.seed = o.seed;
    }
    spec
}

/// Flag, then config, then `CACHESIM_SEED`, then [`DEFAULT_SEED`].
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "{SEED_ENV} must be an unsigned 64-bit integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run_and_write(spec: ExperimentSpec, opts: &Overrides) -> Result<i32> {
    let seed = resolve_seed(None, spec.seed)?;
    let result = run_sweep(&spec, seed, opts.jobs)?;

    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let name = &result.spec.name;
    let mut trials = Vec::new();
    write_trials_csv(&result, &mut trials)?;
    files.push((opts.out.join(format!("{name}.csv")), trials));
    let mut summary = Vec::new();
    write_summary_csv(&result, &mut summary)?;
    files.push((opts.out.join(format!("{name}_summary.csv")), summary));
    let mut echo = serde_json::to_vec_pretty(&result.spec)?;
    echo.push(b'\n');
    files.push((opts.out.join(format!("{name}_config.json")), echo));
    if opts.plot {
        let bounds = lower_bounds(&result)?;
        let svg = render_svg(&result, Some(&bounds));
        files.push((opts.out.join(format!("{name}.svg")), svg.into_bytes()));
    }
    write_all_or_nothing(&opts.out, &files)?;

    for p in &result.points {
        println!(
            "{:<10} {}={:<6} m={:<4} n={:<5} M={:<6} mean={:.4} stderr={:.4}",
            p.point.curve,
            result.spec.sweep.axis(),
            p.point.x,
            p.point.config.m,
            p.point.config.n,
            p.point.config.memory,
            p.mean,
            p.stderr
        );
    }
    Ok(EXIT_OK)
}

/// Lower bound for every point of a sweep.
pub fn lower_bounds(result: &SweepResult) -> Result<Vec<f64>> {
    result
        .points
        .iter()
        .map(|p| {
            let c = &p.point.config;
            let model = PopularityModel::zipf(c.n, c.beta)?;
            prop1_lower_bound(&model, c.batch_size(), c.memory as f64)
        })
        .collect()
}

fn write_all_or_nothing(dir: &Path, files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, (path, bytes)) in files.iter().enumerate() {
        if let Err(e) = fs::write(path, bytes) {
            for (done, _) in &files[..=i] {
                let _ = fs::remove_file(done);
            }
            return Err(e.into());
        }
    }
    Ok(())
}
