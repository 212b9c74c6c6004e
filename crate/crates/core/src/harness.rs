//! Seeded Monte-Carlo sweeps.
//!
//! An [`ExperimentSpec`] expands into sweep points, one cluster each. Every
//! point computes its placement once; each trial then draws a fresh batch
//! (and, for KS+MLP, fresh delivery choices) from
//! `mix_seed(master, point, trial)`. Results are gathered in
//! `(point, trial)` order, so they do not depend on the thread count.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksmlp::{ksmlp_place, mlp_deliver, DEFAULT_DELTA};
use crate::popularity::PopularityModel;
use crate::ppmm::{ppmm_deliver, ppmm_place, ppmm_replication};
use crate::rng::{mix_seed, mlp_seed};
use crate::system::{DeliveryReport, PlacementMap, StorageProfile, SystemConfig};

/// Load factor used by every preset.
pub const PRESET_RHO: f64 = 0.97;
/// Trials per point in the presets.
pub const PRESET_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Ppmm,
    Ksmlp,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Ppmm => "ppmm",
            Policy::Ksmlp => "ksmlp",
        })
    }
}

/// Storage of one point given outright.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    RichPoor { m: usize, m1: usize, k: usize },
    Explicit { capacities: Vec<usize> },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<StorageProfile> {
        match self {
            ProfileSpec::RichPoor { m, m1, k } => StorageProfile::rich_poor(*m, *m1, *k),
            ProfileSpec::Explicit { capacities } => {
                StorageProfile::from_capacities(capacities.clone())
            }
        }
    }
}

/// What varies across the points of a sweep.
///
/// Rich-cache counts are given as divisors `d` of `m` and resolve to
/// `m1 = ⌈m / d⌉`; each divisor is one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "lowercase")]
pub enum Sweep {
    /// Number of files, with `m = n / files_per_cache` and a memory target
    /// of `memory_per_file · n`. The rich caches get
    /// `k = ⌊(target − (m − m1)) / m1⌋` slots and `M` is recomputed from
    /// `(m1, k)`.
    N {
        values: Vec<usize>,
        files_per_cache: usize,
        memory_per_file: usize,
        m1_divisors: Vec<usize>,
    },
    /// Slots per rich cache at fixed `m` and `n`.
    K {
        m: usize,
        n: usize,
        values: Vec<usize>,
        m1_divisors: Vec<usize>,
    },
    /// Number of rich caches at fixed `m`, `n` and memory target.
    M1 {
        m: usize,
        n: usize,
        memory: usize,
        values: Vec<usize>,
    },
    /// Explicit profiles over a fixed number of files.
    Profiles {
        n: usize,
        profiles: Vec<ProfileSpec>,
    },
}

impl Sweep {
    pub fn axis(&self) -> &'static str {
        match self {
            Sweep::N { .. } => "n",
            Sweep::K { .. } => "k",
            Sweep::M1 { .. } => "m1",
            Sweep::Profiles { .. } => "profile",
        }
    }
}

/// A complete experiment description, as read from and echoed to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub policy: Policy,
    pub beta: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Master seed; `None` leaves the choice to the caller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub sweep: Sweep,
}

fn default_rho() -> f64 {
    PRESET_RHO
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_trials() -> usize {
    PRESET_TRIALS
}

/// One cluster of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    /// Curve this point belongs to, e.g. `m1=m/20`.
    pub curve: String,
    /// Position along the sweep axis.
    pub x: f64,
    pub config: SystemConfig,
    pub profile: StorageProfile,
    /// Caches at the largest capacity, and that capacity.
    pub m1: usize,
    pub k: usize,
}

fn curve_label(divisor: usize) -> String {
    if divisor == 1 {
        "m1=m".to_string()
    } else {
        format!("m1=m/{divisor}")
    }
}

fn rich_count(m: usize, divisor: usize) -> Result<usize> {
    if divisor == 0 {
        return Err(Error::invalid("m1 divisors must be positive"));
    }
    Ok(m.div_ceil(divisor))
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::invalid(format!(
                "experiment name {:?} must be non-empty and use only letters, digits, '_' or '-'",
                self.name
            )));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        let empty = match &self.sweep {
            Sweep::N {
                values,
                m1_divisors,
                ..
            }
            | Sweep::K {
                values,
                m1_divisors,
                ..
            } => values.is_empty() || m1_divisors.is_empty(),
            Sweep::M1 { values, .. } => values.is_empty(),
            Sweep::Profiles { profiles, .. } => profiles.is_empty(),
        };
        if empty {
            return Err(Error::invalid("the sweep has no points"));
        }
        Ok(())
    }

    /// Expands the sweep, curve by curve, in declaration order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        let mut push = |curve: String, x: f64, n: usize, profile: StorageProfile| -> Result<()> {
            let config = SystemConfig::new(profile.len(), n, profile.total(), self.rho, self.beta)?;
            out.push(SweepPoint {
                index: out.len(),
                curve,
                x,
                config,
                m1: profile.top_count(),
                k: profile.max_capacity(),
                profile,
            });
            Ok(())
        };
        match &self.sweep {
            Sweep::N {
                values,
                files_per_cache,
                memory_per_file,
                m1_divisors,
            } => {
                if *files_per_cache == 0 {
                    return Err(Error::invalid("files_per_cache must be positive"));
                }
                for &d in m1_divisors {
                    for &n in values {
                        if n == 0 || n % files_per_cache != 0 {
                            return Err(Error::invalid(format!(
                                "n = {n} is not a positive multiple of files_per_cache = {files_per_cache}"
                            )));
                        }
                        let m = n / files_per_cache;
                        let m1 = rich_count(m, d)?;
                        let profile =
                            StorageProfile::rich_poor_for_memory(m, m1, memory_per_file * n)?;
                        push(curve_label(d), n as f64, n, profile)?;
                    }
                }
            }
            Sweep::K {
                m,
                n,
                values,
                m1_divisors,
            } => {
                for &d in m1_divisors {
                    let m1 = rich_count(*m, d)?;
                    for &k in values {
                        let profile = StorageProfile::rich_poor(*m, m1, k)?;
                        push(curve_label(d), k as f64, *n, profile)?;
                    }
                }
            }
            Sweep::M1 {
                m,
                n,
                memory,
                values,
            } => {
                for &m1 in values {
                    let profile = StorageProfile::rich_poor_for_memory(*m, m1, *memory)?;
                    push("m1".to_string(), m1 as f64, *n, profile)?;
                }
            }
            Sweep::Profiles { n, profiles } => {
                for (i, p) in profiles.iter().enumerate() {
                    push("profile".to_string(), (i + 1) as f64, *n, p.build()?)?;
                }
            }
        }
        Ok(out)
    }
}

/// Rate versus `n = m`, `β = 0.3`, `M = 3n`, PPMM.
pub fn preset_fig4() -> ExperimentSpec {
    ExperimentSpec {
        name: "fig4".into(),
        policy: Policy::Ppmm,
        beta: 0.3,
        rho: PRESET_RHO,
        delta: DEFAULT_DELTA,
        trials: PRESET_TRIALS,
        seed: None,
        sweep: Sweep::N {
            values: vec![50, 100, 200, 400],
            files_per_cache: 1,
            memory_per_file: 3,
            m1_divisors: vec![1, 2, 10, 20],
        },
    }
}

/// Rate versus rich-cache size `k` at `m = n = 400`, `β = 0.3`, PPMM.
pub fn preset_fig5() -> ExperimentSpec {
    ExperimentSpec {
        name: "fig5".into(),
        policy: Policy::Ppmm,
        beta: 0.3,
        rho: PRESET_RHO,
        delta: DEFAULT_DELTA,
        trials: PRESET_TRIALS,
        seed: None,
        sweep: Sweep::K {
            m: 400,
            n: 400,
            values: vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 40, 48],
            m1_divisors: vec![1, 2, 4, 8],
        },
    }
}

/// Rate versus `m` with `n = 5m`, `M = 3n`, `β = 1.2`, KS+MLP.
pub fn preset_fig6() -> ExperimentSpec {
    ExperimentSpec {
        name: "fig6".into(),
        policy: Policy::Ksmlp,
        beta: 1.2,
        rho: PRESET_RHO,
        delta: DEFAULT_DELTA,
        trials: PRESET_TRIALS,
        seed: None,
        sweep: Sweep::N {
            values: vec![250, 500, 1000, 2000],
            files_per_cache: 5,
            memory_per_file: 3,
            m1_divisors: vec![1, 10, 20, 40],
        },
    }
}

pub fn preset(name: &str) -> Option<ExperimentSpec> {
    match name {
        "fig4" => Some(preset_fig4()),
        "fig5" => Some(preset_fig5()),
        "fig6" => Some(preset_fig6()),
        _ => None,
    }
}

/// A cluster with its placement done, ready for trials.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: SystemConfig,
    policy: Policy,
    model: PopularityModel,
    placement: PlacementMap,
}

impl Scenario {
    pub fn prepare(
        config: &SystemConfig,
        profile: &StorageProfile,
        policy: Policy,
        delta: f64,
    ) -> Result<Self> {
        config.validate()?;
        config.check_profile(profile)?;
        let model = PopularityModel::zipf(config.n, config.beta)?;
        let placement = match policy {
            Policy::Ppmm => ppmm_place(&ppmm_replication(&model, config), profile)?,
            Policy::Ksmlp => ksmlp_place(config, profile, &model, delta)?.placement,
        };
        Ok(Self {
            config: *config,
            policy,
            model,
            placement,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn placement(&self) -> &PlacementMap {
        &self.placement
    }

    pub fn model(&self) -> &PopularityModel {
        &self.model
    }

    pub fn run_trial(&self, trial_seed: u64) -> DeliveryReport {
        let batch = self
            .model
            .sample_batch(self.config.batch_size(), trial_seed);
        match self.policy {
            Policy::Ppmm => ppmm_deliver(&batch, &self.placement),
            Policy::Ksmlp => mlp_deliver(&batch, &self.placement, mlp_seed(trial_seed)),
        }
    }
}

/// Placement plus one trial. Sweeps reuse a [`Scenario`] instead.
pub fn run_trial(
    config: &SystemConfig,
    profile: &StorageProfile,
    policy: Policy,
    delta: f64,
    trial_seed: u64,
) -> Result<DeliveryReport> {
    Ok(Scenario::prepare(config, profile, policy, delta)?.run_trial(trial_seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub matched: usize,
    pub unserved: usize,
    pub rate: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: SweepPoint,
    pub trials: Vec<TrialRecord>,
    pub mean: f64,
    pub stderr: f64,
}

impl PointResult {
    fn aggregate(point: SweepPoint, trials: Vec<TrialRecord>) -> Self {
        let rates: Vec<f64> = trials.iter().map(|t| t.rate as f64).collect();
        let (mean, stderr) = mean_stderr(&rates);
        Self {
            point,
            trials,
            mean,
            stderr,
        }
    }

    pub fn mean_matched(&self) -> f64 {
        mean_stderr(
            &self
                .trials
                .iter()
                .map(|t| t.matched as f64)
                .collect::<Vec<_>>(),
        )
        .0
    }

    pub fn mean_unserved(&self) -> f64 {
        mean_stderr(
            &self
                .trials
                .iter()
                .map(|t| t.unserved as f64)
                .collect::<Vec<_>>(),
        )
        .0
    }
}

/// Arithmetic mean and `sd / √T` with the sample standard deviation; the
/// error is 0 for a single value.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let t = values.len();
    if t == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / t as f64;
    if t == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (t - 1) as f64).sqrt() / (t as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// The spec that ran, with the seed filled in.
    pub spec: ExperimentSpec,
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn seed(&self) -> u64 {
        self.spec.seed.unwrap_or_default()
    }

    /// Distinct curve labels in first-seen order.
    pub fn curves(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.point.curve.as_str()) {
                out.push(&p.point.curve);
            }
        }
        out
    }

    pub fn curve(&self, label: &str) -> Vec<&PointResult> {
        self.points
            .iter()
            .filter(|p| p.point.curve == label)
            .collect()
    }
}

/// Runs every trial of every point.
///
/// `seed` is the master seed and wins over `spec.seed`. `jobs` caps the
/// worker threads; `None` uses rayon's default. A point that fails to
/// prepare aborts the sweep with an error naming it.
pub fn run_sweep(spec: &ExperimentSpec, seed: u64, jobs: Option<usize>) -> Result<SweepResult> {
    let points = spec.points()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker threads: {e}")))?;

    pool.install(|| {
        let scenarios: Vec<Scenario> = points
            .par_iter()
            .map(|p| {
                Scenario::prepare(&p.config, &p.profile, spec.policy, spec.delta).map_err(|e| {
                    Error::SweepPoint {
                        index: p.index,
                        label: format!("{} {}={}", p.curve, spec.sweep.axis(), p.x),
                        source: Box::new(e),
                    }
                })
            })
            .collect::<Result<_>>()?;

        let t = spec.trials;
        let records: Vec<TrialRecord> = (0..points.len() * t)
            .into_par_iter()
            .map(|job| {
                let (point, trial) = (job / t, job % t);
                let trial_seed = mix_seed(seed, point as u64, trial as u64);
                let report = scenarios[point].run_trial(trial_seed);
                TrialRecord {
                    trial,
                    seed: trial_seed,
                    matched: report.matched,
                    unserved: report.unserved.len(),
                    rate: report.rate,
                }
            })
            .collect();

        let mut records = records.into_iter();
        let results = points
            .into_iter()
            .map(|p| PointResult::aggregate(p, records.by_ref().take(t).collect()))
            .collect();
        let mut spec = spec.clone();
        spec.seed = Some(seed);
        Ok(SweepResult {
            spec,
            points: results,
        })
    })
}
