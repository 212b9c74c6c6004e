//! Lower bound on the expected optimal rate, and the scaling exponents of the
//! asymptotic results as metadata.
//!
//! Exponents describe how a rate scales like `m^e`; the constants are unknown,
//! so they are only good for drawing reference slopes.

use serde::Serialize;

use crate::error::Result;
use crate::knapsack::{solve_fractional_knapsack, KnapsackInstance};
use crate::popularity::{hit_probability, PopularityModel};
use crate::system::{StorageProfile, SystemConfig};

const EPS: f64 = 1e-9;

/// `max(0, Σ v_i − O*)` with `v_i = 1 − (1 − p_i)^m̃` and `O*` the fractional
/// knapsack optimum over weights `max(m̃ p_i, 1)` and capacity `memory`.
///
/// A stored copy serves at most one request per batch, so a file needs about
/// `m̃ p_i` copies to cover its demand. Whatever the knapsack cannot cover
/// must come from the central server.
pub fn prop1_lower_bound(model: &PopularityModel, batch_size: usize, memory: f64) -> Result<f64> {
    let pmf = model.pmf();
    let values: Vec<f64> = pmf
        .iter()
        .map(|&p| hit_probability(p, batch_size))
        .collect();
    let weights = pmf
        .iter()
        .map(|&p| (batch_size as f64 * p).max(1.0))
        .collect();
    let inst = KnapsackInstance::new(values, weights, memory)?;
    let x = solve_fractional_knapsack(&inst).x;
    // Σ v_i (1 − x_i) equals Σ v_i − O* but is exactly 0 when all of it fits.
    let uncovered: f64 = inst
        .values()
        .iter()
        .zip(&x)
        .map(|(v, x)| v * (1.0 - x))
        .sum();
    Ok(uncovered.max(0.0))
}

/// [`prop1_lower_bound`] for a cluster configuration.
pub fn prop1_for_config(model: &PopularityModel, config: &SystemConfig) -> Result<f64> {
    prop1_lower_bound(model, config.batch_size(), config.memory as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// The asymptotic results with an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// PPMM on a homogeneous cluster, `β < 1`.
    #[serde(rename = "ppmm_homogeneous")]
    PpmmHomogeneous,
    /// Optimal-rate lower bound, `β > 1`.
    #[serde(rename = "optimal_lower")]
    OptimalLower,
    /// KS+MLP achievability, `β > 1`.
    #[serde(rename = "ksmlp_upper")]
    KsmlpUpper,
    /// Lower bound when almost all caches share little memory, `β > 1`.
    #[serde(rename = "poor_subset_lower")]
    PoorSubsetLower,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [
        Theorem::PpmmHomogeneous,
        Theorem::OptimalLower,
        Theorem::KsmlpUpper,
        Theorem::PoorSubsetLower,
    ];
}

/// Rate scales as `m^exponent` in the given regime. An exponent of
/// `-inf` means the rate decays faster than any power of `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeExponent {
    pub theorem: Theorem,
    pub regime: String,
    pub exponent: f64,
    pub direction: Direction,
}

/// Exponent for `theorem` given `β`, `μ = log_m M` and `γ = log_m n`.
///
/// `None` when the theorem does not cover `β`. For the `M = n` case with
/// `β > 1` this returns `(2 − μβ)/β`; the derivation behind it arrives at
/// `(1 − μ(β − 1))/β`, which agrees only at `μ = 1`.
pub fn regime_exponent(theorem: Theorem, beta: f64, mu: f64, gamma: f64) -> Option<RegimeExponent> {
    if !(beta.is_finite() && mu.is_finite() && gamma.is_finite()) {
        return None;
    }
    let below = mu < gamma - EPS;
    let equal = (mu - gamma).abs() <= EPS;
    let make = |regime: &str, exponent: f64, direction| {
        Some(RegimeExponent {
            theorem,
            regime: regime.to_string(),
            exponent,
            direction,
        })
    };
    match theorem {
        Theorem::PpmmHomogeneous => {
            if !(0.0..1.0).contains(&beta) {
                return None;
            }
            if below {
                make("M < n", 1.0, Direction::Upper)
            } else if equal {
                make("M = n", 2.0, Direction::Upper)
            } else {
                make("M > n", f64::NEG_INFINITY, Direction::Upper)
            }
        }
        Theorem::OptimalLower | Theorem::KsmlpUpper => {
            if beta <= 1.0 {
                return None;
            }
            let direction = if theorem == Theorem::OptimalLower {
                Direction::Lower
            } else {
                Direction::Upper
            };
            let critical = 1.0 / (beta - 1.0);
            let steep = 1.0 - mu * (beta - 1.0);
            if gamma <= critical + EPS {
                if below {
                    make("M < n", steep, direction)
                } else if equal {
                    make("M = n", (2.0 - mu * beta) / beta, direction)
                } else {
                    make("M > n", 0.0, direction)
                }
            } else if mu < critical - EPS {
                make("M below m^(1/(beta-1))", steep, direction)
            } else {
                make("M at least m^(1/(beta-1))", 0.0, direction)
            }
        }
        Theorem::PoorSubsetLower => {
            if beta <= 1.0 {
                return None;
            }
            make(
                "nearly all caches jointly hold less than n",
                1.0 - mu * (beta - 1.0),
                Direction::Lower,
            )
        }
    }
}

/// All exponents that apply to `config`.
pub fn applicable_exponents(config: &SystemConfig) -> Vec<RegimeExponent> {
    let (mu, gamma) = (config.mu(), config.gamma());
    // Integer comparison decides the M vs n case exactly.
    let mu = match config.memory.cmp(&config.n) {
        std::cmp::Ordering::Equal => gamma,
        _ => mu,
    };
    Theorem::ALL
        .iter()
        .filter_map(|&t| regime_exponent(t, config.beta, mu, gamma))
        .collect()
}

/// Memory `⌈3 n ln m⌉` past which PPMM on a homogeneous cluster has
/// vanishing rate for `β < 1`.
pub fn corollary1_memory(n: usize, m: usize) -> usize {
    (3.0 * n as f64 * (m as f64).ln()).ceil() as usize
}

/// Whether `profile` has enough poor caches for the heterogeneous `ω(1)`
/// lower bound with `β < 1`.
///
/// Poor means at most `max(1, ⌈n / m^(1/(1−β))⌉)` slots. The result asks for
/// a constant fraction of poor caches without naming it; this check uses
/// `⌈(1 − ρ) m⌉`, the share PPMM cannot do without.
pub fn heterogeneous_lower_applies(config: &SystemConfig, profile: &StorageProfile) -> bool {
    if !(0.0..1.0).contains(&config.beta) {
        return false;
    }
    let m = config.m as f64;
    let limit = (config.n as f64 / m.powf(1.0 / (1.0 - config.beta)))
        .ceil()
        .max(1.0);
    let poor = profile
        .capacities()
        .iter()
        .filter(|&&c| c as f64 <= limit)
        .count();
    let need = ((1.0 - config.rho) * m).ceil().max(1.0) as usize;
    poor >= need
}

/// Heterogeneous rate stays bounded away from zero while a homogeneous
/// cluster with the same total memory reaches `M ≥ 3 n ln m`.
pub fn heterogeneity_contrast(config: &SystemConfig, profile: &StorageProfile) -> bool {
    heterogeneous_lower_applies(config, profile)
        && config.memory >= corollary1_memory(config.n, config.m)
}

/// Whether the `⌈m^(2−β+δ)⌉` largest caches have equal capacity, which the
/// KS+MLP guarantee needs for `β > 1`.
pub fn top_caches_homogeneous(config: &SystemConfig, profile: &StorageProfile, delta: f64) -> bool {
    if config.beta <= 1.0 {
        return false;
    }
    let need = (config.m as f64).powf(2.0 - config.beta + delta).ceil() as usize;
    profile.top_count() >= need.min(config.m)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileChecks {
    pub heterogeneous_lower: bool,
    pub heterogeneity_contrast: bool,
    pub top_caches_homogeneous: bool,
}

/// Everything `bounds` reports for one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub memory: usize,
    pub beta: f64,
    pub rho: f64,
    pub batch_size: usize,
    pub gamma: f64,
    pub mu: f64,
    pub lower_bound: f64,
    pub ppmm_vanishing_memory: usize,
    pub exponents: Vec<RegimeExponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<ProfileChecks>,
}

pub fn bounds_report(
    config: &SystemConfig,
    profile: Option<&StorageProfile>,
    delta: f64,
) -> Result<BoundsReport> {
    let model = PopularityModel::zipf(config.n, config.beta)?;
    Ok(BoundsReport {
        m: config.m,
        n: config.n,
        memory: config.memory,
        beta: config.beta,
        rho: config.rho,
        batch_size: config.batch_size(),
        gamma: config.gamma(),
        mu: config.mu(),
        lower_bound: prop1_for_config(&model, config)?,
        ppmm_vanishing_memory: corollary1_memory(config.n, config.m),
        exponents: applicable_exponents(config),
        checks: profile.map(|p| ProfileChecks {
            heterogeneous_lower: heterogeneous_lower_applies(config, p),
            heterogeneity_contrast: heterogeneity_contrast(config, p),
            top_caches_homogeneous: top_caches_homogeneous(config, p, delta),
        }),
    })
}
