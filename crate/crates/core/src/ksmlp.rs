//! Knapsack Storage + Match Least Popular (KS+MLP), for Zipf popularity with
//! `beta > 1`.
//!
//! Placement: every file gets a replication weight `w_i`; a fractional
//! knapsack over values `1 - (1 - p_i)^m̃` and weights `w_i` with capacity `M`
//! picks the files to store, and the copies of the chosen files are dealt out
//! round-robin over the caches in decreasing capacity order.
//!
//! Delivery: files are visited from least to most popular. All requests for a
//! file are matched to idle caches holding it, chosen uniformly at random, or
//! none of them are.

use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::knapsack::{solve_fractional_knapsack, KnapsackInstance, KnapsackSolution};
use crate::popularity::{PopularityModel, RequestBatch};
use crate::rng::{below, rng_from_seed};
use crate::system::{DeliveryReport, PlacementMap, StorageProfile, SystemConfig};

/// Default tail parameter `δ`.
pub const DEFAULT_DELTA: f64 = 0.5;

/// Replication weights and the two popularity breakpoints.
///
/// `n1` and `n2` are 1-based file counts: files `2..=n1` get weights
/// proportional to their expected demand, files `n1+1..=n2` a flat
/// `⌈4 p_1 (ln m)^2⌉`, and the rest `⌈1/δ + 1⌉`. File 1 is stored on every
/// cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsWeights {
    pub weights: Vec<usize>,
    pub n1: usize,
    pub n2: usize,
}

pub fn ks_weights(model: &PopularityModel, config: &SystemConfig, delta: f64) -> Result<KsWeights> {
    let beta = config.beta;
    if beta <= 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "KS+MLP weights need a Zipf parameter above 1, got {beta}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if model.file_count() != config.n {
        return Err(Error::invalid(format!(
            "popularity model covers {} files but config says n = {}",
            model.file_count(),
            config.n
        )));
    }
    let n = config.n;
    let m = config.m as f64;
    let batch = config.batch_size() as f64;
    let p1 = model.prob(0);
    let ln_m = m.ln();

    let n2 = (m.powf((1.0 + delta) / beta).floor() as usize).clamp(1, n);
    let n1 = ((batch * p1).powf(1.0 / beta) / ln_m.powf(2.0 / beta)).floor();
    // ln 1 = 0 sends n1 to infinity; the clamp handles it.
    let n1 = if n1.is_finite() { n1 as usize } else { n };
    let n1 = n1.clamp(1, n).min(n2);

    let middle = (4.0 * p1 * ln_m * ln_m).ceil() as usize;
    let tail = (1.0 / delta + 1.0).ceil() as usize;
    let weights = (1..=n)
        .map(|i| {
            let w = if i == 1 {
                config.m
            } else if i <= n1 {
                ((1.0 + p1 / 2.0) * batch * model.prob(i - 1)).ceil() as usize
            } else if i <= n2 {
                middle
            } else {
                tail
            };
            w.max(1)
        })
        .collect();
    Ok(KsWeights { weights, n1, n2 })
}

/// Knapsack with values `1 - (1 - p_i)^m̃`, the given weights and capacity `M`.
pub fn ks_instance(
    model: &PopularityModel,
    config: &SystemConfig,
    weights: &[usize],
) -> Result<KnapsackInstance> {
    let batch = config.batch_size();
    let values = (0..model.file_count())
        .map(|i| model.hit_probability(i, batch))
        .collect();
    KnapsackInstance::new(
        values,
        weights.iter().map(|&w| w as f64).collect(),
        config.memory as f64,
    )
}

/// Deals `weights[f]` copies of every selected file `f` round-robin over the
/// caches.
///
/// Copies are taken in ascending file order. A cursor walks the caches
/// cyclically, and each copy goes to the next cache that has a free slot and
/// does not already hold the file. A copy that fits nowhere is dropped and
/// counted in [`PlacementMap::dropped_copies`].
pub fn ks_place(
    selected: &[usize],
    weights: &[usize],
    profile: &StorageProfile,
) -> Result<PlacementMap> {
    let m = profile.len();
    let mut placement = PlacementMap::empty(profile, weights.len());
    let mut files = selected.to_vec();
    files.sort_unstable();
    files.dedup();
    if let Some(&bad) = files.iter().find(|&&f| f >= weights.len()) {
        return Err(Error::invalid(format!("selected file {bad} has no weight")));
    }
    let mut cursor = 0;
    for file in files {
        for _ in 0..weights[file] {
            let slot = (0..m)
                .map(|step| (cursor + step) % m)
                .find(|&s| placement.can_place(file, s));
            match slot {
                Some(s) => {
                    placement.place(file, s)?;
                    cursor = (s + 1) % m;
                }
                None => placement.record_dropped(1),
            }
        }
    }
    debug_assert!(placement.check_invariants().is_ok());
    Ok(placement)
}

/// Everything the KS placement phase produced.
#[derive(Debug, Clone)]
pub struct KsPlacement {
    pub weights: KsWeights,
    pub solution: KnapsackSolution,
    pub placement: PlacementMap,
}

/// Weights, knapsack and round-robin placement in one go. Only items with
/// `x_i = 1` are stored; the fractional item is dropped.
pub fn ksmlp_place(
    config: &SystemConfig,
    profile: &StorageProfile,
    model: &PopularityModel,
    delta: f64,
) -> Result<KsPlacement> {
    config.check_profile(profile)?;
    let weights = ks_weights(model, config, delta)?;
    let instance = ks_instance(model, config, &weights.weights)?;
    let solution = solve_fractional_knapsack(&instance);
    let placement = ks_place(&solution.selected(), &weights.weights, profile)?;
    Ok(KsPlacement {
        weights,
        solution,
        placement,
    })
}

/// Match Least Popular delivery.
///
/// Files are visited from the least popular to the most popular. If file `i`
/// has more requests than idle caches storing it, all of its requests stay
/// unmatched. Otherwise each request gets a distinct idle cache, drawn
/// uniformly without replacement (a partial Fisher–Yates shuffle driven by
/// `seed`), and those caches stop being idle.
pub fn mlp_deliver(batch: &RequestBatch, placement: &PlacementMap, seed: u64) -> DeliveryReport {
    let mut rng = rng_from_seed(seed);
    let mut busy = vec![false; placement.cache_count()];
    let mut assignment = vec![None; batch.len()];
    let requests = batch.requests();

    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&r| (Reverse(requests[r]), r));

    let mut idle = Vec::new();
    for group in order.chunk_by(|&a, &b| requests[a] == requests[b]) {
        let file = requests[group[0]];
        idle.clear();
        idle.extend(
            placement
                .replicas(file)
                .iter()
                .copied()
                .filter(|&s| !busy[s]),
        );
        if group.len() > idle.len() {
            continue;
        }
        for (j, &r) in group.iter().enumerate() {
            let pick = j + below(&mut rng, idle.len() - j);
            idle.swap(j, pick);
            busy[idle[j]] = true;
            assignment[r] = Some(idle[j]);
        }
    }
    DeliveryReport::from_assignment(requests, assignment)
}

/// Full KS+MLP pipeline for one batch.
pub fn ksmlp_run(
    config: &SystemConfig,
    profile: &StorageProfile,
    model: &PopularityModel,
    batch: &RequestBatch,
    delta: f64,
    seed: u64,
) -> Result<DeliveryReport> {
    let placed = ksmlp_place(config, profile, model, delta)?;
    Ok(mlp_deliver(batch, &placed.placement, seed))
}
