//! Proportional Placement and Maximum Matching (PPMM).
//!
//! File `i` is replicated on `d_i ≈ M·p_i` distinct caches. At delivery time
//! requests are matched to caches holding their file by a maximum-cardinality
//! bipartite matching; whatever is left goes to the central server.

use crate::error::{Error, Result};
use crate::matching::{build_request_graph, max_matching};
use crate::popularity::{PopularityModel, RequestBatch};
use crate::system::{DeliveryReport, PlacementMap, StorageProfile, SystemConfig};

/// Replica counts `d_1..d_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationPlan {
    copies: Vec<usize>,
}

impl ReplicationPlan {
    /// Explicit replica counts; each must be at most `caches`.
    pub fn new(copies: Vec<usize>, caches: usize) -> Result<Self> {
        if let Some(bad) = copies.iter().position(|&d| d > caches) {
            return Err(Error::invalid(format!(
                "file {bad} asks for {} copies but there are only {caches} caches",
                copies[bad]
            )));
        }
        Ok(Self { copies })
    }

    /// `d_i = clamp(round(M·p_i), 0, m)`, then repaired so that
    /// `Σ d_i = min(M, n·m)`.
    ///
    /// The repair walks the files cyclically (deficits from the most popular
    /// file forward, surpluses from the least popular file backward) so no
    /// file moves by more than one copy per pass.
    pub fn proportional(pmf: &[f64], memory: usize, caches: usize) -> Self {
        let n = pmf.len();
        if n == 0 {
            return Self { copies: Vec::new() };
        }
        let mut copies: Vec<usize> = pmf
            .iter()
            .map(|&p| ((memory as f64 * p).round().max(0.0) as usize).min(caches))
            .collect();
        let target = memory.min(n.saturating_mul(caches));
        let mut total: usize = copies.iter().sum();

        let mut i = 0;
        while total < target {
            if copies[i] < caches {
                copies[i] += 1;
                total += 1;
            }
            i = (i + 1) % n;
        }
        let mut i = n - 1;
        while total > target {
            if copies[i] > 0 {
                copies[i] -= 1;
                total -= 1;
            }
            i = if i == 0 { n - 1 } else { i - 1 };
        }
        Self { copies }
    }

    pub fn copies(&self) -> &[usize] {
        &self.copies
    }

    pub fn total(&self) -> usize {
        self.copies.iter().sum()
    }
}

pub fn ppmm_replication(model: &PopularityModel, config: &SystemConfig) -> ReplicationPlan {
    ReplicationPlan::proportional(model.pmf(), config.memory, config.m)
}

/// Assigns the copies of `plan` to the caches of `profile`.
///
/// A spread pass first gives the first `m` stored files one copy each on
/// distinct caches, the most popular file on the smallest cache. The rest of
/// each file's copies then go, file by file, to the caches with the most free
/// slots that do not hold it yet (ties to the lower cache index). If the
/// spread pass leaves copies that cannot be placed, the placement is redone
/// with the most-free rule alone and the one dropping fewer copies is kept.
///
/// Small caches can make a plan impossible even when it fits in total (two
/// copies each of two files on capacities `[4, 1]`). Copies with no eligible
/// cache are dropped and counted in [`PlacementMap::dropped_copies`].
pub fn ppmm_place(plan: &ReplicationPlan, profile: &StorageProfile) -> Result<PlacementMap> {
    let m = profile.len();
    if let Some(bad) = plan.copies.iter().position(|&d| d > m) {
        return Err(Error::Placement(format!(
            "file {bad} needs {} copies on {m} caches",
            plan.copies[bad]
        )));
    }
    if plan.total() > profile.total() {
        return Err(Error::Placement(format!(
            "{} copies do not fit in {} slots",
            plan.total(),
            profile.total()
        )));
    }
    let mut placement = place_with_spread(plan, profile)?;
    if placement.dropped_copies() > 0 {
        let plain = place_most_free(plan, profile)?;
        if plain.dropped_copies() < placement.dropped_copies() {
            placement = plain;
        }
    }
    debug_assert!(placement.check_invariants().is_ok());
    Ok(placement)
}

fn place_with_spread(plan: &ReplicationPlan, profile: &StorageProfile) -> Result<PlacementMap> {
    let m = profile.len();
    let mut placement = PlacementMap::empty(profile, plan.copies.len());
    let mut remaining = plan.copies.clone();
    let stored = plan
        .copies
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(f, _)| f)
        .take(m);
    for (j, file) in stored.enumerate() {
        placement.place(file, m - 1 - j)?;
        remaining[file] -= 1;
    }
    fill_most_free(&mut placement, &remaining)?;
    Ok(placement)
}

fn place_most_free(plan: &ReplicationPlan, profile: &StorageProfile) -> Result<PlacementMap> {
    let mut placement = PlacementMap::empty(profile, plan.copies.len());
    fill_most_free(&mut placement, &plan.copies)?;
    Ok(placement)
}

fn fill_most_free(placement: &mut PlacementMap, copies: &[usize]) -> Result<()> {
    let mut order: Vec<usize> = (0..placement.cache_count()).collect();
    for (file, &d) in copies.iter().enumerate() {
        if d == 0 {
            continue;
        }
        order.sort_by(|&a, &b| {
            placement
                .free_slots(b)
                .cmp(&placement.free_slots(a))
                .then(a.cmp(&b))
        });
        let chosen: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&s| placement.can_place(file, s))
            .take(d)
            .collect();
        placement.record_dropped(d - chosen.len());
        for s in chosen {
            placement.place(file, s)?;
        }
    }
    Ok(())
}

/// Serves the batch through a maximum matching between requests and the
/// caches storing their files.
pub fn ppmm_deliver(batch: &RequestBatch, placement: &PlacementMap) -> DeliveryReport {
    let graph = build_request_graph(batch, placement);
    let matching = max_matching(&graph);
    DeliveryReport::from_assignment(batch.requests(), matching.into_left_to_right())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::brute_force_max_matching;

    #[test]
    fn uniform_replication() {
        let model = PopularityModel::zipf(4, 0.0).unwrap();
        let config = SystemConfig::new(5, 4, 8, 0.5, 0.0).unwrap();
        assert_eq!(ppmm_replication(&model, &config).copies(), &[2, 2, 2, 2]);
    }

    #[test]
    fn harmonic_replication_needs_no_repair() {
        let plan = ReplicationPlan::proportional(&[0.48, 0.24, 0.16, 0.12], 10, 5);
        assert_eq!(plan.copies(), &[5, 2, 2, 1]);
    }

    #[test]
    fn tail_files_can_go_unstored() {
        // 10·0.04 = 0.4 rounds to zero.
        let pmf = [0.5, 0.42, 0.04, 0.04];
        let plan = ReplicationPlan::proportional(&pmf, 10, 5);
        assert_eq!(plan.copies(), &[5, 5, 0, 0]);
    }

    #[test]
    fn repair_spreads_surplus_and_deficit() {
        // Every entry rounds up: 6 × round(1.5) = 12 > 9, three files lose one.
        let pmf = [1.0 / 6.0; 6];
        let plan = ReplicationPlan::proportional(&pmf, 9, 4);
        assert_eq!(plan.copies(), &[2, 2, 2, 1, 1, 1]);
        // Every entry rounds down: 6 × round(1.33) = 6, two short of 8.
        let plan = ReplicationPlan::proportional(&pmf, 8, 4);
        assert_eq!(plan.copies(), &[2, 2, 1, 1, 1, 1]);
    }

    #[test]
    fn replication_saturates_at_every_cache() {
        let pmf = [0.5, 0.5];
        let plan = ReplicationPlan::proportional(&pmf, 100, 3);
        assert_eq!(plan.copies(), &[3, 3]);
    }

    #[test]
    fn two_copies_on_two_unit_caches() {
        let plan = ReplicationPlan::new(vec![2], 2).unwrap();
        let profile = StorageProfile::from_capacities(vec![1, 1]).unwrap();
        let p = ppmm_place(&plan, &profile).unwrap();
        assert_eq!(p.files_on(0), &[0]);
        assert_eq!(p.files_on(1), &[0]);
    }

    #[test]
    fn small_heterogeneous_trace() {
        // d = [2, 1] on capacities [2, 1]: file 1 on both caches, file 2 on cache 1.
        let plan = ReplicationPlan::new(vec![2, 1], 2).unwrap();
        let profile = StorageProfile::from_capacities(vec![2, 1]).unwrap();
        let p = ppmm_place(&plan, &profile).unwrap();
        assert_eq!(p.files_on(0), &[0, 1]);
        assert_eq!(p.files_on(1), &[0]);
    }

    #[test]
    fn spread_puts_popular_files_on_small_caches() {
        let profile = StorageProfile::rich_poor(6, 2, 5).unwrap();
        let plan = ReplicationPlan::new(vec![3, 3, 2, 2, 2, 2], 6).unwrap();
        let p = ppmm_place(&plan, &profile).unwrap();
        p.check_invariants().unwrap();
        // Poor caches 2..5 hold files 3, 2, 1, 0 respectively.
        assert_eq!(p.files_on(5), &[0]);
        assert_eq!(p.files_on(4), &[1]);
        assert_eq!(p.files_on(3), &[2]);
        assert_eq!(p.files_on(2), &[3]);
        for f in 0..6 {
            assert_eq!(p.replicas(f).len(), plan.copies()[f]);
        }
    }

    #[test]
    fn falls_back_when_spread_blocks() {
        // Spread puts file 0 on cache 1 and file 1 on cache 0. File 1's second
        // copy then has nowhere to go: cache 1 is full and cache 0 holds it.
        // The plain most-free rule succeeds.
        let plan = ReplicationPlan::new(vec![1, 2], 2).unwrap();
        let profile = StorageProfile::from_capacities(vec![2, 1]).unwrap();
        let p = ppmm_place(&plan, &profile).unwrap();
        assert_eq!(p.replicas(1), &[0, 1]);
        assert_eq!(p.replicas(0), &[0]);
    }

    #[test]
    fn homogeneous_caches_fill_evenly() {
        let model = PopularityModel::zipf(30, 0.6).unwrap();
        let config = SystemConfig::new(10, 30, 40, 0.9, 0.6).unwrap();
        let profile = StorageProfile::homogeneous(10, 4).unwrap();
        let plan = ppmm_replication(&model, &config);
        let p = ppmm_place(&plan, &profile).unwrap();
        for s in 0..10 {
            assert_eq!(p.files_on(s).len(), 4);
        }
    }

    #[test]
    fn rejects_infeasible_plans() {
        let profile = StorageProfile::from_capacities(vec![1, 1]).unwrap();
        assert!(ReplicationPlan::new(vec![3], 2).is_err());
        let plan = ReplicationPlan::new(vec![2, 2], 2).unwrap();
        assert!(ppmm_place(&plan, &profile).is_err());
    }

    #[test]
    fn unplaceable_copies_are_dropped() {
        let plan = ReplicationPlan::new(vec![2, 2], 2).unwrap();
        let profile = StorageProfile::from_capacities(vec![4, 1]).unwrap();
        let p = ppmm_place(&plan, &profile).unwrap();
        assert_eq!(p.stored_copies(), 3);
        assert_eq!(p.dropped_copies(), 1);
    }

    #[test]
    fn figure_two_scenario() {
        let profile = StorageProfile::from_capacities(vec![1, 1, 1, 1]).unwrap();
        let mut placement = PlacementMap::empty(&profile, 8);
        placement.place(7, 0).unwrap();
        let batch = RequestBatch::from_requests(vec![7, 6, 6], 8).unwrap();
        let report = ppmm_deliver(&batch, &placement);
        assert_eq!(report.matched, 1);
        assert_eq!(report.unserved, vec![6, 6]);
        assert_eq!(report.rate, 1);
        assert_eq!(report.assignment, vec![Some(0), None, None]);
    }

    #[test]
    fn everything_everywhere_serves_all() {
        let profile = StorageProfile::homogeneous(4, 4).unwrap();
        let plan = ReplicationPlan::new(vec![4, 4, 4, 4], 4).unwrap();
        let placement = ppmm_place(&plan, &profile).unwrap();
        let batch = RequestBatch::from_requests(vec![0, 3, 3], 4).unwrap();
        let report = ppmm_deliver(&batch, &placement);
        assert_eq!(report.rate, 0);
        assert_eq!(report.matched, 3);
    }

    #[test]
    fn unmatched_count_agrees_with_oracle() {
        let model = PopularityModel::zipf(4, 0.5).unwrap();
        let config = SystemConfig::new(6, 4, 8, 0.9, 0.5).unwrap();
        let profile = StorageProfile::rich_poor(6, 2, 2).unwrap();
        let placement = ppmm_place(&ppmm_replication(&model, &config), &profile).unwrap();
        for seed in 0..50 {
            let batch = model.sample_batch(config.batch_size(), seed);
            let report = ppmm_deliver(&batch, &placement);
            let g = build_request_graph(&batch, &placement);
            let best = brute_force_max_matching(&g).unwrap();
            assert_eq!(report.unserved.len(), batch.len() - best);
        }
    }
}
