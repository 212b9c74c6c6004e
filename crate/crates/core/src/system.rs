//! Cluster configuration, storage profiles, placements and delivery reports.
//!
//! Caches and files are 0-based in the Rust API. Anything written for people
//! (JSON echoes, CSV, CLI output) uses 1-based indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::popularity::batch_size;

/// Cluster-level parameters: `m` caches, `n` unit-size files, `M` slots in
/// total, load factor `rho` and Zipf parameter `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub memory: usize,
    pub rho: f64,
    pub beta: f64,
}

impl SystemConfig {
    pub fn new(m: usize, n: usize, memory: usize, rho: f64, beta: f64) -> Result<Self> {
        let config = Self {
            m,
            n,
            memory,
            rho,
            beta,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::invalid("m and n must both be at least 1"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid(format!(
                "load factor rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::invalid(format!(
                "Zipf parameter must be finite and non-negative, got {}",
                self.beta
            )));
        }
        if self.memory < self.m {
            return Err(Error::invalid(format!(
                "every cache stores at least one file, so M ({}) must be at least m ({})",
                self.memory, self.m
            )));
        }
        Ok(())
    }

    /// `γ = ln n / ln m`; undefined (NaN) for a single cache.
    pub fn gamma(&self) -> f64 {
        (self.n as f64).ln() / (self.m as f64).ln()
    }

    /// `μ = ln M / ln m`; undefined (NaN) for a single cache.
    pub fn mu(&self) -> f64 {
        (self.memory as f64).ln() / (self.m as f64).ln()
    }

    /// Requests per batch, `⌊rho · m⌋`.
    pub fn batch_size(&self) -> usize {
        batch_size(self.m, self.rho)
    }

    /// Checks that `profile` describes this cluster.
    pub fn check_profile(&self, profile: &StorageProfile) -> Result<()> {
        if profile.len() != self.m {
            return Err(Error::invalid(format!(
                "profile has {} caches but config says m = {}",
                profile.len(),
                self.m
            )));
        }
        if profile.total() != self.memory {
            return Err(Error::invalid(format!(
                "profile holds {} slots but config says M = {}",
                profile.total(),
                self.memory
            )));
        }
        Ok(())
    }
}

/// Per-cache slot counts `k_1 ≥ k_2 ≥ … ≥ k_m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct StorageProfile {
    capacities: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    capacities: Vec<usize>,
}

impl TryFrom<ProfileRepr> for StorageProfile {
    type Error = Error;

    fn try_from(value: ProfileRepr) -> Result<Self> {
        StorageProfile::from_capacities(value.capacities)
    }
}

impl From<StorageProfile> for ProfileRepr {
    fn from(value: StorageProfile) -> Self {
        ProfileRepr {
            capacities: value.capacities,
        }
    }
}

impl StorageProfile {
    /// Any capacity vector; caches are re-ordered by decreasing capacity.
    pub fn from_capacities(mut capacities: Vec<usize>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::invalid("a profile needs at least one cache"));
        }
        if capacities.contains(&0) {
            return Err(Error::invalid("every cache must hold at least one file"));
        }
        capacities.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { capacities })
    }

    /// `m` caches with `k` slots each.
    pub fn homogeneous(m: usize, k: usize) -> Result<Self> {
        Self::rich_poor(m, m, k)
    }

    /// `m1` rich caches with `k` slots followed by `m - m1` poor caches with
    /// one slot, for `M = m1·k + (m - m1)`.
    pub fn rich_poor(m: usize, m1: usize, k: usize) -> Result<Self> {
        if m1 == 0 || m1 > m {
            return Err(Error::invalid(format!(
                "rich cache count m1 = {m1} must lie in [1, m = {m}]"
            )));
        }
        if k == 0 {
            return Err(Error::invalid("rich caches need k >= 1 slots"));
        }
        let capacities = std::iter::repeat_n(k, m1)
            .chain(std::iter::repeat_n(1, m - m1))
            .collect();
        Ok(Self { capacities })
    }

    /// Rich/poor profile whose total is as close to `target` as possible
    /// without exceeding it: `k = ⌊(target - (m - m1)) / m1⌋`.
    pub fn rich_poor_for_memory(m: usize, m1: usize, target: usize) -> Result<Self> {
        if m1 == 0 || m1 > m {
            return Err(Error::invalid(format!(
                "rich cache count m1 = {m1} must lie in [1, m = {m}]"
            )));
        }
        let poor = m - m1;
        let k = target.saturating_sub(poor) / m1;
        if k == 0 {
            return Err(Error::invalid(format!(
                "memory {target} cannot give {m1} rich caches a slot each next to {poor} poor caches"
            )));
        }
        Self::rich_poor(m, m1, k)
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, cache: usize) -> usize {
        self.capacities[cache]
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    /// Cumulative memory `M`.
    pub fn total(&self) -> usize {
        self.capacities.iter().sum()
    }

    /// Largest capacity, `k` for a rich/poor profile.
    pub fn max_capacity(&self) -> usize {
        self.capacities[0]
    }

    /// Number of caches at the largest capacity, `m1` for a rich/poor profile.
    pub fn top_count(&self) -> usize {
        let k = self.max_capacity();
        self.capacities.iter().take_while(|&&c| c == k).count()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.top_count() == self.len()
    }
}

/// Which files sit on which caches after the placement phase.
///
/// Both directions are kept (cache → files and file → caches) and only
/// [`PlacementMap::place`] mutates them, so they cannot drift apart. Both
/// lists are kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMap {
    capacities: Vec<usize>,
    cache_files: Vec<Vec<usize>>,
    file_caches: Vec<Vec<usize>>,
    dropped: usize,
}

impl PlacementMap {
    /// Empty placement for `profile` and a catalog of `files` files.
    pub fn empty(profile: &StorageProfile, files: usize) -> Self {
        Self {
            capacities: profile.capacities().to_vec(),
            cache_files: vec![Vec::new(); profile.len()],
            file_caches: vec![Vec::new(); files],
            dropped: 0,
        }
    }

    /// Stores one copy of `file` on `cache`.
    pub fn place(&mut self, file: usize, cache: usize) -> Result<()> {
        if file >= self.file_caches.len() || cache >= self.cache_files.len() {
            return Err(Error::Placement(format!(
                "file {file} / cache {cache} out of range"
            )));
        }
        if self.free_slots(cache) == 0 {
            return Err(Error::Placement(format!("cache {cache} is full")));
        }
        let files = &mut self.cache_files[cache];
        match files.binary_search(&file) {
            Ok(_) => {
                return Err(Error::Placement(format!(
                    "cache {cache} already stores file {file}"
                )))
            }
            Err(at) => files.insert(at, file),
        }
        let caches = &mut self.file_caches[file];
        let at = caches.binary_search(&cache).unwrap_err();
        caches.insert(at, cache);
        Ok(())
    }

    pub(crate) fn record_dropped(&mut self, copies: usize) {
        self.dropped += copies;
    }

    /// Whether `cache` has room for `file` and does not hold it yet.
    pub fn can_place(&self, file: usize, cache: usize) -> bool {
        self.free_slots(cache) > 0 && !self.holds(cache, file)
    }

    pub fn holds(&self, cache: usize, file: usize) -> bool {
        self.cache_files[cache].binary_search(&file).is_ok()
    }

    /// Files on `cache` (the set `∂s`).
    pub fn files_on(&self, cache: usize) -> &[usize] {
        &self.cache_files[cache]
    }

    /// Caches holding `file` (the set `D_i`), ascending.
    pub fn replicas(&self, file: usize) -> &[usize] {
        &self.file_caches[file]
    }

    pub fn free_slots(&self, cache: usize) -> usize {
        self.capacities[cache] - self.cache_files[cache].len()
    }

    pub fn cache_count(&self) -> usize {
        self.cache_files.len()
    }

    pub fn file_count(&self) -> usize {
        self.file_caches.len()
    }

    pub fn stored_copies(&self) -> usize {
        self.cache_files.iter().map(Vec::len).sum()
    }

    /// Copies a policy wanted to store but could not place.
    pub fn dropped_copies(&self) -> usize {
        self.dropped
    }

    /// Re-checks capacity, duplicate-freeness and mutual consistency.
    pub fn check_invariants(&self) -> Result<()> {
        for (cache, files) in self.cache_files.iter().enumerate() {
            if files.len() > self.capacities[cache] {
                return Err(Error::Placement(format!("cache {cache} over capacity")));
            }
            if files.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Placement(format!(
                    "cache {cache} file list not strictly ascending"
                )));
            }
            for &f in files {
                if self.file_caches[f].binary_search(&cache).is_err() {
                    return Err(Error::Placement(format!(
                        "file {f} on cache {cache} missing from replica list"
                    )));
                }
            }
        }
        let forward: usize = self.file_caches.iter().map(Vec::len).sum();
        if forward != self.stored_copies() {
            return Err(Error::Placement("replica lists out of sync".into()));
        }
        Ok(())
    }
}

/// Outcome of one delivery phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryReport {
    /// `assignment[r]` is the cache serving request `r`, if any.
    pub assignment: Vec<Option<usize>>,
    pub matched: usize,
    /// Files of the requests left to the central server, in request order.
    pub unserved: Vec<usize>,
    /// Distinct files the central server has to send.
    pub rate: usize,
}

impl DeliveryReport {
    pub(crate) fn from_assignment(requests: &[usize], assignment: Vec<Option<usize>>) -> Self {
        let unserved: Vec<usize> = requests
            .iter()
            .zip(&assignment)
            .filter(|(_, a)| a.is_none())
            .map(|(&f, _)| f)
            .collect();
        Self {
            matched: requests.len() - unserved.len(),
            rate: transmission_rate(&unserved),
            assignment,
            unserved,
        }
    }
}

/// Number of distinct files among the unserved requests; the server sends
/// each requested file once, however many users asked for it.
pub fn transmission_rate(unserved: &[usize]) -> usize {
    let mut files = unserved.to_vec();
    files.sort_unstable();
    files.dedup();
    files.len()
}
