//! Self-checks against slow exhaustive oracles.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::knapsack::{solve_fractional_knapsack, KnapsackInstance};
use crate::matching::{brute_force_max_matching, max_matching, BipartiteGraph};
use crate::popularity::PopularityModel;
use crate::rng::{rng_from_seed, SimRng};

/// Largest instance [`brute_force_fractional_knapsack`] accepts.
pub const KNAPSACK_BRUTE_FORCE_LIMIT: usize = 16;

/// LP optimum of a fractional knapsack by enumeration.
///
/// Some optimal vertex takes a subset in full and at most one more item in
/// part, so it tries every subset that fits, optionally topped up with the
/// largest feasible fraction of one outside item.
pub fn brute_force_fractional_knapsack(inst: &KnapsackInstance) -> Result<f64> {
    let n = inst.len();
    if n > KNAPSACK_BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(format!(
            "brute force handles at most {KNAPSACK_BRUTE_FORCE_LIMIT} items, got {n}"
        )));
    }
    let (v, w, cap) = (inst.values(), inst.weights(), inst.capacity());
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        let (mut value, mut weight) = (0.0, 0.0);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                value += v[i];
                weight += w[i];
            }
        }
        if weight > cap + 1e-12 {
            continue;
        }
        best = best.max(value);
        let room = (cap - weight).max(0.0);
        for j in (0..n).filter(|j| mask & (1 << j) == 0) {
            let part = (room / w[j]).min(1.0);
            best = best.max(value + part * v[j]);
        }
    }
    Ok(best)
}

pub fn random_bipartite(rng: &mut SimRng, max_left: usize, max_right: usize) -> BipartiteGraph {
    let left = rng.random_range(0..=max_left as u64) as usize;
    let right = rng.random_range(1..=max_right as u64) as usize;
    let density: f64 = rng.random();
    let adj = (0..left)
        .map(|_| {
            (0..right)
                .filter(|_| rng.random::<f64>() < density)
                .collect()
        })
        .collect();
    BipartiteGraph::new(right, adj).expect("generated edges are in range")
}

/// Random instance; every other one uses small integers so density ties
/// come up.
pub fn random_knapsack(rng: &mut SimRng, max_items: usize) -> KnapsackInstance {
    let n = rng.random_range(1..=max_items as u64) as usize;
    let ints = rng.random::<bool>();
    let mut draw = |lo: f64, hi: f64| {
        if ints {
            rng.random_range(1..=6u64) as f64
        } else {
            rng.random_range(lo..hi)
        }
    };
    let values: Vec<f64> = (0..n).map(|_| draw(0.0, 10.0)).collect();
    let weights: Vec<f64> = (0..n).map(|_| draw(0.1, 5.0)).collect();
    let total: f64 = weights.iter().sum();
    let capacity = rng.random_range(0.0..total * 1.1);
    KnapsackInstance::new(values, weights, capacity).expect("generated instance is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: 0,
            failed: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }
}

/// Hopcroft–Karp against backtracking on graphs with at most 8 requests and
/// 8 caches.
pub fn verify_matching(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_from_seed(seed);
    let mut report = SuiteReport::new("matching");
    for _ in 0..cases {
        let g = random_bipartite(&mut rng, 8, 8);
        let m = max_matching(&g);
        let ok = m.is_valid_for(&g) && brute_force_max_matching(&g).ok() == Some(m.len());
        report.record(ok);
    }
    report
}

/// Greedy fractional knapsack against enumeration, up to 12 items.
pub fn verify_knapsack(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_from_seed(seed);
    let mut report = SuiteReport::new("knapsack");
    for _ in 0..cases {
        let inst = random_knapsack(&mut rng, 12);
        let greedy = solve_fractional_knapsack(&inst);
        let oracle = brute_force_fractional_knapsack(&inst).expect("within limit");
        let used = greedy.used_capacity(&inst);
        let ok = (greedy.objective - oracle).abs() <= 1e-9
            && used <= inst.capacity() + 1e-9
            && greedy.x.iter().all(|&x| (0.0..=1.0).contains(&x));
        report.record(ok);
    }
    report
}

/// Zipf pmfs are positive, non-increasing and sum to 1.
pub fn verify_pmf() -> SuiteReport {
    let mut report = SuiteReport::new("pmf");
    for &n in &[1usize, 2, 3, 10, 100, 400, 2000, 100_000] {
        for &beta in &[0.0, 0.3, 0.7, 1.0, 1.2, 2.0, 4.0] {
            let model = PopularityModel::zipf(n, beta).expect("valid parameters");
            let pmf = model.pmf();
            let sum = compensated_sum(pmf);
            let ok = (sum - 1.0).abs() <= 1e-12
                && pmf.windows(2).all(|w| w[0] >= w[1])
                && pmf.iter().all(|&p| p > 0.0);
            report.record(ok);
        }
    }
    report
}

fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for &x in xs {
        let y = x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn run_verify(cases: usize, seed: u64) -> VerifyReport {
    VerifyReport {
        seed,
        suites: vec![
            verify_matching(cases, seed),
            verify_knapsack(cases, seed ^ 1),
            verify_pmf(),
        ],
    }
}
