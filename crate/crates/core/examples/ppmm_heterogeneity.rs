//! Same memory, fewer rich caches: PPMM with comparable popularity.

use cachesim::harness::{Policy, Scenario};
use cachesim::rng::mix_seed;
use cachesim::{StorageProfile, SystemConfig};

fn main() -> cachesim::Result<()> {
    let n: usize = 200;
    let m = n;
    let trials = 50;
    for div in [1, 2, 10, 20] {
        let m1 = m.div_ceil(div);
        let profile = StorageProfile::rich_poor_for_memory(m, m1, 3 * n)?;
        let config = SystemConfig::new(m, n, profile.total(), 0.97, 0.3)?;
        let scenario = Scenario::prepare(&config, &profile, Policy::Ppmm, 0.5)?;
        let total: usize = (0..trials)
            .map(|t| scenario.run_trial(mix_seed(1, div as u64, t)).rate)
            .sum();
        println!(
            "m1={m1:>3} k={:>3} M={}  mean rate {:.2}",
            profile.max_capacity(),
            profile.total(),
            total as f64 / trials as f64
        );
    }
    Ok(())
}
