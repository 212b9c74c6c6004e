//! KS+MLP with lopsided popularity. Shrinking the rich set changes little.

use cachesim::harness::{Policy, Scenario};
use cachesim::{StorageProfile, SystemConfig};

fn main() -> cachesim::Result<()> {
    let m = 200;
    let n = 5 * m;
    for div in [1, 10, 40] {
        let profile = StorageProfile::rich_poor_for_memory(m, m.div_ceil(div), 3 * n)?;
        let config = SystemConfig::new(m, n, profile.total(), 0.97, 1.2)?;
        let scenario = Scenario::prepare(&config, &profile, Policy::Ksmlp, 0.5)?;
        let rates: Vec<usize> = (0..40).map(|t| scenario.run_trial(t).rate).collect();
        let mean = rates.iter().sum::<usize>() as f64 / rates.len() as f64;
        println!(
            "m1=m/{div:<2} stored {:>4} copies, dropped {:>4}, mean rate {mean:.2}",
            scenario.placement().stored_copies(),
            scenario.placement().dropped_copies()
        );
    }

    let flat = SystemConfig::new(m, n, 3 * n, 0.97, 0.8)?;
    let err = Scenario::prepare(
        &flat,
        &StorageProfile::homogeneous(m, 15)?,
        Policy::Ksmlp,
        0.5,
    )
    .unwrap_err();
    println!("beta = 0.8: {err}");
    Ok(())
}
