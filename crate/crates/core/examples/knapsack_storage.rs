//! Which files KS stores, and where the copies land.

use cachesim::knapsack::solve_fractional_knapsack;
use cachesim::ksmlp::{ks_instance, ks_place, ks_weights};
use cachesim::{PopularityModel, StorageProfile, SystemConfig};

fn main() -> cachesim::Result<()> {
    // The small example: weights [4, 2, 1, 1, 1] over capacities [3, 2, 2, 1, 1].
    let profile = StorageProfile::from_capacities(vec![3, 2, 2, 1, 1])?;
    let placement = ks_place(&[0, 1, 2, 3, 4], &[4, 2, 1, 1, 1], &profile)?;
    for s in 0..profile.len() {
        let files: Vec<usize> = placement.files_on(s).iter().map(|f| f + 1).collect();
        println!("cache {}: {:?}", s + 1, files);
    }

    let (m, n) = (100, 500);
    let config = SystemConfig::new(m, n, 3 * n, 0.97, 1.2)?;
    let model = PopularityModel::zipf(n, 1.2)?;
    let w = ks_weights(&model, &config, 0.5)?;
    let solution = solve_fractional_knapsack(&ks_instance(&model, &config, &w.weights)?);
    println!(
        "\nm={m} n={n}: n1={} n2={} w[..5]={:?} tail={}",
        w.n1,
        w.n2,
        &w.weights[..5],
        w.weights[n - 1]
    );
    println!(
        "stored {} files, objective {:.2}, fractional item {:?}",
        solution.selected().len(),
        solution.objective,
        solution.fractional().map(|i| i + 1)
    );
    Ok(())
}
