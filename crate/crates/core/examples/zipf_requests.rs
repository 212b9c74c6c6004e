//! Draw a batch of requests and compare file frequencies with the pmf.

use cachesim::popularity::{batch_size, PopularityModel};

fn main() -> cachesim::Result<()> {
    let model = PopularityModel::zipf(20, 0.8)?;
    let m = 400;
    let batch = model.sample_batch(batch_size(m, 0.97), 11);
    println!("{} caches, {} requests per batch", m, batch.len());

    let many = model.sample_batch(100_000, 12);
    println!("file      pmf   observed  hit prob");
    for f in 0..8 {
        println!(
            "{:>4}  {:.4}    {:.4}    {:.4}",
            f + 1,
            model.prob(f),
            many.counts()[f] as f64 / many.len() as f64,
            model.hit_probability(f, batch.len())
        );
    }
    Ok(())
}
