//! Lower bound on the optimal rate as memory grows, plus the scaling
//! exponents that apply.

use cachesim::bounds::{applicable_exponents, corollary1_memory, prop1_for_config};
use cachesim::{PopularityModel, SystemConfig};

fn main() -> cachesim::Result<()> {
    let (m, n) = (400, 2000);
    let model = PopularityModel::zipf(n, 1.2)?;
    for memory in [400, 1000, 2000, 4000, 6000, 12000] {
        let config = SystemConfig::new(m, n, memory, 0.97, 1.2)?;
        let exps: Vec<String> = applicable_exponents(&config)
            .iter()
            .map(|e| format!("{:?}:{:.3}", e.theorem, e.exponent))
            .collect();
        println!(
            "M={memory:>5}  bound {:>7.3}  {}",
            prop1_for_config(&model, &config)?,
            exps.join(" ")
        );
    }
    println!(
        "homogeneous PPMM memory for vanishing rate at m=n=200: {}",
        corollary1_memory(200, 200)
    );
    Ok(())
}
