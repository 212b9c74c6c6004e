use cachesim::harness::{run_sweep, ExperimentSpec, Policy, Sweep};

fn main() -> cachesim::Result<()> {
    let spec = ExperimentSpec {
        name: "k_sweep".into(),
        policy: Policy::Ppmm,
        beta: 0.3,
        rho: 0.97,
        delta: 0.5,
        trials: 30,
        seed: None,
        sweep: Sweep::K {
            m: 200,
            n: 200,
            values: vec![1, 2, 4, 8, 16, 32],
            m1_divisors: vec![1, 4],
        },
    };
    let result = run_sweep(&spec, 3, None)?;
    for curve in result.curves() {
        print!("{curve:<8}");
        for p in result.curve(curve) {
            print!(" k={}:{:.1}", p.point.k, p.mean);
        }
        println!();
    }
    Ok(())
}
