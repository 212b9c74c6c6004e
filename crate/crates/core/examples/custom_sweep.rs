//! Build a sweep from JSON, run it, and write the CSV files and chart.
//!
//! `cargo run --example custom_sweep -- out_dir`

use std::fs::{self, File};
use std::path::PathBuf;

use cachesim::cli::lower_bounds;
use cachesim::harness::{run_sweep, ExperimentSpec};
use cachesim::report::{render_svg, write_summary_csv, write_trials_csv};

const SPEC: &str = r#"{
  "name": "profiles_demo",
  "policy": "ppmm",
  "beta": 0.5,
  "trials": 40,
  "sweep": {
    "axis": "profiles",
    "n": 60,
    "profiles": [
      { "capacities": [3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3] },
      { "m": 20, "m1": 5, "k": 9 },
      { "capacities": [20, 10, 6, 4, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1] }
    ]
  }
}"#;

fn main() -> cachesim::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/custom_sweep".into()),
    );
    fs::create_dir_all(&out)?;

    let spec: ExperimentSpec = serde_json::from_str(SPEC)?;
    let result = run_sweep(&spec, 17, Some(2))?;
    write_trials_csv(&result, File::create(out.join("profiles_demo.csv"))?)?;
    write_summary_csv(
        &result,
        File::create(out.join("profiles_demo_summary.csv"))?,
    )?;
    let svg = render_svg(&result, Some(&lower_bounds(&result)?));
    fs::write(out.join("profiles_demo.svg"), svg)?;

    for p in &result.points {
        println!(
            "{:?}  M={}  mean {:.2} ± {:.2}",
            p.point.profile.capacities(),
            p.point.config.memory,
            p.mean,
            p.stderr
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
