//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cachesim::bounds::prop1_lower_bound;
use cachesim::harness::{
    preset_fig4, preset_fig5, preset_fig6, run_sweep, ExperimentSpec, PointResult, Policy, Sweep,
    SweepResult,
};
use cachesim::knapsack::solve_fractional_knapsack;
use cachesim::ksmlp::ks_place;
use cachesim::matching::{brute_force_max_matching, max_matching};
use cachesim::ppmm::ppmm_deliver;
use cachesim::rng::rng_from_seed;
use cachesim::verify::{brute_force_fractional_knapsack, random_bipartite, random_knapsack};
use cachesim::{PlacementMap, PopularityModel, RequestBatch, StorageProfile};

const SEED: u64 = cachesim::cli::DEFAULT_SEED;

/// Required ratio of the m1 = m/20 mean to the homogeneous mean at n = m = 400.
const FIG4_MIN_FACTOR: f64 = 3.0;
/// Largest mean rate accepted once homogeneous memory reaches 3 n ln m.
const VANISHING_RATE: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn noise(a: &PointResult, b: &PointResult) -> f64 {
    3.0 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}

fn find<'a>(r: &'a SweepResult, curve: &str, m: usize) -> &'a PointResult {
    r.points
        .iter()
        .find(|p| p.point.curve == curve && p.point.config.m == m)
        .expect("point present")
}

/// Spread of mean rates over the curves at cluster size `m`, relative to the
/// homogeneous mean.
fn relative_spread(r: &SweepResult, m: usize) -> f64 {
    let means: Vec<f64> = r
        .points
        .iter()
        .filter(|p| p.point.config.m == m)
        .map(|p| p.mean)
        .collect();
    let hi = means.iter().copied().fold(f64::MIN, f64::max);
    let lo = means.iter().copied().fold(f64::MAX, f64::min);
    (hi - lo) / find(r, "m1=m", m).mean
}

fn matching_oracle() -> Outcome {
    let mut rng = rng_from_seed(SEED);
    let cases = 1000;
    let mut bad = 0;
    for _ in 0..cases {
        let g = random_bipartite(&mut rng, 8, 8);
        if brute_force_max_matching(&g).ok() != Some(max_matching(&g).len()) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{cases} instances, {bad} mismatches"))
}

fn knapsack_oracle() -> Outcome {
    let mut rng = rng_from_seed(SEED ^ 1);
    let cases = 1000;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let inst = random_knapsack(&mut rng, 12);
        let greedy = solve_fractional_knapsack(&inst).objective;
        let exact = brute_force_fractional_knapsack(&inst).unwrap();
        worst = worst.max((greedy - exact).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("{cases} instances, max |diff| {worst:.2e}"),
    )
}

fn figure_two() -> Outcome {
    // g = file 0, h = file 1; only cache 0 stores h.
    let profile = StorageProfile::from_capacities(vec![1, 1, 1]).unwrap();
    let mut placement = PlacementMap::empty(&profile, 2);
    placement.place(1, 0).unwrap();
    let batch = RequestBatch::from_requests(vec![1, 0, 0], 2).unwrap();
    let r = ppmm_deliver(&batch, &placement);
    outcome(
        r.matched == 1 && r.rate == 1,
        format!("matched {}, rate {}", r.matched, r.rate),
    )
}

fn figure_three() -> Outcome {
    let profile = StorageProfile::from_capacities(vec![3, 2, 2, 1, 1]).unwrap();
    let p = ks_place(&[0, 1, 2, 3, 4], &[4, 2, 1, 1, 1], &profile).unwrap();
    let got: Vec<Vec<usize>> = (0..5)
        .map(|s| p.files_on(s).iter().map(|f| f + 1).collect())
        .collect();
    let want = vec![vec![1, 2, 5], vec![1, 3], vec![1, 4], vec![1], vec![2]];
    outcome(got == want, format!("placement {got:?}"))
}

fn fig4_gap(r: &SweepResult) -> Outcome {
    let flat = find(r, "m1=m", 400);
    let lopsided = find(r, "m1=m/20", 400);
    let factor = lopsided.mean / flat.mean;
    let separated = lopsided.mean - flat.mean > noise(flat, lopsided);
    outcome(
        factor >= FIG4_MIN_FACTOR && separated,
        format!(
            "m1=m {:.2}±{:.2}, m1=m/20 {:.2}±{:.2}, factor {factor:.2} (need {FIG4_MIN_FACTOR})",
            flat.mean, flat.stderr, lopsided.mean, lopsided.stderr
        ),
    )
}

fn fig5_shape(r: &SweepResult) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let flat = r.curve("m1=m");
    let rising = flat
        .windows(2)
        .filter(|w| w[1].mean > w[0].mean + noise(w[0], w[1]))
        .count();
    let last = flat.last().unwrap().mean;
    pass &= rising == 0 && last == 0.0;
    notes.push(format!("homogeneous rises {rising}, final {last:.2}"));

    for label in ["m1=m/2", "m1=m/4", "m1=m/8"] {
        let c = r.curve(label);
        let top = &c[c.len() - 3..];
        let flat_top = (0..3)
            .all(|i| (i + 1..3).all(|j| (top[i].mean - top[j].mean).abs() < noise(top[i], top[j])));
        let positive = top.iter().all(|p| p.mean > 0.0);
        pass &= flat_top && positive;
        notes.push(format!(
            "{label} top k {:.2}/{:.2}/{:.2}",
            top[0].mean, top[1].mean, top[2].mean
        ));
    }
    outcome(pass, notes.join("; "))
}

fn fig6_spread(fig4: &SweepResult, fig6: &SweepResult) -> Outcome {
    let s4 = relative_spread(fig4, 400);
    let s6 = relative_spread(fig6, 400);
    outcome(
        s6 <= 0.5 * s4,
        format!("relative spread beta=1.2 {s6:.3} vs beta=0.3 {s4:.3}"),
    )
}

fn vanishing_rate() -> Outcome {
    let m = 200;
    let need = cachesim::bounds::corollary1_memory(200, m);
    let k = need.div_ceil(m);
    let spec = ExperimentSpec {
        name: "vanishing".into(),
        policy: Policy::Ppmm,
        beta: 0.3,
        rho: 0.97,
        delta: 0.5,
        trials: 100,
        seed: None,
        sweep: Sweep::K {
            m,
            n: 200,
            values: vec![k],
            m1_divisors: vec![1],
        },
    };
    let r = run_sweep(&spec, SEED, None).unwrap();
    let p = &r.points[0];
    outcome(
        p.mean <= VANISHING_RATE,
        format!(
            "M = {} (>= {need}), mean {:.3}±{:.3}, threshold {VANISHING_RATE}",
            p.point.config.memory, p.mean, p.stderr
        ),
    )
}

fn bound_consistency(results: &[&SweepResult]) -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for r in results {
        for p in &r.points {
            let c = &p.point.config;
            let model = PopularityModel::zipf(c.n, c.beta).unwrap();
            let bound = prop1_lower_bound(&model, c.batch_size(), c.memory as f64).unwrap();
            checked += 1;
            if bound > p.mean + 3.0 * p.stderr {
                violations.push(format!("{} {} x={}", r.spec.name, p.point.curve, p.point.x));
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("{checked} points, violations {violations:?}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    for (out, jobs) in runs {
        let status = Command::new(env!("CARGO_BIN_EXE_cachesim"))
            .args([
                "preset", "fig6", "--seed", "7", "--out", out, "--jobs", jobs,
            ])
            .current_dir(dir.path())
            .env_remove("CACHESIM_SEED")
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return outcome(false, format!("run {out} exited with {status}"));
        }
    }
    let read = |d: &str, f: &str| fs::read(dir.path().join(d).join(f)).unwrap();
    let same = ["fig6.csv", "fig6_summary.csv"]
        .iter()
        .all(|f| read("a", f) == read("b", f) && read("a", f) == read("c", f));
    outcome(same, "two runs with --jobs 1 and one with --jobs 4")
}

fn report(id: usize, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let took = start.elapsed();
    let pass = o.pass && took <= limit;
    println!(
        "criterion {id:>2}: {} ({:.2}s of {}s) {}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs(),
        o.detail
    );
    pass
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, secs(10), matching_oracle);
    ok &= report(2, secs(10), knapsack_oracle);
    ok &= report(3, secs(1), figure_two);
    ok &= report(4, secs(1), figure_three);

    let timed = |spec: ExperimentSpec| {
        let start = Instant::now();
        let r = run_sweep(&spec, SEED, None).expect("preset runs");
        (r, start.elapsed())
    };
    let (fig4, t4) = timed(preset_fig4());
    let (fig5, t5) = timed(preset_fig5());
    let (fig6, t6) = timed(preset_fig6());
    ok &= report(5, secs(120).saturating_sub(t4), || fig4_gap(&fig4));
    ok &= report(6, secs(120).saturating_sub(t5), || fig5_shape(&fig5));
    ok &= report(7, secs(180).saturating_sub(t6), || {
        fig6_spread(&fig4, &fig6)
    });
    ok &= report(8, secs(60), vanishing_rate);
    ok &= report(9, secs(60), || bound_consistency(&[&fig4, &fig5, &fig6]));
    ok &= report(10, secs(120), determinism);

    println!(
        "sweeps took fig4 {:.2}s, fig5 {:.2}s, fig6 {:.2}s",
        t4.as_secs_f64(),
        t5.as_secs_f64(),
        t6.as_secs_f64()
    );
    if ok {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
