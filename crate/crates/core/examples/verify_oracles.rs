use cachesim::verify::run_verify;

fn main() {
    let report = run_verify(2000, 99);
    for s in &report.suites {
        println!("{:<9} {} passed, {} failed", s.name, s.passed, s.failed);
    }
    assert!(report.all_passed());
}
