//! Run named checks from code and print their JSON reports.
//!
//! `cargo run --example run_checks -- check-symmetrize check-p-pos-prop`

use lpverify::checks::{names, run_check, CheckSpec};

fn main() -> lpverify::Result<()> {
    let wanted: Vec<String> = std::env::args().skip(1).collect();
    let selected: Vec<&str> = if wanted.is_empty() {
        vec!["check-duplication", "check-symmetrize", "check-second-derivative"]
    } else {
        names().into_iter().filter(|n| wanted.iter().any(|w| w == n)).collect()
    };
    for name in selected {
        let report = run_check(&CheckSpec::new(name).with_seed(0).with_samples(100_000))?;
        eprintln!("{name}: {:?}, max {:.2}σ", report.status, report.max_discrepancy_sigma);
        println!("{}", report.to_json());
    }
    Ok(())
}
