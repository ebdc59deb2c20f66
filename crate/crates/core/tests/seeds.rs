use lpverify::checks::{registry, CheckSpec};
use lpverify::cli::{Profile, RunConfig};

#[test]
fn every_check_passes_at_other_seeds() {
    for seed in [1, 2, 3] {
        let config = RunConfig {
            checks: registry().iter().map(|c| CheckSpec::new(c.name).with_seed(seed)).collect(),
            jobs: 2,
            out_path: None,
            profile: Profile::Quick,
        };
        for report in config.run().unwrap() {
            assert!(report.passed(), "seed {seed}: {}", report.to_json());
        }
    }
}
