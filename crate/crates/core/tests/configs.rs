use std::path::PathBuf;

use fbflow_core::experiment::{run_bound_experiment, ExperimentConfig};

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_certify_with_slack() {
    let paths = shipped();
    assert!(paths.len() >= 3);
    for p in paths {
        let mut cfg = ExperimentConfig::load(&p).unwrap();
        cfg.experiment.replications = cfg.experiment.replications.min(8);
        let rep = run_bound_experiment(&cfg, 4).unwrap();
        let s = &rep.summary;
        assert_eq!(s.failed, 0, "{}", p.display());
        assert_eq!(s.violations, 0, "{}", p.display());
        assert!(s.min_tangent_slack_log2 >= 0.0, "{}", p.display());
        assert!(s.min_hausdorff_slack_log2 >= 0.0, "{}", p.display());
    }
}
