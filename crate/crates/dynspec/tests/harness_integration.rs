//! Harness-level integration: config files, report reproducibility, and the
//! scaled-down end-to-end paths that are too slow for unit tests but too
//! cheap to leave to the acceptance suite.

use dynspec::harness::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentResults};

/// A circle run small enough for CI-style iteration: the sample-size rule
/// still detects the period-5 signal with a wide margin.
fn small_circle_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ExperimentKind::PeriodCircle);
    cfg.seeds = vec![1234];
    cfg.circle.rho = 1.2;
    cfg.circle.l_max = 6;
    cfg.circle.noise_proxy = 0.1;
    cfg.circle.trajectory_sample = 600;
    cfg
}

#[test]
fn reports_are_byte_reproducible_modulo_timing() {
    let cfg = small_circle_config();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(
        a.to_json_normalized().unwrap(),
        b.to_json_normalized().unwrap(),
        "identical configs must produce identical reports"
    );
}

#[test]
fn small_circle_run_recovers_five() {
    let report = run_experiment(&small_circle_config()).unwrap();
    match &report.results {
        ExperimentResults::Period(rows) => {
            assert_eq!(rows.len(), 1);
            assert_eq!(rows[0].beta, 5);
            assert_eq!(rows[0].anp_confirmed, Some(true));
        }
        _ => panic!("period results expected"),
    }
    assert!(report.passed);
}

#[test]
fn config_file_overlays_defaults() {
    let dir = std::env::temp_dir().join(format!("dynspec-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("override.toml");
    std::fs::write(
        &path,
        "seeds = [7, 8]\n\n[circle]\nrho = 0.7\nL_max = 6\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::new(ExperimentKind::PeriodCircle)
        .with_file(&path)
        .unwrap();
    assert_eq!(cfg.seeds, vec![7, 8]);
    assert_eq!(cfg.circle.rho, 0.7);
    assert_eq!(cfg.circle.l_max, 6);
    // untouched sections keep their defaults
    assert_eq!(cfg.circle.mu, 0.001);
    assert_eq!(cfg.lifegame.rho, 0.98);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = std::env::temp_dir().join(format!("dynspec-badcfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[circle]\nrho = 0.7\ntypo_key = 3\n").unwrap();
    let res = ExperimentConfig::new(ExperimentKind::PeriodCircle).with_file(&path);
    assert!(res.is_err(), "unknown keys must not pass silently");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_files_are_written() {
    let dir = std::env::temp_dir().join(format!("dynspec-out-{}", std::process::id()));
    let mut cfg = small_circle_config();
    cfg.out_dir = Some(dir.clone());
    let report = run_experiment(&cfg).unwrap();
    assert!(report.passed);
    assert!(dir.join("report.json").exists());
    assert!(dir.join("period_results.csv").exists());
    let json = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(json.contains("\"beta\": 5"));
    std::fs::remove_dir_all(&dir).ok();
}
