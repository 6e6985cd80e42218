//! End-to-end acceptance runs: the packaged experiments at their reference
//! hyperparameters, each printing one PASS/FAIL line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use dynspec::harness::{
    rate_study, run_experiment, ExperimentConfig, ExperimentKind, ExperimentResults,
    CANONICAL_SEEDS, RATE_SEEDS,
};
use dynspec::properties::run_property_suite;

fn verdict(name: &str, passed: bool, detail: &str) {
    println!(
        "{} {}: {}",
        if passed { "PASS" } else { "FAIL" },
        name,
        detail
    );
}

#[test]
fn criterion_1_lifegame_period_recovery() {
    let cfg = ExperimentConfig::new(ExperimentKind::PeriodLifegame);
    assert_eq!(cfg.seeds, CANONICAL_SEEDS.to_vec());
    let report = run_experiment(&cfg).expect("experiment runs");
    let rows = match &report.results {
        ExperimentResults::Period(rows) => rows,
        _ => unreachable!(),
    };
    let betas: Vec<u64> = rows.iter().map(|r| r.beta).collect();
    let ok = report.passed && betas.iter().all(|&b| b == 8);
    verdict(
        "lifegame-period-recovery",
        ok,
        &format!("beta = {betas:?} on seeds {CANONICAL_SEEDS:?} (expected 8 on 4/4)"),
    );
    assert!(ok, "life-board period not recovered: {betas:?}");
}

#[test]
fn criterion_2_circle_period_recovery() {
    let cfg = ExperimentConfig::new(ExperimentKind::PeriodCircle);
    let report = run_experiment(&cfg).expect("experiment runs");
    let rows = match &report.results {
        ExperimentResults::Period(rows) => rows,
        _ => unreachable!(),
    };
    let betas: Vec<u64> = rows.iter().map(|r| r.beta).collect();
    let anps: Vec<bool> = rows.iter().map(|r| r.anp_confirmed.unwrap_or(false)).collect();
    let ok = report.passed && betas.iter().all(|&b| b == 5) && anps.iter().all(|&a| a);
    verdict(
        "circle-period-recovery",
        ok,
        &format!("beta = {betas:?}, nearly-period confirmed = {anps:?} (expected 5 + confirmation on 4/4)"),
    );
    assert!(ok, "circle period not recovered: {betas:?} {anps:?}");
}

#[test]
fn criterion_3_eigenvalue_table_reproduction() {
    let cfg = ExperimentConfig::new(ExperimentKind::EigenPermshrink);
    let report = run_experiment(&cfg).expect("experiment runs");
    let rows = match &report.results {
        ExperimentResults::Eigen(rows) => rows,
        _ => unreachable!(),
    };
    let majority = cfg.seeds.len() / 2 + 1;
    let mut detail = String::new();
    let mut ok = rows.iter().all(|r| r.absent_reported_zero);
    for &(c, tol) in &cfg.eigen.tolerance_gates {
        let errors: Vec<f64> = rows
            .iter()
            .filter(|r| r.c_sim == c)
            .map(|r| r.max_visible_error)
            .collect();
        let passing = errors.iter().filter(|e| **e <= tol).count();
        detail.push_str(&format!(
            "c_sim={c}: errors {:?} vs tolerance {tol} ({passing}/{} within); ",
            errors
                .iter()
                .map(|e| (e * 1e5).round() / 1e5)
                .collect::<Vec<_>>(),
            errors.len()
        ));
        ok &= passing >= majority;
    }
    detail.push_str(&format!(
        "invisible entries reported zero on all {} runs",
        rows.len()
    ));
    verdict("eigenvalue-table-reproduction", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_4_convergence_rate() {
    // fixed well-conditioned instance, noise varying across seeds: the
    // average spectral error must shrink by a 1/sqrt(N)-compatible factor
    // on each of two consecutive quadruplings
    let ladder = rate_study(9216, 2, &RATE_SEEDS).expect("rate study runs");
    let ratios: Vec<f64> = ladder.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let ok = ratios.iter().all(|r| (1.5..=3.0).contains(r));
    verdict(
        "convergence-rate",
        ok,
        &format!(
            "avg spectral errors {:?} at N {:?}; quadrupling ratios {:?} (window [1.5, 3])",
            ladder.iter().map(|(_, e)| (e * 1e6).round() / 1e6).collect::<Vec<_>>(),
            ladder.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            ratios.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>(),
        ),
    );
    assert!(ok, "rate ratios {ratios:?} outside [1.5, 3]");
}

#[test]
fn criterion_5_property_suite() {
    let results = run_property_suite();
    let mut ok = true;
    for r in &results {
        verdict(&format!("property/{}", r.name), r.passed, &r.detail);
        ok &= r.passed;
    }
    assert!(ok, "property suite failed");
    assert_eq!(results.len(), 8, "all eight checks must run");
}
