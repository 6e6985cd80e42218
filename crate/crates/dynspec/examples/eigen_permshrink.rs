//! Eigenvalue estimation on the permutation-shrink system: reproduces the
//! reference comparison table over several effective-sample-size multipliers.
//!
//!     cargo run --release --example eigen_permshrink

use dynspec::harness::{
    emit_table, run_experiment, ExperimentConfig, ExperimentKind, ExperimentResults, TableFormat,
};

fn main() -> dynspec::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::EigenPermshrink);
    // trim to two multipliers so the example stays quick; the full set runs
    // in the acceptance suite and `dynspec reproduce`
    cfg.eigen.c_sim = vec![1, 5];
    println!(
        "running seeds {:?} at c_sim {:?} (conditioned instances)\n",
        cfg.seeds, cfg.eigen.c_sim
    );
    let report = run_experiment(&cfg)?;
    print!("{}", emit_table(&report, TableFormat::Markdown)?);
    if let ExperimentResults::Eigen(rows) = &report.results {
        let worst = rows.iter().map(|r| r.max_visible_error).fold(0.0, f64::max);
        println!("\nworst matched-eigenvalue error: {worst:.5}");
        println!("total pulls: {}", report.total_pulls);
    }
    Ok(())
}
