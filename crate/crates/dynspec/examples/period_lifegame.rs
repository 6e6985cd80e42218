//! Period estimation on the bounded Life board: five observed cells answer
//! arm pulls under Gaussian noise, and the divisor search recovers the
//! fundamental period eight.
//!
//!     cargo run --release --example period_lifegame -- [seed]

use dynspec::envs::{BanditEnvironment, LifeGameEnv, NoiseModel};
use dynspec::period::{estimate_period, standard_basis, required_samples, threshold_eps, PeriodConfig};

fn main() -> dynspec::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1234u64);

    let noise = NoiseModel::gaussian(0.3, seed)?;
    let mut env = LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), noise)?;

    // print one full cycle of the noiseless observation vector
    let mut preview = LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), NoiseModel::none())?;
    println!("noiseless observation vector over one cycle:");
    for t in 0..8 {
        let v: Vec<u8> = preview.hidden_state().iter().map(|&x| x as u8).collect();
        println!("  t = {t}: {v:?}");
        preview.pull(&standard_basis(5)[0])?;
    }

    let cfg = PeriodConfig {
        rho: 0.98,
        delta: 0.2,
        l_max: 10,
        r_margin: 0.0,
        dim: 5,
        noise_proxy: 0.3,
        traj_bound: 5.0f64.sqrt(),
        pull_budget: None,
    };
    println!(
        "\nhorizon T_p = {} per dimension, threshold eps = {:.6}",
        required_samples(&cfg),
        threshold_eps(&cfg)
    );

    let estimate = estimate_period(&mut env, &cfg, &standard_basis(5))?;
    for probe in estimate.per_dimension_log.iter().flatten().filter(|p| p.hit) {
        println!(
            "hit in dimension {}: |R| = {:.4} at q = {} over stride {}  ->  beta *= {}",
            probe.dimension,
            probe.magnitude,
            probe.q,
            probe.beta,
            probe.q.denominator()
        );
    }
    println!(
        "\nseed {seed}: estimated nearly period = {} ({} pulls)",
        estimate.beta, estimate.total_pulls
    );
    Ok(())
}
