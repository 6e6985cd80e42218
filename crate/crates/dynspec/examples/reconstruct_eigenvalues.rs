//! Recovering eigenvalues of the one-step map M rather than M^d: pad the
//! system with inert dimensions until d + r is coprime to the nearly period,
//! then raise the estimated map to the matching modular-inverse power.
//!
//!     cargo run --release --example reconstruct_eigenvalues

use dynspec::eigen::{
    estimate_eigen_map, modular_inverse_multiplier, reconstruct_unit_eigenvalues, EigenConfig,
};
use dynspec::envs::{random_unit_theta, LinearSystemEnv, NoiseModel};
use dynspec::harness::permshrink_matrix;
use dynspec::linalg::{distinct_eigen_oracle, ComplexMatrix};
use num_complex::Complex64;

fn main() -> dynspec::Result<()> {
    let matrix = permshrink_matrix();
    let d = matrix.len();
    let theta = random_unit_theta(d, 4);
    let nearly_period = 24u64; // a known multiple of the trajectory's period

    // d + r must be coprime to the period; r = 0 works since gcd(5, 24) = 1
    let r_pad = 0usize;
    let power = modular_inverse_multiplier((d + r_pad) as u64, nearly_period)?;
    println!("d + r = {}, power m = {} (m (d+r) = 1 mod {nearly_period})", d + r_pad, power);

    let cfg = EigenConfig {
        n: 16 * nearly_period * nearly_period,
        l: nearly_period,
        dim: d,
        delta: 0.2,
        noise_proxy: 0.0,
        spectral_gap: 0.1,
        kappa: 6.0,
        traj_bound: 1.0,
        seed: 4,
        allow_undersized: false,
    };
    let env = LinearSystemEnv::new(matrix.clone(), theta.clone(), NoiseModel::none())?;
    let recovered = reconstruct_unit_eigenvalues(&env, &cfg, r_pad)?;

    let m = ComplexMatrix::from_real_rows(&matrix)?;
    let theta_c: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let expected = distinct_eigen_oracle(&m, &theta_c, 1, 1.0)?;

    println!("\nrecovered unit-circle eigenvalues of M itself:");
    for z in &recovered {
        println!("  {:.4}{:+.4}i", z.re, z.im);
    }
    println!("trajectory-visible unit eigenvalues (oracle):");
    for z in &expected {
        println!("  {:.4}{:+.4}i", z.re, z.im);
    }

    let worst = expected
        .iter()
        .map(|e| {
            recovered
                .iter()
                .map(|r| (r - e).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    println!("\nworst distance from an oracle eigenvalue to its nearest recovery: {worst:.5}");

    // for contrast: without reconstruction the d-step map's eigenvalues appear
    let mut plain_env = LinearSystemEnv::new(matrix, theta, NoiseModel::none())?;
    let plain = estimate_eigen_map(&mut plain_env, &cfg)?;
    println!("\nd-step spectrum before reconstruction:");
    for z in plain.reported_spectrum() {
        if z.norm() > 0.0 {
            println!("  {:.4}{:+.4}i", z.re, z.im);
        }
    }
    Ok(())
}
