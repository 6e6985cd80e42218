//! Frequency scan of a noisy periodic signal: the phase-weighted average
//! |R((a_t); s/ell)| spikes at fractions whose denominator divides the
//! period and averages out everywhere else.

use dynspec::envs::{NoiseModel, NoiseKind};
use dynspec::numerics::{exp_sum, ComplexSeries, ReducedRational};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

fn main() {
    let period = 6usize;
    let horizon = 50_000usize;
    let noise_proxy = 0.3;

    // hidden signal: one period of arbitrary values, repeated  + Gaussian noise
    let base = [1.0, 0.2, -0.7, 0.9, -0.3, 0.4];
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let samples: Vec<Complex64> = (0..horizon)
        .map(|t| {
            let noise: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal);
            Complex64::new(base[t % period] + noise_proxy * noise, 0.0)
        })
        .collect();
    let series = ComplexSeries::new(samples, 1).unwrap();

    let _ = NoiseModel::new(NoiseKind::Gaussian, noise_proxy, 42); // same model the envs use

    println!("|R| over all reduced fractions with denominator <= 8");
    println!("(signal period {period}, horizon {horizon}, noise proxy {noise_proxy})\n");
    println!("{:>8} {:>12}   ", "q", "|R(a; q)|");
    for ell in 2..=8u64 {
        for q in ReducedRational::with_denominator(ell) {
            let magnitude = exp_sum(&series, q).norm();
            let bar = "#".repeat((magnitude * 120.0).min(60.0) as usize);
            let mark = if (period as u64).is_multiple_of(ell) { "divides the period" } else { "" };
            println!("{:>8} {:>12.6} {} {}", q.to_string(), magnitude, bar, mark);
        }
    }
}
