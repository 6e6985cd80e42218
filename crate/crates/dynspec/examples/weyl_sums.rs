//! Quadratic-phase (Weyl) sums: unlike a linear-phase geometric sum, the
//! quadratic sum's magnitude grows linearly in N with a 1/sqrt(q) floor —
//! the mechanism that keeps the dynamical signal from cancelling while the
//! noise averages out.
//!
//!     cargo run --release --example weyl_sums

use dynspec::numerics::{weyl_constant_surrogate, weyl_lower_constant, weyl_sum_scalar};

fn main() -> dynspec::Result<()> {
    println!("normalized magnitudes |W(N, b, q)| / N at N = 16 q^2:\n");
    println!("{:>4} {:>10} {:>10} {:>10}", "q", "min over b", "max over b", "1/sqrt(4q)");
    for q in 1..=10u64 {
        let n = 16 * q * q;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for b in 0..q {
            let w = weyl_sum_scalar(n, b, q)?.norm() / n as f64;
            lo = lo.min(w);
            hi = hi.max(w);
        }
        println!("{q:>4} {lo:>10.5} {hi:>10.5} {:>10.5}", 1.0 / (4.0 * q as f64).sqrt());
    }

    let c = weyl_lower_constant(10)?;
    println!("\ncalibrated lower-bound constant c (q <= 10): {c:.6}");
    println!("so |W(N, b, q)| >= c N / sqrt(q) at the calibration points");

    println!("\ntwo-sided ratio surrogate C at N = 16 L^2:");
    for l in [3u64, 5, 8, 24] {
        println!("  L = {l:>2}: C = {:.4}", weyl_constant_surrogate(l)?);
    }

    println!("\ngrowth in N at q = 5, b = 2:");
    for n in [400u64, 800, 1600, 3200, 6400] {
        let w = weyl_sum_scalar(n, 2, 5)?.norm();
        println!("  N = {n:>5}: |W| = {w:>10.2} (|W|/N = {:.5})", w / n as f64);
    }
    Ok(())
}
