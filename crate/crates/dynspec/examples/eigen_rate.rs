//! Convergence-rate study: on a fixed well-conditioned instance, the average
//! spectral-norm distance to the limit matrix halves (roughly) each time the
//! effective sample size quadruples.
//!
//!     cargo run --release --example eigen_rate

use dynspec::harness::{rate_study, RATE_SEEDS};

fn main() -> dynspec::Result<()> {
    let ladder = rate_study(9216, 2, &RATE_SEEDS)?;
    println!("{:>10} {:>14} {:>10}", "N", "avg error", "ratio");
    let mut prev: Option<f64> = None;
    for (n, err) in &ladder {
        match prev {
            Some(p) => println!("{n:>10} {err:>14.6} {:>10.3}", p / err),
            None => println!("{n:>10} {err:>14.6} {:>10}", "-"),
        }
        prev = Some(*err);
    }
    println!("\nsqrt(N) scaling predicts ratios near 2 per quadrupling");
    Ok(())
}
