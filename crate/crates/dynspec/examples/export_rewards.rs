//! Records a raw reward stream to CSV (columns t, arm_id, reward) — the
//! wire format downstream tooling consumes.
//!
//!     cargo run --release --example export_rewards -- rewards.csv

use dynspec::envs::{record_pulls, write_rewards_csv, CircleEnv, NoiseModel};

fn main() -> dynspec::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "rewards.csv".into());
    let noise = NoiseModel::uniform(0.3, 7)?;
    let mut env = CircleEnv::new(0.001, 5, std::f64::consts::PI, noise)?;
    let arms = vec![vec![1.0, 0.0], vec![0.0, 1.0]];

    // alternate the two basis arms for 400 steps
    let schedule = (0..400).map(|t| t % 2);
    let records = record_pulls(&mut env, &arms, schedule)?;
    let file = std::fs::File::create(&path)?;
    write_rewards_csv(file, &records)?;
    println!("wrote {} rows to {path}", records.len());
    println!("first rows:");
    for r in records.iter().take(6) {
        println!("  t = {:>3}  arm {}  reward {:+.4}", r.t, r.arm_id, r.reward);
    }
    Ok(())
}
