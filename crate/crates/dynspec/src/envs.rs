//! Bandit environments: a hidden dynamical system answers each arm pull with
//! one noisy scalar reward f^t(theta)^T x + eta_t and advances by one step.
//! Past time steps can never be re-queried.
//!
//! Environments own their noise stream; identical seeds and pull sequences
//! reproduce identical reward streams bit for bit.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// RNG stream ids, kept distinct so arm draws, noise draws, and initial-state
/// draws never consume from each other's sequences.
pub(crate) const NOISE_STREAM: u64 = 0;
pub(crate) const ARM_STREAM: u64 = 1;
pub(crate) const THETA_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Uniform,
    None,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::Uniform),
            "none" => Ok(Self::None),
            other => Err(Error::Parse(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// Per-environment noise source. Gaussian draws N(0, R^2), uniform draws
/// Uniform[-R, R]; both are R-sub-Gaussian. The stream advances exactly once
/// per pull, independent of the arm.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    kind: NoiseKind,
    proxy: f64,
    seed: u64,
    rng: ChaCha12Rng,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, proxy: f64, seed: u64) -> Result<Self> {
        if !proxy.is_finite() || proxy < 0.0 {
            return Err(Error::Domain(format!("noise proxy {proxy} must be >= 0")));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(NOISE_STREAM);
        Ok(Self { kind, proxy, seed, rng })
    }

    pub fn gaussian(proxy: f64, seed: u64) -> Result<Self> {
        Self::new(NoiseKind::Gaussian, proxy, seed)
    }

    pub fn uniform(proxy: f64, seed: u64) -> Result<Self> {
        Self::new(NoiseKind::Uniform, proxy, seed)
    }

    pub fn none() -> Self {
        Self::new(NoiseKind::None, 0.0, 0).expect("valid")
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn proxy(&self) -> f64 {
        self.proxy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh copy rewound to the start of its stream.
    pub fn restarted(&self) -> Self {
        Self::new(self.kind, self.proxy, self.seed).expect("valid")
    }

    fn sample(&mut self) -> f64 {
        if self.proxy == 0.0 {
            // still advance the stream so the pull count stays aligned
            let _: f64 = self.rng.gen();
            return 0.0;
        }
        match self.kind {
            NoiseKind::None => {
                let _: f64 = self.rng.gen();
                0.0
            }
            NoiseKind::Gaussian => {
                let dist = Normal::new(0.0, self.proxy).expect("valid std");
                self.rng.sample(dist)
            }
            NoiseKind::Uniform => {
                let dist = Uniform::new_inclusive(-self.proxy, self.proxy);
                self.rng.sample(dist)
            }
        }
    }
}

/// A stateful environment delivering bandit feedback on a hidden trajectory.
pub trait BanditEnvironment {
    /// Arm dimension d.
    fn dim(&self) -> usize;

    /// Steps taken so far; the next pull observes f^t(theta) at this t.
    fn time(&self) -> u64;

    /// Observe f^t(theta)^T x + eta_t and advance the system one step.
    fn pull(&mut self, arm: &[f64]) -> Result<f64>;

    /// Current hidden state f^t(theta), without advancing time. Test and
    /// diagnostics backdoor; estimators never call it.
    fn hidden_state(&self) -> Vec<f64>;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_arm(arm: &[f64], d: usize) -> Result<()> {
    if arm.len() != d {
        return Err(Error::Dimension { expected: d, got: arm.len() });
    }
    if arm.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("arm has non-finite entries".into()));
    }
    Ok(())
}

/// Linear system: hidden state M^t theta in R^d.
#[derive(Clone, Debug)]
pub struct LinearSystemEnv {
    matrix: Vec<f64>, // row-major d x d
    dim: usize,
    theta0: Vec<f64>,
    state: Vec<f64>,
    scratch: Vec<f64>,
    t: u64,
    noise: NoiseModel,
}

impl LinearSystemEnv {
    pub fn new(matrix: Vec<Vec<f64>>, theta: Vec<f64>, noise: NoiseModel) -> Result<Self> {
        let d = matrix.len();
        if d == 0 {
            return Err(Error::Domain("empty system matrix".into()));
        }
        let mut flat = Vec::with_capacity(d * d);
        for row in &matrix {
            if row.len() != d {
                return Err(Error::Dimension { expected: d, got: row.len() });
            }
            flat.extend_from_slice(row);
        }
        if flat.iter().chain(theta.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite system data".into()));
        }
        if theta.len() != d {
            return Err(Error::Dimension { expected: d, got: theta.len() });
        }
        Ok(Self {
            matrix: flat,
            dim: d,
            state: theta.clone(),
            theta0: theta,
            scratch: vec![0.0; d],
            t: 0,
            noise,
        })
    }

    /// Parses a whitespace-separated matrix, one row per line; '#' starts a comment.
    pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(|tok| tok.parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("bad matrix entry: {e}")))?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("matrix file holds no rows".into()));
        }
        Ok(rows)
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.matrix[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn noise_model(&self) -> &NoiseModel {
        &self.noise
    }

    fn advance(&mut self) {
        for i in 0..self.dim {
            self.scratch[i] = dot(&self.matrix[i * self.dim..(i + 1) * self.dim], &self.state);
        }
        std::mem::swap(&mut self.state, &mut self.scratch);
        self.t += 1;
    }
}

impl BanditEnvironment for LinearSystemEnv {
    fn dim(&self) -> usize {
        self.dim
    }

    fn time(&self) -> u64 {
        self.t
    }

    fn pull(&mut self, arm: &[f64]) -> Result<f64> {
        check_arm(arm, self.dim)?;
        let reward = dot(&self.state, arm) + self.noise.sample();
        self.advance();
        Ok(reward)
    }

    fn hidden_state(&self) -> Vec<f64> {
        self.state.clone()
    }
}

/// Bounded Life board. Cells outside the grid are permanently dead.
///
/// The observation vector is the 0/1 state of a fixed set of cells, so the
/// reward for arm x is sum_i cell_i * x_i plus noise.
#[derive(Clone, Debug)]
pub struct LifeGameEnv {
    width: usize,
    height: usize,
    grid: Vec<u8>,
    scratch: Vec<u8>,
    observed: Vec<(usize, usize)>,
    t: u64,
    noise: NoiseModel,
}

impl LifeGameEnv {
    pub fn new(
        width: usize,
        height: usize,
        alive: &[(usize, usize)],
        observed: Vec<(usize, usize)>,
        noise: NoiseModel,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain("empty board".into()));
        }
        if observed.is_empty() {
            return Err(Error::Domain("no observed cells".into()));
        }
        let mut grid = vec![0u8; width * height];
        for &(r, c) in alive {
            if r >= height || c >= width {
                return Err(Error::Domain(format!("cell ({r},{c}) is off the board")));
            }
            grid[r * width + c] = 1;
        }
        for &(r, c) in &observed {
            if r >= height || c >= width {
                return Err(Error::Domain(format!("observed cell ({r},{c}) is off the board")));
            }
        }
        Ok(Self {
            width,
            height,
            scratch: vec![0u8; width * height],
            grid,
            observed,
            t: 0,
            noise,
        })
    }

    /// The default board checked into the repo.
    pub fn fixture_text() -> &'static str {
        include_str!("../fixtures/lifegame.txt")
    }

    /// Parses the plain-text fixture format: grid rows of '.'/'#' followed by
    /// an `observed: r,c r,c ...` line. '#'-prefixed lines are comments, but
    /// a line consisting only of '.' and '#' cells is a grid row.
    pub fn from_fixture_str(text: &str, noise: NoiseModel) -> Result<Self> {
        let mut rows: Vec<&str> = Vec::new();
        let mut observed = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("observed:") {
                for tok in rest.split_whitespace() {
                    let mut parts = tok.split(',');
                    let r = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad observed cell '{tok}'")))?;
                    let c = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad observed cell '{tok}'")))?;
                    observed.push((r, c));
                }
                continue;
            }
            if line.chars().all(|ch| ch == '.' || ch == '#') && line.contains('.') {
                rows.push(line);
            } else if line.starts_with('#') {
                continue; // comment
            } else {
                return Err(Error::Parse(format!("unrecognized fixture line '{line}'")));
            }
        }
        if rows.is_empty() {
            return Err(Error::Parse("fixture has no grid rows".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("ragged grid rows".into()));
        }
        let mut alive = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                if ch == '#' {
                    alive.push((r, c));
                }
            }
        }
        Self::new(width, rows.len(), &alive, observed, noise)
    }

    pub fn from_fixture_file(path: &Path, noise: NoiseModel) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_fixture_str(&text, noise)
    }

    pub fn grid(&self) -> &[u8] {
        &self.grid
    }

    pub fn observed_cells(&self) -> &[(usize, usize)] {
        &self.observed
    }

    /// One synchronous update: live cells survive on 2 or 3 live neighbors
    /// and die otherwise; dead cells revive on exactly 3.
    fn step(&mut self) {
        let w = self.width as isize;
        let h = self.height as isize;
        for r in 0..h {
            for c in 0..w {
                let mut n = 0u8;
                for dr in -1..=1isize {
                    for dc in -1..=1isize {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let rr = r + dr;
                        let cc = c + dc;
                        if rr >= 0 && rr < h && cc >= 0 && cc < w {
                            n += self.grid[(rr * w + cc) as usize];
                        }
                    }
                }
                let idx = (r * w + c) as usize;
                let alive = self.grid[idx] == 1;
                self.scratch[idx] = u8::from(if alive { n == 2 || n == 3 } else { n == 3 });
            }
        }
        std::mem::swap(&mut self.grid, &mut self.scratch);
        self.t += 1;
    }
}

impl BanditEnvironment for LifeGameEnv {
    fn dim(&self) -> usize {
        self.observed.len()
    }

    fn time(&self) -> u64 {
        self.t
    }

    fn pull(&mut self, arm: &[f64]) -> Result<f64> {
        check_arm(arm, self.observed.len())?;
        let signal: f64 = self
            .observed
            .iter()
            .zip(arm)
            .map(|(&(r, c), x)| f64::from(self.grid[r * self.width + c]) * x)
            .sum();
        let reward = signal + self.noise.sample();
        self.step();
        Ok(reward)
    }

    fn hidden_state(&self) -> Vec<f64> {
        self.observed
            .iter()
            .map(|&(r, c)| f64::from(self.grid[r * self.width + c]))
            .collect()
    }
}

/// Point circulating on a circle with a small radius wobble:
///   r_{t+1} = mu (alpha (r_t - 1)/mu - ceil(alpha (r_t - 1)/mu)) + 1,
///   angle_{t+1} = angle_t + 2 pi / L.
/// The hidden state is (r cos angle, r sin angle); the radius stays in
/// (1 - mu, 1].
#[derive(Clone, Debug)]
pub struct CircleEnv {
    radius: f64,
    angle: f64,
    mu: f64,
    alpha: f64,
    period: u64,
    t: u64,
    noise: NoiseModel,
}

impl CircleEnv {
    /// Starts at radius 1, angle 0. `alpha` is the irrational drift constant
    /// (pi in the reference experiments).
    pub fn new(mu: f64, period: u64, alpha: f64, noise: NoiseModel) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("mu {mu} must be > 0")));
        }
        if period == 0 {
            return Err(Error::Domain("period must be >= 1".into()));
        }
        Ok(Self {
            radius: 1.0,
            angle: 0.0,
            mu,
            alpha,
            period,
            t: 0,
            noise,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    fn advance(&mut self) {
        let x = self.alpha * (self.radius - 1.0) / self.mu;
        self.radius = self.mu * (x - x.ceil()) + 1.0;
        self.angle += 2.0 * std::f64::consts::PI / self.period as f64;
        if self.angle > 2.0 * std::f64::consts::PI {
            self.angle -= 2.0 * std::f64::consts::PI;
        }
        self.t += 1;
    }
}

impl BanditEnvironment for CircleEnv {
    fn dim(&self) -> usize {
        2
    }

    fn time(&self) -> u64 {
        self.t
    }

    fn pull(&mut self, arm: &[f64]) -> Result<f64> {
        check_arm(arm, 2)?;
        let state = self.hidden_state();
        let reward = dot(&state, arm) + self.noise.sample();
        self.advance();
        Ok(reward)
    }

    fn hidden_state(&self) -> Vec<f64> {
        vec![self.radius * self.angle.cos(), self.radius * self.angle.sin()]
    }
}

/// Unit vectors drawn uniformly from the sphere in R^d (normalized Gaussians).
pub fn random_unit_vectors(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(ARM_STREAM);
    random_unit_vectors_with(&mut rng, d, count)
}

/// As `random_unit_vectors`, drawing from a caller-supplied stream.
pub fn random_unit_vectors_with<R: Rng>(rng: &mut R, d: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Unit vector for the initial hidden state, drawn from the dedicated stream.
pub fn random_unit_theta(d: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(THETA_STREAM);
    random_unit_vectors_with(&mut rng, d, 1).remove(0)
}

/// One recorded pull for CSV export.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RewardRecord {
    pub t: u64,
    pub arm_id: usize,
    pub reward: f64,
}

/// Streams `(t, arm_id, reward)` rows as CSV.
pub fn write_rewards_csv<W: Write>(writer: W, records: &[RewardRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for rec in records {
        w.serialize(rec).map_err(|e| Error::Data(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Pulls each listed arm in sequence, recording the reward stream.
pub fn record_pulls(
    env: &mut dyn BanditEnvironment,
    arms: &[Vec<f64>],
    schedule: impl IntoIterator<Item = usize>,
) -> Result<Vec<RewardRecord>> {
    let mut out = Vec::new();
    for arm_id in schedule {
        let arm = arms
            .get(arm_id)
            .ok_or_else(|| Error::Domain(format!("arm id {arm_id} out of range")))?;
        let t = env.time();
        let reward = env.pull(arm)?;
        out.push(RewardRecord { t, arm_id, reward });
    }
    Ok(out)
}

/// Complex view of a real state vector, for feeding the spectral oracles.
pub fn complexify(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn identity(d: usize) -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect())
            .collect()
    }

    fn e(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    fn permshrink() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.7],
        ]
    }

    #[test]
    fn linear_identity_rewards_are_constant() {
        let mut env =
            LinearSystemEnv::new(identity(3), e(3, 0), NoiseModel::none()).unwrap();
        for _ in 0..5 {
            assert_abs_diff_eq!(env.pull(&e(3, 0)).unwrap(), 1.0, epsilon = 1e-15);
        }
        assert_eq!(env.time(), 5);
    }

    #[test]
    fn linear_hidden_state_matches_matrix_power_oracle() {
        let m = permshrink();
        let theta = vec![0.3, -0.5, 0.7, 0.1, 0.9];
        let mut env = LinearSystemEnv::new(m.clone(), theta.clone(), NoiseModel::none()).unwrap();
        assert_eq!(env.hidden_state(), theta);

        // oracle via repeated squaring on the complex matrix
        let cm = crate::linalg::ComplexMatrix::from_real_rows(&m).unwrap();
        let arm = e(5, 0);
        for t in [1u64, 2, 3, 17, 100, 10_000] {
            while env.time() < t {
                env.pull(&arm).unwrap();
            }
            let expected = cm
                .matrix_power(t)
                .unwrap()
                .mul_vec(&complexify(&theta))
                .unwrap();
            let got = env.hidden_state();
            for i in 0..5 {
                assert!(
                    (got[i] - expected[i].re).abs() < 1e-9,
                    "t={t} i={i}: {} vs {}",
                    got[i],
                    expected[i].re
                );
            }
        }
    }

    #[test]
    fn seeded_reward_streams_are_reproducible() {
        for kind in [NoiseKind::Gaussian, NoiseKind::Uniform] {
            let noise = NoiseModel::new(kind, 0.3, 99).unwrap();
            let mut a = LinearSystemEnv::new(identity(2), e(2, 0), noise.clone()).unwrap();
            let mut b = LinearSystemEnv::new(identity(2), e(2, 0), noise.restarted()).unwrap();
            for _ in 0..50 {
                assert_eq!(a.pull(&e(2, 0)).unwrap(), b.pull(&e(2, 0)).unwrap());
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut env = LinearSystemEnv::new(identity(3), e(3, 0), NoiseModel::none()).unwrap();
        assert!(env.pull(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn lifegame_fixture_has_period_eight() {
        let mut env =
            LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), NoiseModel::none()).unwrap();
        assert_eq!(env.dim(), 5);
        let start = env.grid().to_vec();
        let mut observed_cycle = Vec::new();
        for _ in 0..8 {
            observed_cycle.push(env.hidden_state());
            env.pull(&e(5, 0)).unwrap();
        }
        assert_eq!(env.grid(), &start[..], "grid must return after 8 steps");

        // no smaller period for the full grid
        let mut env2 =
            LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), NoiseModel::none()).unwrap();
        for steps in 1..8 {
            env2.pull(&e(5, 0)).unwrap();
            if steps < 8 {
                assert_ne!(env2.grid(), &start[..], "period divides {steps}");
            }
        }

        // each observed cell flips with fundamental period exactly 8
        for m in 0..5 {
            let series: Vec<f64> = observed_cycle.iter().map(|v| v[m]).collect();
            for p in [1usize, 2, 4] {
                let periodic = (0..8).all(|i| series[(i + p) % 8] == series[i]);
                assert!(!periodic, "cell {m} has period {p}");
            }
        }

        // the hidden vector is 0/1 with norm at most sqrt(5)
        for v in &observed_cycle {
            assert!(v.iter().all(|&x| x == 0.0 || x == 1.0));
            assert!(dot(v, v).sqrt() <= 5.0f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn lifegame_reward_has_period_dividing_eight() {
        let mut env =
            LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), NoiseModel::none()).unwrap();
        let arm = e(5, 2);
        let rewards: Vec<f64> = (0..24).map(|_| env.pull(&arm).unwrap()).collect();
        for i in 0..16 {
            assert_eq!(rewards[i], rewards[i + 8]);
        }
    }

    #[test]
    fn circle_initial_state_and_radius_band() {
        let noise = NoiseModel::none();
        let mut env = CircleEnv::new(0.001, 5, std::f64::consts::PI, noise).unwrap();
        let s0 = env.hidden_state();
        assert_abs_diff_eq!(s0[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s0[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(env.pull(&[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-15);

        let mut env = CircleEnv::new(0.2, 5, std::f64::consts::PI, NoiseModel::none()).unwrap();
        // kick the radius off the fixed point so the wobble is exercised
        env.radius = 0.9;
        for _ in 0..500 {
            env.pull(&[1.0, 0.0]).unwrap();
            assert!(env.radius > 1.0 - env.mu() - 1e-12 && env.radius <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn circle_trajectory_is_nearly_periodic() {
        let mu = 0.001;
        let l = 5usize;
        let mut env = CircleEnv::new(mu, l as u64, std::f64::consts::PI, NoiseModel::none()).unwrap();
        env.radius = 1.0 - 0.4 * mu; // off the fixed point: worst-case wobble
        let mut traj = Vec::new();
        for _ in 0..2000 {
            traj.push(env.hidden_state());
            env.pull(&[1.0, 0.0]).unwrap();
        }
        let mut worst = 0.0f64;
        for s in 0..l {
            for i in (s..traj.len()).step_by(l) {
                for j in ((i + l)..traj.len()).step_by(l) {
                    let dx = traj[i][0] - traj[j][0];
                    let dy = traj[i][1] - traj[j][1];
                    worst = worst.max((dx * dx + dy * dy).sqrt());
                }
            }
        }
        assert!(worst < 3.0 * mu, "wobble {worst} exceeds 3 mu");
    }

    #[test]
    fn random_unit_vectors_are_unit_and_symmetric() {
        let vs = random_unit_vectors(1, 64, 7);
        assert!(vs.iter().all(|v| v[0] == 1.0 || v[0] == -1.0));

        let vs = random_unit_vectors(5, 1000, 7);
        let mut mean = vec![0.0; 5];
        for v in &vs {
            let norm = dot(v, v).sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            for i in 0..5 {
                mean[i] += v[i];
            }
        }
        let mean_norm = dot(&mean, &mean).sqrt() / 1000.0;
        assert!(mean_norm < 5.0 / (1000.0f64).sqrt(), "mean norm {mean_norm}");
    }

    #[test]
    fn reward_records_roundtrip_csv() {
        let mut env = LinearSystemEnv::new(identity(2), e(2, 0), NoiseModel::none()).unwrap();
        let arms = vec![e(2, 0), e(2, 1)];
        let records = record_pulls(&mut env, &arms, [0usize, 1, 0]).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].t, 0);
        assert_eq!(records[2].t, 2);
        let mut buf = Vec::new();
        write_rewards_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,arm_id,reward"));
        assert_eq!(text.lines().count(), 4);
    }
}
