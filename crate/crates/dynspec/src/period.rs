//! Aliquot-nearly-period estimation from noisy bandit rewards.
//!
//! The estimator sweeps an orthonormal arm basis, buffers a fixed horizon of
//! rewards per dimension, and runs an incremental divisor search: whenever the
//! phase-weighted average of a stride-beta subsequence exceeds a threshold at
//! some reduced frequency with denominator ell, the candidate period beta is
//! multiplied by ell and the search restarts at ell = 2. The committed beta is,
//! with high probability, an aliquot nearly period of the hidden trajectory.

use num_complex::Complex64;
use serde::Serialize;

use crate::envs::BanditEnvironment;
use crate::error::{Error, Result};
use crate::numerics::{exp_sum_samples, ReducedRational};

/// Inputs for the period estimator and its sample-size rule.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodConfig {
    /// Target accuracy rho of the recovered nearly period.
    pub rho: f64,
    /// Failure probability bound.
    pub delta: f64,
    /// Largest period the search will consider (at least 2).
    pub l_max: u64,
    /// Margin r in [0, 1) absorbing the trajectory's wobble mu (r * eps >= mu
    /// must hold for the guarantee; exactly periodic systems can use 0).
    pub r_margin: f64,
    /// Arm/observation dimension d.
    pub dim: usize,
    /// Sub-Gaussian noise proxy R.
    pub noise_proxy: f64,
    /// Radius bound B on the hidden trajectory.
    pub traj_bound: f64,
    /// Optional hard cap on total pulls; exceeding it aborts before pulling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pull_budget: Option<u64>,
}

impl PeriodConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::Config(format!("rho {} must be > 0", self.rho)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta {} must lie in (0,1)", self.delta)));
        }
        if self.l_max < 2 {
            return Err(Error::Config(format!("l_max {} must be >= 2", self.l_max)));
        }
        if !(0.0..1.0).contains(&self.r_margin) {
            return Err(Error::Config(format!("r_margin {} must lie in [0,1)", self.r_margin)));
        }
        if self.dim == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if !(self.noise_proxy >= 0.0) {
            return Err(Error::Config(format!("noise proxy {} must be >= 0", self.noise_proxy)));
        }
        if !(self.traj_bound > 0.0) {
            return Err(Error::Config(format!("trajectory bound {} must be > 0", self.traj_bound)));
        }
        Ok(())
    }

    /// Auxiliary constant gamma = 1 / (1 + sqrt(4 L_max + 1)) of the
    /// detection analysis; exposed for tests.
    pub fn detection_gamma(&self) -> f64 {
        1.0 / (1.0 + (4.0 * self.l_max as f64 + 1.0).sqrt())
    }

    /// Auxiliary constant xi = 1 / (3 gamma sqrt(L_max)); lies in (2/3, 1).
    pub fn detection_xi(&self) -> f64 {
        1.0 / (3.0 * self.detection_gamma() * (self.l_max as f64).sqrt())
    }

    /// Deviation floor sigma_0 = rho / (2 sqrt(d L_max)) used by the analysis.
    pub fn deviation_floor(&self) -> f64 {
        self.rho / (2.0 * (self.dim as f64 * self.l_max as f64).sqrt())
    }

    /// Wobble-to-signal ratio lambda = mu / (sigma_0 gamma).
    pub fn wobble_ratio(&self, mu: f64, sigma0: f64) -> f64 {
        mu / (sigma0 * self.detection_gamma())
    }
}

/// Detection threshold eps = rho / (6 sqrt(d) L_max).
pub fn threshold_eps(cfg: &PeriodConfig) -> f64 {
    cfg.rho / (6.0 * (cfg.dim as f64).sqrt() * cfg.l_max as f64)
}

/// Per-dimension horizon: the smallest integer T_p with
/// T_p >= 72 d A L_max^2 / (rho^2 (1-r)^2) + 108 B sqrt(d) L_max^3 / (rho (1-r)),
/// where A = R^2 log(4 d L_max^2 log(L_max) / delta).
pub fn required_samples(cfg: &PeriodConfig) -> u64 {
    let d = cfg.dim as f64;
    let l = cfg.l_max as f64;
    let r = cfg.noise_proxy;
    let one_minus_r = 1.0 - cfg.r_margin;
    let a = r * r * (4.0 * d * l * l * l.ln() / cfg.delta).ln();
    let noise_term = 72.0 * d * a * l * l / (cfg.rho * cfg.rho * one_minus_r * one_minus_r);
    let signal_term = 108.0 * cfg.traj_bound * d.sqrt() * l * l * l / (cfg.rho * one_minus_r);
    (noise_term + signal_term).ceil() as u64
}

/// One probe of the divisor search: the magnitude of the exponential sum of
/// the stride-`beta` subsequence starting at offset `s`, tested at frequency
/// `q`, while the committed candidate period was `beta`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    pub dimension: usize,
    pub offset: u64,
    pub q: ReducedRational,
    pub beta: u64,
    pub magnitude: f64,
    pub hit: bool,
}

/// Output of the period search.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodEstimate {
    /// The committed aliquot nearly period.
    pub beta: u64,
    /// Every probe evaluated, per dimension, in evaluation order.
    pub per_dimension_log: Vec<Vec<ProbeRecord>>,
    /// Pulls consumed: exactly d * T_p.
    pub total_pulls: u64,
    /// Threshold the magnitudes were compared against.
    pub eps: f64,
    /// Per-dimension horizon used.
    pub samples_per_dimension: u64,
}

impl PeriodEstimate {
    /// Denominators of the frequencies that registered hits, in order.
    pub fn hit_factors(&self) -> Vec<u64> {
        self.per_dimension_log
            .iter()
            .flatten()
            .filter(|p| p.hit)
            .map(|p| p.q.denominator())
            .collect()
    }
}

/// Standard basis arms e_1 .. e_d.
pub fn standard_basis(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        })
        .collect()
}

fn check_orthonormal(basis: &[Vec<f64>], d: usize) -> Result<()> {
    if basis.len() != d {
        return Err(Error::Dimension { expected: d, got: basis.len() });
    }
    for (i, u) in basis.iter().enumerate() {
        if u.len() != d {
            return Err(Error::Dimension { expected: d, got: u.len() });
        }
        for (j, v) in basis.iter().enumerate() {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let want = f64::from(u8::from(i == j));
            if (dot - want).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "arm basis is not orthonormal: <u{i}, u{j}> = {dot}"
                )));
            }
        }
    }
    Ok(())
}

/// Runs the full period search against a live environment.
///
/// For each dimension m the estimator pulls arm u_m for T_p consecutive
/// steps, buffering the rewards (the bandit constraint forbids revisiting
/// past times once the stride changes), then scans denominators ell = 2, 3,
/// ... while ell * beta <= L_max. Offsets ascend, then numerators; the first
/// magnitude above eps commits beta <- beta * ell and restarts ell. The
/// divisor state carries across dimensions; ell restarts at each new
/// dimension so later dimensions are searched even after an earlier one
/// saturated.
pub fn estimate_period(
    env: &mut dyn BanditEnvironment,
    cfg: &PeriodConfig,
    basis: &[Vec<f64>],
) -> Result<PeriodEstimate> {
    cfg.validate()?;
    if env.dim() != cfg.dim {
        return Err(Error::Dimension { expected: cfg.dim, got: env.dim() });
    }
    check_orthonormal(basis, cfg.dim)?;

    let t_p = required_samples(cfg);
    let needed = t_p
        .checked_mul(cfg.dim as u64)
        .ok_or_else(|| Error::Config("pull count overflows u64".into()))?;
    if let Some(budget) = cfg.pull_budget {
        if needed > budget {
            return Err(Error::Budget { needed, budget });
        }
    }
    let eps = threshold_eps(cfg);

    let mut beta: u64 = 1;
    let mut logs: Vec<Vec<ProbeRecord>> = Vec::with_capacity(cfg.dim);
    let mut pulls: u64 = 0;

    for (m, arm) in basis.iter().enumerate() {
        let mut buffer: Vec<Complex64> = Vec::with_capacity(t_p as usize);
        for _ in 0..t_p {
            let r = env.pull(arm)?;
            buffer.push(Complex64::new(r, 0.0));
        }
        pulls += t_p;

        let mut log = Vec::new();
        let mut ell: u64 = 1;
        while ell * beta <= cfg.l_max {
            ell += 1;
            if scan_denominator(&buffer, t_p, beta, ell, eps, m, &mut log)? {
                beta *= ell;
                ell = 1;
            }
        }
        logs.push(log);
    }

    debug_assert_eq!(pulls, needed);
    Ok(PeriodEstimate {
        beta,
        per_dimension_log: logs,
        total_pulls: pulls,
        eps,
        samples_per_dimension: t_p,
    })
}

/// Probes every offset and reduced frequency with denominator `ell` over the
/// stride-`beta` subsequences of one dimension's buffer. Offsets ascend, then
/// numerators; the scan stops at the first magnitude above `eps`.
fn scan_denominator(
    buffer: &[Complex64],
    t_p: u64,
    beta: u64,
    ell: u64,
    eps: f64,
    dimension: usize,
    log: &mut Vec<ProbeRecord>,
) -> Result<bool> {
    for s in 0..beta {
        for q in ReducedRational::with_denominator(ell) {
            // stride-beta subsequence r_{t0+s+beta*t}, t = 1..count;
            // buffer index of global offset s + beta*t is s + beta*t - 1
            let count = ((t_p - s) / beta) as usize;
            if count == 0 {
                continue;
            }
            let first = (s + beta - 1) as usize;
            let terms = buffer[first..]
                .iter()
                .step_by(beta as usize)
                .take(count)
                .copied();
            let magnitude = exp_sum_samples(terms, q)?.norm();
            let hit = magnitude > eps;
            log.push(ProbeRecord {
                dimension,
                offset: s,
                q,
                beta,
                magnitude,
                hit,
            });
            if hit {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Checks whether `ell` is a (rho, lambda)-aliquot nearly period of a
/// recorded trajectory that is mu-nearly periodic of length `l`: ell must
/// divide l and every pair of states ell-congruent in time must stay within
/// rho + 2 lambda mu.
pub fn is_aliquot_nearly_period(
    trajectory: &[Vec<f64>],
    ell: u64,
    rho: f64,
    lambda: f64,
    mu: f64,
    l: u64,
) -> bool {
    if ell == 0 || l == 0 || !l.is_multiple_of(ell) {
        return false;
    }
    let bound = rho + 2.0 * lambda * mu;
    let step = ell as usize;
    for i in 0..trajectory.len() {
        let mut j = i + step;
        while j < trajectory.len() {
            let dist: f64 = trajectory[i]
                .iter()
                .zip(&trajectory[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist >= bound {
                return false;
            }
            j += step;
        }
    }
    true
}
