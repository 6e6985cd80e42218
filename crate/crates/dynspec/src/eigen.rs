//! Eigenvalue estimation for hidden linear systems via quadratic-phase
//! (Weyl-type) reward averages.
//!
//! The estimator draws d random unit arms, waits N steps so that the
//! sub-unit eigendirections decay, then cycles the arms through a fixed
//! schedule of 2 N d^2 pulls. Two d x d matrices A_0, A_1 are assembled from
//! phase-weighted reward averages; the output A_1 (A_0 truncated)^+ has the
//! trajectory's unit-circle eigenvalues as its nonzero spectrum.

use num_complex::Complex64;
use serde::Serialize;

use crate::envs::{random_unit_vectors, BanditEnvironment, LinearSystemEnv};
use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, pseudo_inverse, spectral_projectors, truncate_singular, ComplexMatrix,
};

/// Inputs for one eigenvalue-estimation run.
#[derive(Clone, Debug, Serialize)]
pub struct EigenConfig {
    /// Effective sample size N: each matrix entry averages N rewards.
    pub n: u64,
    /// Nearly-period length entering the quadratic phase exp(i 2 pi j^2/(4L)).
    pub l: u64,
    /// System dimension d.
    pub dim: usize,
    /// Failure probability bound.
    pub delta: f64,
    /// Sub-Gaussian noise proxy R.
    pub noise_proxy: f64,
    /// Spectral gap Delta in (0, 1]: eigenvalues below the unit circle have
    /// magnitude at most 1 - Delta.
    pub spectral_gap: f64,
    /// Jordan-basis conditioning kappa >= 1.
    pub kappa: f64,
    /// Radius bound B on the hidden trajectory.
    pub traj_bound: f64,
    /// Seed for the arm draws.
    pub seed: u64,
    /// Skips the minimum-sample-size check; for deliberately undersized
    /// ablation runs only.
    pub allow_undersized: bool,
}

impl EigenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if self.l == 0 {
            return Err(Error::Config("nearly-period length must be >= 1".into()));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Config(format!("delta {} must lie in (0,1]", self.delta)));
        }
        if !(self.spectral_gap > 0.0 && self.spectral_gap <= 1.0) {
            return Err(Error::Config(format!(
                "spectral gap {} must lie in (0,1]",
                self.spectral_gap
            )));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::Config(format!("kappa {} must be >= 1", self.kappa)));
        }
        if !(self.traj_bound > 0.0) {
            return Err(Error::Config(format!(
                "trajectory bound {} must be > 0",
                self.traj_bound
            )));
        }
        if !(self.noise_proxy >= 0.0) {
            return Err(Error::Config(format!(
                "noise proxy {} must be >= 0",
                self.noise_proxy
            )));
        }
        if !self.allow_undersized {
            let min_n = min_effective_n(
                self.l,
                self.dim,
                self.spectral_gap,
                self.traj_bound,
                self.kappa,
            )?;
            if self.n < min_n {
                return Err(Error::Config(format!(
                    "effective sample size {} is below the minimum {} \
                     (set allow_undersized for ablation runs)",
                    self.n, min_n
                )));
            }
        }
        Ok(())
    }

    /// Total pulls one run consumes: N waits plus 2 N d^2 scheduled pulls.
    pub fn total_pulls(&self) -> u64 {
        let d = self.dim as u64;
        self.n + 2 * self.n * d * d
    }
}

/// Smallest admissible effective sample size:
/// max(16 L^2, -(d-1) log(Delta)/Delta + (log(B kappa^2) + d + 6)/Delta + d).
pub fn min_effective_n(
    l: u64,
    dim: usize,
    spectral_gap: f64,
    traj_bound: f64,
    kappa: f64,
) -> Result<u64> {
    if !(spectral_gap > 0.0 && spectral_gap <= 1.0) {
        return Err(Error::Domain(format!(
            "spectral gap {spectral_gap} must lie in (0,1]"
        )));
    }
    if !(kappa >= 1.0) || !(traj_bound > 0.0) {
        return Err(Error::Domain("kappa >= 1 and B > 0 required".into()));
    }
    let d = dim as f64;
    let weyl_floor = (16 * l * l) as f64;
    let decay_floor = -(d - 1.0) * spectral_gap.ln() / spectral_gap
        + ((traj_bound * kappa * kappa).ln() + d + 6.0) / spectral_gap
        + d;
    Ok(weyl_floor.max(decay_floor).ceil() as u64)
}

/// Singular-value truncation threshold
/// gamma(N) = (sqrt(4 d^2 R^2 log(4 d^2 / delta)) + 1) / sqrt(N).
pub fn svd_threshold(n: u64, dim: usize, noise_proxy: f64, delta: f64) -> f64 {
    let d = dim as f64;
    let log_term = (4.0 * d * d / delta).ln();
    ((4.0 * d * d * noise_proxy * noise_proxy * log_term).sqrt() + 1.0) / (n as f64).sqrt()
}

/// Scheduled arm (1-based) for the pull at global time t, valid for
/// N + 1 <= t <= N (2 d^2 + 1): the schedule walks blocks of 2d pulls per arm
/// and repeats every 2 d^2 steps.
pub fn arm_schedule(t: u64, n: u64, dim: usize) -> Result<usize> {
    let d = dim as u64;
    let last = n * (2 * d * d + 1);
    if t <= n || t > last {
        return Err(Error::Domain(format!(
            "time {t} outside the scheduled window [{}, {last}]",
            n + 1
        )));
    }
    let m0 = (t - n - 1) % (2 * d * d) + 1;
    Ok(m0.div_ceil(2 * d) as usize)
}

/// Rewards recorded over the scheduled window, keyed by global time.
#[derive(Clone, Debug)]
pub struct RewardBuffer {
    first_time: u64,
    rewards: Vec<f64>,
    arms: Vec<u16>,
}

impl RewardBuffer {
    pub fn new(first_time: u64, capacity: usize) -> Self {
        Self {
            first_time,
            rewards: Vec::with_capacity(capacity),
            arms: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, t: u64, arm: usize, reward: f64) -> Result<()> {
        let expected = self.first_time + self.rewards.len() as u64;
        if t != expected {
            return Err(Error::Data(format!(
                "reward at time {t} pushed out of order (expected {expected})"
            )));
        }
        self.rewards.push(reward);
        self.arms.push(arm as u16);
        Ok(())
    }

    pub fn get(&self, t: u64) -> Result<(usize, f64)> {
        if t < self.first_time {
            return Err(Error::Data(format!("time {t} precedes the buffer")));
        }
        let idx = (t - self.first_time) as usize;
        if idx >= self.rewards.len() {
            return Err(Error::Data(format!("no reward recorded at time {t}")));
        }
        Ok((self.arms[idx] as usize, self.rewards[idx]))
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

fn phase_table(l: u64) -> Vec<Complex64> {
    let m = 4 * l;
    (0..m)
        .map(|r| {
            let angle = 2.0 * std::f64::consts::PI * r as f64 / m as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Assembles A_0 and A_1 from the scheduled rewards. Entry (k, l) of A_s is
/// (1/N) sum_{j=0..N-1} r_{2(k-1)d + sd + 2d^2 j + N + l} exp(i 2 pi j^2/(4L)),
/// and every reward index is checked to have come from arm k.
pub fn build_a_matrices(
    buffer: &RewardBuffer,
    cfg: &EigenConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let d = cfg.dim as u64;
    let n = cfg.n;
    let phases = phase_table(cfg.l);
    let modulus = 4 * cfg.l;
    let mut out = Vec::with_capacity(2);
    for s in 0..2u64 {
        let mut entries = Vec::with_capacity(cfg.dim * cfg.dim);
        for k in 1..=d {
            for col in 1..=d {
                let base = 2 * (k - 1) * d + s * d + n + col;
                let mut acc = crate::numerics::KbnComplex::default();
                for j in 0..n {
                    let t = base + 2 * d * d * j;
                    let (arm, reward) = buffer.get(t)?;
                    if arm as u64 != k {
                        return Err(Error::Data(format!(
                            "schedule violation: time {t} used arm {arm}, entry ({k},{col}) needs {k}"
                        )));
                    }
                    let residue = ((j % modulus) * (j % modulus)) % modulus;
                    acc.add(phases[residue as usize] * reward);
                }
                entries.push(acc.value() / n as f64);
            }
        }
        out.push(ComplexMatrix::new(cfg.dim, cfg.dim, entries)?);
    }
    let a1 = out.pop().expect("two matrices");
    let a0 = out.pop().expect("two matrices");
    Ok((a0, a1))
}

/// Result of one estimation run.
#[derive(Clone, Debug, Serialize)]
pub struct EigenEstimate {
    /// The estimated map A_1 (A_0 truncated)^+.
    pub output_matrix: ComplexMatrix,
    /// Raw eigenvalues of the output matrix.
    pub spectrum: Vec<Complex64>,
    /// Truncation threshold gamma(N) used on A_0.
    pub gamma_used: f64,
    /// Pulls consumed: N + 2 N d^2.
    pub pulls_used: u64,
    /// The random unit arms the run drew.
    pub arms: Vec<Vec<f64>>,
}

impl EigenEstimate {
    /// Spectrum with magnitudes below gamma(N) reported as exact zeros, the
    /// reporting convention for tables.
    pub fn reported_spectrum(&self) -> Vec<Complex64> {
        self.spectrum
            .iter()
            .map(|&z| {
                if z.norm() < self.gamma_used {
                    Complex64::new(0.0, 0.0)
                } else {
                    z
                }
            })
            .collect()
    }
}

/// Runs the scheduled pull phase: N discarded pulls on the first basis arm
/// (the environment demands an arm every step; the rewards never enter the
/// estimate), then 2 N d^2 recorded pulls following the arm schedule. Global
/// time is the 1-based pull index of this run.
pub fn run_schedule(
    env: &mut dyn BanditEnvironment,
    cfg: &EigenConfig,
    arms: &[Vec<f64>],
) -> Result<RewardBuffer> {
    let d = cfg.dim as u64;
    if env.dim() != cfg.dim {
        return Err(Error::Dimension { expected: cfg.dim, got: env.dim() });
    }
    if arms.len() != cfg.dim {
        return Err(Error::Dimension { expected: cfg.dim, got: arms.len() });
    }
    let mut throwaway = vec![0.0; cfg.dim];
    throwaway[0] = 1.0;
    for _ in 0..cfg.n {
        env.pull(&throwaway)?;
    }
    let last = cfg.n * (2 * d * d + 1);
    let mut buffer = RewardBuffer::new(cfg.n + 1, (last - cfg.n) as usize);
    for t in (cfg.n + 1)..=last {
        let m = arm_schedule(t, cfg.n, cfg.dim)?;
        let reward = env.pull(&arms[m - 1])?;
        buffer.push(t, m, reward)?;
    }
    Ok(buffer)
}

/// Full estimation run with arms drawn uniformly from the unit sphere.
pub fn estimate_eigen_map(
    env: &mut dyn BanditEnvironment,
    cfg: &EigenConfig,
) -> Result<EigenEstimate> {
    let arms = random_unit_vectors(cfg.dim, cfg.dim, cfg.seed);
    estimate_eigen_map_with_arms(env, cfg, arms)
}

/// Estimation run with caller-chosen arms (fixed-instance studies).
pub fn estimate_eigen_map_with_arms(
    env: &mut dyn BanditEnvironment,
    cfg: &EigenConfig,
    arms: Vec<Vec<f64>>,
) -> Result<EigenEstimate> {
    cfg.validate()?;
    let buffer = run_schedule(env, cfg, &arms)?;
    let (a0, a1) = build_a_matrices(&buffer, cfg)?;
    let gamma = svd_threshold(cfg.n, cfg.dim, cfg.noise_proxy, cfg.delta);
    let a0_trunc = truncate_singular(&a0, gamma)?;
    let output = a1.mul(&pseudo_inverse(&a0_trunc)?)?;
    let spectrum = eigenvalues(&output)?;
    Ok(EigenEstimate {
        output_matrix: output,
        spectrum,
        gamma_used: gamma,
        pulls_used: cfg.total_pulls(),
        arms,
    })
}

/// Noiseless signal matrix by the structured route: X Q_N M^{sd+N-1} K with
/// X_k = x_k^T M^{2(k-1)d}, Q_N the phase-weighted average of M^{2 d^2 j},
/// and K = (M theta, ..., M^d theta). Equals the noiseless A_s exactly; used
/// as the independent oracle for the matrix-assembly path.
pub fn structured_signal_matrix(
    matrix: &[Vec<f64>],
    theta: &[f64],
    arms: &[Vec<f64>],
    cfg: &EigenConfig,
    s: u64,
) -> Result<ComplexMatrix> {
    let d = cfg.dim;
    let m = ComplexMatrix::from_real_rows(matrix)?;
    let phases = phase_table(cfg.l);
    let modulus = 4 * cfg.l;

    // Q_N by direct iteration over the stride-2d^2 powers
    let stride = m.matrix_power(2 * d as u64 * d as u64)?;
    let mut q_n = ComplexMatrix::zeros(d, d);
    let mut cur = ComplexMatrix::identity(d);
    for j in 0..cfg.n {
        let residue = ((j % modulus) * (j % modulus)) % modulus;
        q_n = q_n.add(&cur.scale(phases[residue as usize]))?;
        if j + 1 < cfg.n {
            cur = cur.mul(&stride)?;
        }
    }
    let q_n = q_n.scale(Complex64::new(1.0 / cfg.n as f64, 0.0));

    let x = arm_row_matrix(&m, arms, d)?;
    let k_mat = krylov_columns(&m, theta, d)?;
    let mid = m.matrix_power(s * d as u64 + cfg.n - 1)?;
    x.mul(&q_n)?.mul(&mid)?.mul(&k_mat)
}

fn arm_row_matrix(m: &ComplexMatrix, arms: &[Vec<f64>], d: usize) -> Result<ComplexMatrix> {
    let mut rows = Vec::with_capacity(d);
    for (k, arm) in arms.iter().enumerate() {
        let mk = m.matrix_power(2 * k as u64 * d as u64)?;
        let row: Vec<Complex64> = (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| Complex64::new(arm[i], 0.0) * mk[(i, j)])
                    .sum()
            })
            .collect();
        rows.push(row);
    }
    ComplexMatrix::from_rows(&rows)
}

fn krylov_columns(m: &ComplexMatrix, theta: &[f64], d: usize) -> Result<ComplexMatrix> {
    let theta_c: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut cols = Vec::with_capacity(d);
    let mut cur = m.mul_vec(&theta_c)?;
    for _ in 0..d {
        cols.push(cur.clone());
        cur = m.mul_vec(&cur)?;
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..d {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// The noiseless limit factors (B_0, B_1) built from the unit-circle part of
/// the system matrix.
fn oracle_b_matrices(
    matrix: &[Vec<f64>],
    theta: &[f64],
    arms: &[Vec<f64>],
    cfg: &EigenConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let d = cfg.dim;
    let m = ComplexMatrix::from_real_rows(matrix)?;
    let projectors = spectral_projectors(&m)?;
    let unit: Vec<(Complex64, ComplexMatrix)> = projectors
        .into_iter()
        .filter(|(lambda, _)| (lambda.norm() - 1.0).abs() <= 1e-8)
        .collect();
    if unit.is_empty() {
        return Err(Error::Numerical("system has no unit-circle eigenvalues".into()));
    }
    let mut m1 = ComplexMatrix::zeros(d, d);
    for (lambda, p) in &unit {
        m1 = m1.add(&p.scale(*lambda))?;
    }

    let phases = phase_table(cfg.l);
    let modulus = 4 * cfg.l;
    let x = arm_row_matrix(&m1, arms, d)?;
    let k_mat = krylov_columns(&m, theta, d)?;

    let mut b = Vec::with_capacity(2);
    for s in 0..2u64 {
        // Q_N(M_1) M_1^{sd+N-1} = sum over unit eigenvalues of
        // w_lambda(s) P_lambda with scalar phase-weighted averages w
        let mut mid = ComplexMatrix::zeros(d, d);
        for (lambda, p) in &unit {
            let stride_eig = lambda.powu(2 * d as u32 * d as u32);
            let mut w = Complex64::new(0.0, 0.0);
            let mut cur = Complex64::new(1.0, 0.0);
            for j in 0..cfg.n {
                let residue = ((j % modulus) * (j % modulus)) % modulus;
                w += cur * phases[residue as usize];
                cur *= stride_eig;
            }
            w /= cfg.n as f64;
            let tail = lambda.powu((s * d as u64 + cfg.n - 1) as u32);
            mid = mid.add(&p.scale(w * tail))?;
        }
        b.push(x.mul(&mid)?.mul(&k_mat)?);
    }
    let b1 = b.pop().expect("two matrices");
    let b0 = b.pop().expect("two matrices");
    Ok((b0, b1))
}

/// The limit object the estimator converges to for a diagonalizable system:
/// B_1 B_0^+ built from the unit-circle part of the system matrix. Its
/// nonzero eigenvalues are exactly the trajectory-visible unit eigenvalues of
/// M^d; the estimation error against it decays like 1/sqrt(N).
pub fn oracle_target_matrix(
    matrix: &[Vec<f64>],
    theta: &[f64],
    arms: &[Vec<f64>],
    cfg: &EigenConfig,
) -> Result<ComplexMatrix> {
    let (b0, b1) = oracle_b_matrices(matrix, theta, arms, cfg)?;
    b1.mul(&pseudo_inverse(&b0)?)
}

/// Instance conditioning: the smallest nonzero singular value of the limit
/// signal matrix B_0 for a given draw of state and arms. The truncation
/// threshold gamma(N) must sit safely below this value for the spectrum to
/// survive; how severely noise perturbs the matched eigenvalues scales with
/// its inverse. Used by the harness to diagnose and select instances.
pub fn instance_conditioning(
    matrix: &[Vec<f64>],
    theta: &[f64],
    arms: &[Vec<f64>],
    cfg: &EigenConfig,
) -> Result<f64> {
    let (b0, _) = oracle_b_matrices(matrix, theta, arms, cfg)?;
    let factors = crate::linalg::svd(&b0)?;
    let top = factors.singular_values.first().copied().unwrap_or(0.0);
    Ok(factors
        .singular_values
        .iter()
        .rev()
        .copied()
        .find(|s| *s > top * 1e-8)
        .unwrap_or(0.0))
}

/// Smallest positive m with m * a = 1 (mod l). Exists iff gcd(a, l) = 1.
pub fn modular_inverse_multiplier(a: u64, l: u64) -> Result<u64> {
    if l == 0 {
        return Err(Error::Config("modulus must be >= 1".into()));
    }
    if l == 1 {
        return Ok(1);
    }
    (1..=l)
        .find(|m| (m * a) % l == 1)
        .ok_or_else(|| Error::Config(format!("{a} has no inverse modulo {l}")))
}

/// Recovers the unit-circle eigenvalues of M itself (not M^d) by padding the
/// system with `r_pad` inert dimensions so that d + r_pad is coprime to L,
/// estimating in the padded dimension, and raising the output to the power m
/// with m (d + r_pad) = 1 (mod L). Returns the nonzero reported spectrum.
pub fn reconstruct_unit_eigenvalues(
    env: &LinearSystemEnv,
    cfg: &EigenConfig,
    r_pad: usize,
) -> Result<Vec<Complex64>> {
    let d = cfg.dim;
    let padded_dim = d + r_pad;
    let power = modular_inverse_multiplier(padded_dim as u64, cfg.l).map_err(|_| {
        Error::Config(format!(
            "d + r = {padded_dim} shares a factor with L = {}; pick a different padding",
            cfg.l
        ))
    })?;

    // embed: block matrix diag(M, 0) and zero-padded theta
    let mut matrix = vec![vec![0.0; padded_dim]; padded_dim];
    for (i, row) in env.matrix_rows().iter().enumerate() {
        matrix[i][..d].copy_from_slice(row);
    }
    let mut theta = vec![0.0; padded_dim];
    theta[..d].copy_from_slice(env.theta0());
    let noise = env.noise_model().restarted();
    let mut padded_env = LinearSystemEnv::new(matrix, theta, noise)?;

    let mut padded_cfg = cfg.clone();
    padded_cfg.dim = padded_dim;
    let estimate = estimate_eigen_map(&mut padded_env, &padded_cfg)?;

    let powered = estimate
        .output_matrix
        .matrix_power(power)?;
    let gamma = estimate.gamma_used;
    Ok(eigenvalues(&powered)?
        .into_iter()
        .filter(|z| z.norm() >= gamma)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{LinearSystemEnv, NoiseModel};
    use approx::assert_abs_diff_eq;

    fn permshrink_rows() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.7],
        ]
    }

    fn small_cfg(n: u64, l: u64, dim: usize, noise_proxy: f64, seed: u64) -> EigenConfig {
        EigenConfig {
            n,
            l,
            dim,
            delta: 0.2,
            noise_proxy,
            spectral_gap: 1.0,
            kappa: 1.0,
            traj_bound: 1.0,
            seed,
            allow_undersized: true,
        }
    }

    #[test]
    fn min_effective_n_examples() {
        // reference hyperparameters: the Weyl floor 16 * 24^2 dominates
        let n = min_effective_n(24, 5, 0.1, 1.0, 6.0).unwrap();
        assert_eq!(n, 9216);
        // second term sits near 243 for those values
        let decay = min_effective_n(1, 5, 0.1, 1.0, 6.0).unwrap();
        assert_eq!(decay, 243);

        // degenerate case forced by the Weyl floor
        assert_eq!(min_effective_n(1, 1, 1.0, 1.0, 1.0).unwrap(), 16);

        // monotonicity
        assert!(min_effective_n(30, 5, 0.1, 1.0, 6.0).unwrap() > n);
        assert!(min_effective_n(1, 5, 0.05, 1.0, 6.0).unwrap() > decay);
        assert!(min_effective_n(1, 5, 0.1, 1.0, 8.0).unwrap() >= decay);
        assert!(min_effective_n(1, 5, 0.1, 3.0, 6.0).unwrap() >= decay);

        assert!(min_effective_n(5, 3, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn svd_threshold_examples() {
        // R = 0 collapses to 1/sqrt(N)
        assert_abs_diff_eq!(svd_threshold(1, 5, 0.0, 0.2), 1.0, epsilon = 1e-15);
        // frozen from direct formula evaluation
        assert_abs_diff_eq!(
            svd_threshold(9216, 5, 0.3, 0.2),
            0.0883201532,
            epsilon = 1e-9
        );
        // quadrupling N halves gamma
        let g1 = svd_threshold(1000, 5, 0.3, 0.2);
        let g4 = svd_threshold(4000, 5, 0.3, 0.2);
        assert_abs_diff_eq!(g1 / g4, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn arm_schedule_examples() {
        let n = 100u64;
        let d = 5usize;
        assert_eq!(arm_schedule(n + 1, n, d).unwrap(), 1);
        assert_eq!(arm_schedule(n + 2 * 25, n, d).unwrap(), d);
        assert_eq!(arm_schedule(n + 2 * 25 + 1, n, d).unwrap(), 1);
        assert!(arm_schedule(n, n, d).is_err());
        assert!(arm_schedule(n * (2 * 25 + 1) + 1, n, d).is_err());
    }

    #[test]
    fn schedule_index_identity() {
        // the matrix-entry index always lands on its own arm's slot
        for (n, d) in [(16u64, 2usize), (48, 3)] {
            let dd = d as u64;
            for s in 0..2u64 {
                for k in 1..=dd {
                    for col in 1..=dd {
                        for j in [0, 1, n / 2, n - 1] {
                            let t = 2 * (k - 1) * dd + s * dd + 2 * dd * dd * j + n + col;
                            assert_eq!(arm_schedule(t, n, d).unwrap() as u64, k);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn index_coverage_is_a_bijection() {
        for (n, d) in [(8u64, 2usize), (12, 3), (4, 5)] {
            let dd = d as u64;
            let window = 2 * n * dd * dd;
            let mut seen = vec![false; window as usize];
            for s in 0..2u64 {
                for k in 1..=dd {
                    for col in 1..=dd {
                        for j in 0..n {
                            let t = 2 * (k - 1) * dd + s * dd + 2 * dd * dd * j + n + col;
                            let idx = (t - n - 1) as usize;
                            assert!(!seen[idx], "time {t} consumed twice");
                            seen[idx] = true;
                        }
                    }
                }
            }
            assert!(seen.iter().all(|&b| b), "window not fully covered");
        }
        // boundary values of the index map: (k, col, s, j) = (1, 1, 0, 0)
        // lands on the first scheduled time and (d, d, 1, N-1) on the last
        let (n, d) = (8u64, 3u64);
        let index = |k: u64, col: u64, s: u64, j: u64| 2 * (k - 1) * d + s * d + 2 * d * d * j + n + col;
        assert_eq!(index(1, 1, 0, 0), n + 1);
        assert_eq!(index(d, d, 1, n - 1), n * (2 * d * d + 1));
    }

    #[test]
    fn constant_system_gives_scalar_weyl_entries() {
        // M = I, theta = e1, all arms e1: every entry equals the scalar
        // phase average
        let d = 3usize;
        let identity: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let mut theta = vec![0.0; d];
        theta[0] = 1.0;
        let mut env =
            LinearSystemEnv::new(identity.clone(), theta.clone(), NoiseModel::none()).unwrap();
        let cfg = small_cfg(64, 4, d, 0.0, 1);
        let arms: Vec<Vec<f64>> = (0..d).map(|_| theta.clone()).collect();
        let buffer = run_schedule(&mut env, &cfg, &arms).unwrap();
        let (a0, a1) = build_a_matrices(&buffer, &cfg).unwrap();

        let phases = phase_table(cfg.l);
        let mut scalar = Complex64::new(0.0, 0.0);
        for j in 0..cfg.n {
            let residue = ((j % (4 * cfg.l)) * (j % (4 * cfg.l))) % (4 * cfg.l);
            scalar += phases[residue as usize];
        }
        scalar /= cfg.n as f64;
        for a in [&a0, &a1] {
            for i in 0..d {
                for j in 0..d {
                    assert!((a[(i, j)] - scalar).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn noiseless_assembly_matches_structured_route() {
        // 3-cycle at d = 3: pipeline A_s equals X Q_N M^{sd+N-1} K exactly
        let matrix = vec![
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let theta = vec![0.6, -0.64, 0.48];
        let arms = random_unit_vectors(3, 3, 5);
        let cfg = small_cfg(144, 3, 3, 0.0, 5);
        let mut env = LinearSystemEnv::new(matrix.clone(), theta.clone(), NoiseModel::none()).unwrap();
        let buffer = run_schedule(&mut env, &cfg, &arms).unwrap();
        let (a0, a1) = build_a_matrices(&buffer, &cfg).unwrap();
        for (s, a) in [(0u64, a0), (1u64, a1)] {
            let oracle = structured_signal_matrix(&matrix, &theta, &arms, &cfg, s).unwrap();
            let err = a.sub(&oracle).unwrap().frobenius_norm();
            assert!(err < 1e-8, "s={s}: {err}");
        }
    }

    #[test]
    fn identity_system_recovers_unit_eigenvalue() {
        // M = I, theta = e1, noiseless: the nonzero spectrum is exactly {1},
        // matching the trajectory-visible oracle
        let d = 3usize;
        let identity: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let mut theta = vec![0.0; d];
        theta[0] = 1.0;
        let mut env = LinearSystemEnv::new(identity.clone(), theta.clone(), NoiseModel::none()).unwrap();
        let cfg = small_cfg(64, 1, d, 0.0, 3);
        let est = estimate_eigen_map(&mut env, &cfg).unwrap();
        assert_eq!(est.pulls_used, cfg.total_pulls());

        let m = ComplexMatrix::from_real_rows(&identity).unwrap();
        let theta_c: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let oracle =
            crate::linalg::distinct_eigen_oracle(&m, &theta_c, d as u32, 1.0).unwrap();
        assert_eq!(oracle.len(), 1);
        assert!((oracle[0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);

        let reported = est.reported_spectrum();
        let nonzero: Vec<_> = reported.iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((*nonzero[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn undersized_config_is_rejected_without_flag() {
        let mut cfg = small_cfg(10, 24, 5, 0.3, 1);
        cfg.allow_undersized = false;
        match cfg.validate() {
            Err(Error::Config(_)) => {}
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn modular_inverse_examples() {
        // d = 5, L = 24: 5 * 5 = 25 = 1 (mod 24)
        assert_eq!(modular_inverse_multiplier(5, 24).unwrap(), 5);
        assert!(modular_inverse_multiplier(6, 24).is_err());
        assert_eq!(modular_inverse_multiplier(7, 1).unwrap(), 1);
    }

    #[test]
    fn reconstruction_on_identity_recovers_one() {
        let d = 2usize;
        let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let env = LinearSystemEnv::new(identity, vec![0.8, -0.6], NoiseModel::none()).unwrap();
        let cfg = small_cfg(64, 1, d, 0.0, 9);
        let eigs = reconstruct_unit_eigenvalues(&env, &cfg, 0).unwrap();
        assert!(!eigs.is_empty());
        for e in eigs {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn permshrink_noiseless_run_matches_oracle_target() {
        let matrix = permshrink_rows();
        let theta = crate::envs::random_unit_theta(5, 77);
        let arms = random_unit_vectors(5, 5, 77);
        let cfg = EigenConfig {
            n: 2048,
            l: 3,
            dim: 5,
            delta: 0.2,
            noise_proxy: 0.0,
            spectral_gap: 0.1,
            kappa: 6.0,
            traj_bound: 1.0,
            seed: 77,
            allow_undersized: true,
        };
        let mut env =
            LinearSystemEnv::new(matrix.clone(), theta.clone(), NoiseModel::none()).unwrap();
        let est = estimate_eigen_map_with_arms(&mut env, &cfg, arms.clone()).unwrap();
        let target = oracle_target_matrix(&matrix, &theta, &arms, &cfg).unwrap();
        let err = est
            .output_matrix
            .sub(&target)
            .unwrap()
            .spectral_norm()
            .unwrap();
        // noiseless and above the truncation floor: only roundoff remains
        assert!(err < 1e-8, "noiseless deviation {err}");
    }
}
