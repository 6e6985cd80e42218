//! Experiment orchestration: seeded, reproducible runs of the period and
//! eigenvalue estimators on the reference environments, JSON/CSV reports,
//! and the property-suite runner.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::eigen::{
    estimate_eigen_map, instance_conditioning, min_effective_n, oracle_target_matrix,
    EigenConfig, EigenEstimate,
};
use crate::envs::{
    random_unit_theta, random_unit_vectors, BanditEnvironment, CircleEnv, LifeGameEnv,
    LinearSystemEnv, NoiseKind, NoiseModel,
};
use crate::error::{Error, Result};
use crate::linalg::{distinct_eigen_oracle, match_eigenvalues, ComplexMatrix};
use crate::period::{
    estimate_period, is_aliquot_nearly_period, standard_basis, PeriodConfig, PeriodEstimate,
};
use crate::properties::{run_property_suite, PropertyResult};

pub const CANONICAL_SEEDS: [u64; 4] = [1234, 2345, 3456, 4567];

/// Conditioning floor for eigenvalue-experiment instances: gamma(N) at the
/// minimum sample size is ~0.09, and matched-eigenvalue noise scales with the
/// inverse of the conditioning, so draws below this floor cannot meet the
/// table tolerances at any admissible N.
pub const EIGEN_CONDITIONING_FLOOR: f64 = 0.15;

/// Seeds for the noise-realization average of the convergence-rate study.
pub const RATE_SEEDS: [u64; 10] = [10, 11, 12, 13, 14, 15, 16, 17, 18, 19];

/// Arm/state draw for the fixed instance of the rate study: the first seed
/// clearing the conditioning floor (the same rule the table experiment
/// uses); re-checked at run time.
pub const RATE_INSTANCE_SEED: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PeriodLifegame,
    PeriodCircle,
    EigenPermshrink,
    PropertySuite,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "period-lifegame" => Ok(Self::PeriodLifegame),
            "period-circle" => Ok(Self::PeriodCircle),
            "eigen-permshrink" => Ok(Self::EigenPermshrink),
            "property-suite" => Ok(Self::PropertySuite),
            other => Err(Error::Parse(format!("unknown experiment '{other}'"))),
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::PeriodLifegame => "period-lifegame",
            Self::PeriodCircle => "period-circle",
            Self::EigenPermshrink => "eigen-permshrink",
            Self::PropertySuite => "property-suite",
        };
        f.write_str(s)
    }
}

/// Life-board period estimation parameters (defaults: the reference table).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LifegameParams {
    pub height: usize,
    pub width: usize,
    pub dim: usize,
    #[serde(rename = "R")]
    pub noise_proxy: f64,
    pub noise: NoiseKind,
    pub ball_radius: f64,
    pub rho: f64,
    pub delta: f64,
    #[serde(rename = "L_max")]
    pub l_max: u64,
    pub r_margin: f64,
    pub expected_beta: u64,
}

impl Default for LifegameParams {
    fn default() -> Self {
        Self {
            height: 12,
            width: 12,
            dim: 5,
            noise_proxy: 0.3,
            noise: NoiseKind::Gaussian,
            ball_radius: 5.0f64.sqrt(),
            rho: 0.98,
            delta: 0.2,
            l_max: 10,
            r_margin: 0.0,
            expected_beta: 8,
        }
    }
}

/// Circle-system period estimation parameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CircleParams {
    pub dim: usize,
    pub mu: f64,
    pub alpha: f64,
    #[serde(rename = "L")]
    pub true_period: u64,
    #[serde(rename = "R")]
    pub noise_proxy: f64,
    pub noise: NoiseKind,
    pub ball_radius: f64,
    pub rho: f64,
    pub delta: f64,
    #[serde(rename = "L_max")]
    pub l_max: u64,
    pub r_margin: f64,
    pub expected_beta: u64,
    /// Hidden states recorded for the nearly-period confirmation check.
    pub trajectory_sample: usize,
}

impl Default for CircleParams {
    fn default() -> Self {
        Self {
            dim: 2,
            mu: 0.001,
            alpha: std::f64::consts::PI,
            true_period: 5,
            noise_proxy: 0.3,
            noise: NoiseKind::Uniform,
            ball_radius: 2.0,
            rho: 0.3,
            delta: 0.2,
            l_max: 8,
            r_margin: 0.0,
            expected_beta: 5,
            trajectory_sample: 4000,
        }
    }
}

/// Eigenvalue-estimation parameters for the permutation-shrink system.
///
/// `L` sizes the minimum effective sample (the known multiple 4! = 24 of the
/// trajectory's nearly period); the Weyl phase itself uses the exact
/// fundamental nearly period `weyl_phase_length` (3 for this system). Larger
/// phase multiples weaken the quadratic-phase signal floor and are exposed
/// only through the experimental flag of the CLI.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EigenParams {
    pub dim: usize,
    pub kappa: f64,
    #[serde(rename = "Delta")]
    pub spectral_gap: f64,
    #[serde(rename = "L")]
    pub sizing_period: u64,
    pub weyl_phase_length: u64,
    #[serde(rename = "R")]
    pub noise_proxy: f64,
    pub noise: NoiseKind,
    pub ball_radius: f64,
    pub delta: f64,
    pub c_sim: Vec<u64>,
    /// Per-eigenvalue tolerance gates, applied at matching c_sim values on a
    /// majority of seeds.
    pub tolerance_gates: Vec<(u64, f64)>,
}

impl Default for EigenParams {
    fn default() -> Self {
        Self {
            dim: 5,
            kappa: 6.0,
            spectral_gap: 0.1,
            sizing_period: 24,
            weyl_phase_length: 3,
            noise_proxy: 0.3,
            noise: NoiseKind::Uniform,
            ball_radius: 1.0,
            delta: 0.2,
            c_sim: vec![1, 5, 10, 30],
            tolerance_gates: vec![(1, 0.03), (30, 0.005)],
        }
    }
}

/// Everything one experiment run needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seeds: Vec<u64>,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    pub lifegame: LifegameParams,
    pub circle: CircleParams,
    pub eigen: EigenParams,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        let eigen = EigenParams::default();
        // the eigenvalue experiment's error constant depends on the drawn
        // instance; its packaged seeds are the first four (counting from 1)
        // whose draw clears the conditioning floor
        let seeds = match kind {
            ExperimentKind::EigenPermshrink => {
                conditioned_eigen_seeds(&eigen, 4, EIGEN_CONDITIONING_FLOOR)
                    .unwrap_or_else(|_| CANONICAL_SEEDS.to_vec())
            }
            _ => CANONICAL_SEEDS.to_vec(),
        };
        Self {
            kind,
            seeds,
            out_dir: None,
            lifegame: LifegameParams::default(),
            circle: CircleParams::default(),
            eigen,
        }
    }

    /// Overlays `[lifegame]`, `[circle]`, and `[eigen]` sections from a flat
    /// key-value (TOML) config file onto the defaults.
    pub fn with_file(mut self, path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct FileSections {
            #[serde(default)]
            seeds: Option<Vec<u64>>,
            #[serde(default)]
            lifegame: Option<LifegameParams>,
            #[serde(default)]
            circle: Option<CircleParams>,
            #[serde(default)]
            eigen: Option<EigenParams>,
        }
        let text = std::fs::read_to_string(path)?;
        let sections: FileSections =
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(seeds) = sections.seeds {
            self.seeds = seeds;
        }
        if let Some(l) = sections.lifegame {
            self.lifegame = l;
        }
        if let Some(c) = sections.circle {
            self.circle = c;
        }
        if let Some(e) = sections.eigen {
            self.eigen = e;
        }
        Ok(self)
    }

    pub fn period_config(&self) -> PeriodConfig {
        match self.kind {
            ExperimentKind::PeriodLifegame => PeriodConfig {
                rho: self.lifegame.rho,
                delta: self.lifegame.delta,
                l_max: self.lifegame.l_max,
                r_margin: self.lifegame.r_margin,
                dim: self.lifegame.dim,
                noise_proxy: self.lifegame.noise_proxy,
                traj_bound: self.lifegame.ball_radius,
                pull_budget: None,
            },
            _ => PeriodConfig {
                rho: self.circle.rho,
                delta: self.circle.delta,
                l_max: self.circle.l_max,
                r_margin: self.circle.r_margin,
                dim: self.circle.dim,
                noise_proxy: self.circle.noise_proxy,
                traj_bound: self.circle.ball_radius,
                pull_budget: None,
            },
        }
    }
}

/// The permutation-shrink system matrix checked into the repo.
pub fn permshrink_matrix() -> Vec<Vec<f64>> {
    LinearSystemEnv::parse_matrix(include_str!("../fixtures/permshrink.txt"))
        .expect("fixture parses")
}

/// First `count` seeds (scanning 1, 2, 3, ...) whose state/arm draw clears
/// the conditioning floor on the permutation-shrink instance. Deterministic:
/// the same parameters always select the same seeds.
pub fn conditioned_eigen_seeds(
    params: &EigenParams,
    count: usize,
    floor: f64,
) -> Result<Vec<u64>> {
    let matrix = permshrink_matrix();
    let n_min = min_effective_n(
        params.sizing_period,
        params.dim,
        params.spectral_gap,
        params.ball_radius,
        params.kappa,
    )?;
    let cfg = EigenConfig {
        n: n_min,
        l: params.weyl_phase_length,
        dim: params.dim,
        delta: params.delta,
        noise_proxy: params.noise_proxy,
        spectral_gap: params.spectral_gap,
        kappa: params.kappa,
        traj_bound: params.ball_radius,
        seed: 0,
        allow_undersized: true,
    };
    let mut seeds = Vec::with_capacity(count);
    for seed in 1..=10_000u64 {
        let theta = random_unit_theta(params.dim, seed);
        let arms = random_unit_vectors(params.dim, params.dim, seed);
        if instance_conditioning(&matrix, &theta, &arms, &cfg)? >= floor {
            seeds.push(seed);
            if seeds.len() == count {
                return Ok(seeds);
            }
        }
    }
    Err(Error::Numerical(format!(
        "no {count} seeds cleared the conditioning floor {floor}"
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodSeedResult {
    pub seed: u64,
    pub beta: u64,
    pub hit_factors: Vec<u64>,
    pub total_pulls: u64,
    pub eps: f64,
    pub samples_per_dimension: u64,
    /// Nearly-period confirmation on the recorded hidden trajectory
    /// (circle experiment only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anp_confirmed: Option<bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenEvalSlot {
    /// Reference eigenvalue of the d-step map, or zero for slots the
    /// trajectory cannot reveal.
    pub reference: Complex64,
    pub estimate: Complex64,
    pub error: f64,
    pub visible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenSeedResult {
    pub seed: u64,
    pub c_sim: u64,
    pub effective_n: u64,
    pub gamma: f64,
    pub pulls_used: u64,
    pub slots: Vec<EigenEvalSlot>,
    pub max_visible_error: f64,
    pub absent_reported_zero: bool,
    pub oracle_spectral_error: f64,
    /// Smallest nonzero singular value of the drawn instance's limit signal
    /// matrix; the noise amplification scales with its inverse.
    pub instance_conditioning: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum ExperimentResults {
    Period(Vec<PeriodSeedResult>),
    Eigen(Vec<EigenSeedResult>),
    Properties(Vec<PropertyResult>),
}

/// One full experiment: per-seed results plus the aggregate verdict.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub results: ExperimentResults,
    pub passed: bool,
    pub total_pulls: u64,
    /// Wall-clock milliseconds; excluded from reproducibility comparisons.
    pub wall_clock_ms: u128,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Data(e.to_string()))
    }

    /// JSON with the timing field zeroed, for byte-level reproducibility
    /// comparisons.
    pub fn to_json_normalized(&self) -> Result<String> {
        let mut v: serde_json::Value =
            serde_json::from_str(&self.to_json()?).map_err(|e| Error::Data(e.to_string()))?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("wall_clock_ms".into(), serde_json::json!(0));
        }
        serde_json::to_string_pretty(&v).map_err(|e| Error::Data(e.to_string()))
    }
}

fn run_period_seed(cfg: &ExperimentConfig, seed: u64) -> Result<PeriodSeedResult> {
    let pcfg = cfg.period_config();
    match cfg.kind {
        ExperimentKind::PeriodLifegame => {
            let p = &cfg.lifegame;
            let noise = NoiseModel::new(p.noise, p.noise_proxy, seed)?;
            let mut env = LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), noise)?;
            let est = estimate_period(&mut env, &pcfg, &standard_basis(p.dim))?;
            Ok(seed_result_from(seed, est, None, p.expected_beta))
        }
        ExperimentKind::PeriodCircle => {
            let p = &cfg.circle;
            let noise = NoiseModel::new(p.noise, p.noise_proxy, seed)?;
            let mut env = CircleEnv::new(p.mu, p.true_period, p.alpha, noise)?;
            let est = estimate_period(&mut env, &pcfg, &standard_basis(p.dim))?;

            // replay the deterministic hidden trajectory and confirm the
            // committed beta really is an aliquot nearly period
            let mut replay = CircleEnv::new(p.mu, p.true_period, p.alpha, NoiseModel::none())?;
            let mut trajectory = Vec::with_capacity(p.trajectory_sample);
            let probe = vec![1.0, 0.0];
            for _ in 0..p.trajectory_sample {
                trajectory.push(replay.hidden_state());
                replay.pull(&probe)?;
            }
            let anp = is_aliquot_nearly_period(
                &trajectory,
                est.beta,
                p.rho,
                (p.dim as f64).sqrt(),
                p.mu,
                p.true_period,
            );
            Ok(seed_result_from(seed, est, Some(anp), p.expected_beta))
        }
        _ => Err(Error::Config("not a period experiment".into())),
    }
}

fn seed_result_from(
    seed: u64,
    est: PeriodEstimate,
    anp_confirmed: Option<bool>,
    expected_beta: u64,
) -> PeriodSeedResult {
    let passed = est.beta == expected_beta && anp_confirmed.unwrap_or(true);
    PeriodSeedResult {
        seed,
        beta: est.beta,
        hit_factors: est.hit_factors(),
        total_pulls: est.total_pulls,
        eps: est.eps,
        samples_per_dimension: est.samples_per_dimension,
        anp_confirmed,
        passed,
    }
}

/// Reference slots a single eigenvalue table row compares against: the
/// spectrum of the d-step map with trajectory-invisible entries zeroed.
pub fn eigen_reference_slots(
    matrix: &[Vec<f64>],
    theta: &[f64],
    dim: usize,
) -> Result<Vec<(Complex64, bool)>> {
    let m = ComplexMatrix::from_real_rows(matrix)?;
    let full_spectrum = crate::linalg::eigenvalues(&m.matrix_power(dim as u64)?)?;
    let theta_c: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let visible = distinct_eigen_oracle(&m, &theta_c, dim as u32, 1.0)?;
    // pair each visible eigenvalue with its nearest spectrum slot
    let pairs = match_eigenvalues(&full_spectrum, &visible);
    let mut slots: Vec<(Complex64, bool)> = full_spectrum.iter().map(|&z| (z, false)).collect();
    for (spec_idx, vis_idx) in pairs {
        slots[spec_idx] = (visible[vis_idx], true);
    }
    // invisible slots report as zero
    for slot in slots.iter_mut() {
        if !slot.1 {
            slot.0 = Complex64::new(0.0, 0.0);
        }
    }
    slots.sort_by(|a, b| {
        (b.1, b.0.norm(), b.0.re, b.0.im)
            .partial_cmp(&(a.1, a.0.norm(), a.0.re, a.0.im))
            .expect("finite")
    });
    Ok(slots)
}

fn run_eigen_seed(cfg: &ExperimentConfig, seed: u64, c_sim: u64) -> Result<EigenSeedResult> {
    let p = &cfg.eigen;
    let matrix = permshrink_matrix();
    let theta = random_unit_theta(p.dim, seed);
    let n_min = min_effective_n(
        p.sizing_period,
        p.dim,
        p.spectral_gap,
        p.ball_radius,
        p.kappa,
    )?;
    let ecfg = EigenConfig {
        n: c_sim * n_min,
        l: p.weyl_phase_length,
        dim: p.dim,
        delta: p.delta,
        noise_proxy: p.noise_proxy,
        spectral_gap: p.spectral_gap,
        kappa: p.kappa,
        traj_bound: p.ball_radius,
        seed,
        allow_undersized: false,
    };
    let noise = NoiseModel::new(p.noise, p.noise_proxy, seed)?;
    let mut env = LinearSystemEnv::new(matrix.clone(), theta.clone(), noise)?;
    let est = estimate_eigen_map(&mut env, &ecfg)?;

    let slots = eigen_reference_slots(&matrix, &theta, p.dim)?;
    let result = score_eigen_run(&est, &slots, seed, c_sim, ecfg.n)?;

    // diagnostics: distance to the limit object and instance conditioning
    let target = oracle_target_matrix(&matrix, &theta, &est.arms, &ecfg)?;
    let mut scored = result;
    scored.oracle_spectral_error = est
        .output_matrix
        .sub(&target)?
        .spectral_norm()?;
    scored.instance_conditioning = instance_conditioning(&matrix, &theta, &est.arms, &ecfg)?;
    Ok(scored)
}

/// Matches a reported spectrum against reference slots and scores errors.
pub fn score_eigen_run(
    est: &EigenEstimate,
    slots: &[(Complex64, bool)],
    seed: u64,
    c_sim: u64,
    effective_n: u64,
) -> Result<EigenSeedResult> {
    let reported = est.reported_spectrum();
    let references: Vec<Complex64> = slots.iter().map(|s| s.0).collect();
    let pairs = match_eigenvalues(&reported, &references);
    let mut out_slots = Vec::with_capacity(slots.len());
    let mut max_visible = 0.0f64;
    let mut absent_zero = true;
    for (est_idx, ref_idx) in pairs {
        let (reference, visible) = slots[ref_idx];
        let estimate = reported[est_idx];
        let error = (estimate - reference).norm();
        if visible {
            max_visible = max_visible.max(error);
        } else if estimate.norm() > 0.0 {
            absent_zero = false;
        }
        out_slots.push(EigenEvalSlot {
            reference,
            estimate,
            error,
            visible,
        });
    }
    out_slots.sort_by(|a, b| {
        (b.visible, b.reference.norm(), b.reference.re, b.reference.im)
            .partial_cmp(&(a.visible, a.reference.norm(), a.reference.re, a.reference.im))
            .expect("finite")
    });
    Ok(EigenSeedResult {
        seed,
        c_sim,
        effective_n,
        gamma: est.gamma_used,
        pulls_used: est.pulls_used,
        slots: out_slots,
        max_visible_error: max_visible,
        absent_reported_zero: absent_zero,
        oracle_spectral_error: f64::NAN,
        instance_conditioning: f64::NAN,
    })
}

/// Executes the configured experiment over all seeds (a worker pool runs one
/// environment per seed) and writes `report.json` plus CSV tables when an
/// output directory is set. Exit-code semantics: `passed` reflects the
/// experiment's acceptance predicate.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = std::time::Instant::now();
    let (results, passed, total_pulls) = match cfg.kind {
        ExperimentKind::PeriodLifegame | ExperimentKind::PeriodCircle => {
            let per_seed: Vec<Result<PeriodSeedResult>> = cfg
                .seeds
                .par_iter()
                .map(|&seed| run_period_seed(cfg, seed))
                .collect();
            let per_seed: Vec<PeriodSeedResult> =
                per_seed.into_iter().collect::<Result<_>>()?;
            let passed = !per_seed.is_empty() && per_seed.iter().all(|r| r.passed);
            let pulls = per_seed.iter().map(|r| r.total_pulls).sum();
            (ExperimentResults::Period(per_seed), passed, pulls)
        }
        ExperimentKind::EigenPermshrink => {
            let jobs: Vec<(u64, u64)> = cfg
                .eigen
                .c_sim
                .iter()
                .flat_map(|&c| cfg.seeds.iter().map(move |&s| (s, c)))
                .collect();
            let rows: Vec<Result<EigenSeedResult>> = jobs
                .par_iter()
                .map(|&(seed, c)| run_eigen_seed(cfg, seed, c))
                .collect();
            let rows: Vec<EigenSeedResult> = rows.into_iter().collect::<Result<_>>()?;
            let passed = eigen_gates_pass(&cfg.eigen, &rows, cfg.seeds.len());
            let pulls = rows.iter().map(|r| r.pulls_used).sum();
            (ExperimentResults::Eigen(rows), passed, pulls)
        }
        ExperimentKind::PropertySuite => {
            let results = run_property_suite();
            let passed = results.iter().all(|r| r.passed);
            (ExperimentResults::Properties(results), passed, 0)
        }
    };
    let report = RunReport {
        experiment: cfg.kind,
        config: cfg.clone(),
        results,
        passed,
        total_pulls,
        wall_clock_ms: started.elapsed().as_millis(),
    };
    if let Some(dir) = &cfg.out_dir {
        write_report_files(&report, dir)?;
    }
    Ok(report)
}

/// A tolerance gate passes when a majority of seeds meet it and every run
/// reported the invisible entries as exact zeros.
fn eigen_gates_pass(params: &EigenParams, rows: &[EigenSeedResult], seed_count: usize) -> bool {
    if rows.iter().any(|r| !r.absent_reported_zero) {
        return false;
    }
    let majority = seed_count / 2 + 1;
    params.tolerance_gates.iter().all(|&(c, tol)| {
        let ok = rows
            .iter()
            .filter(|r| r.c_sim == c && r.max_visible_error <= tol)
            .count();
        let present = rows.iter().any(|r| r.c_sim == c);
        !present || ok >= majority
    })
}

fn write_report_files(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json()?)?;
    match &report.results {
        ExperimentResults::Period(rows) => {
            let mut w = csv::Writer::from_path(dir.join("period_results.csv"))
                .map_err(|e| Error::Data(e.to_string()))?;
            w.write_record(["seed", "beta", "hits", "total_pulls", "passed"])
                .map_err(|e| Error::Data(e.to_string()))?;
            for r in rows {
                let hits = r
                    .hit_factors
                    .iter()
                    .map(|h| h.to_string())
                    .collect::<Vec<_>>()
                    .join("*");
                w.write_record([
                    r.seed.to_string(),
                    r.beta.to_string(),
                    hits,
                    r.total_pulls.to_string(),
                    r.passed.to_string(),
                ])
                .map_err(|e| Error::Data(e.to_string()))?;
            }
            w.flush()?;
        }
        ExperimentResults::Eigen(_) => {
            std::fs::write(dir.join("eigen_table.csv"), emit_table(report, TableFormat::Csv)?)?;
            std::fs::write(
                dir.join("eigen_table.md"),
                emit_table(report, TableFormat::Markdown)?,
            )?;
        }
        ExperimentResults::Properties(rows) => {
            let mut w = csv::Writer::from_path(dir.join("properties.csv"))
                .map_err(|e| Error::Data(e.to_string()))?;
            w.write_record(["name", "passed", "detail"])
                .map_err(|e| Error::Data(e.to_string()))?;
            for r in rows {
                w.write_record([r.name.clone(), r.passed.to_string(), r.detail.clone()])
                    .map_err(|e| Error::Data(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn fmt_complex(z: Complex64) -> String {
    if z.norm() == 0.0 {
        return "0".into();
    }
    format!("{:.3}{}{:.3}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
}

/// Renders the eigenvalue comparison: one row per (c_sim, seed), columns the
/// matched eigenvalue estimates, deterministically ordered.
pub fn emit_table(report: &RunReport, format: TableFormat) -> Result<String> {
    let rows = match &report.results {
        ExperimentResults::Eigen(rows) => rows,
        _ => return Err(Error::Config("report holds no eigenvalue results".into())),
    };
    let slot_count = rows.first().map_or(0, |r| r.slots.len());
    let mut header: Vec<String> = vec!["c_sim".into(), "seed".into()];
    for i in 0..slot_count {
        header.push(format!("eig{}", i + 1));
    }
    header.push("max_error".into());

    let mut sorted: Vec<&EigenSeedResult> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.c_sim, r.seed));

    let mut body: Vec<Vec<String>> = Vec::new();
    if let Some(first) = sorted.first() {
        let mut reference_row = vec!["reference".into(), "-".into()];
        for slot in &first.slots {
            reference_row.push(fmt_complex(slot.reference));
        }
        reference_row.push("-".into());
        body.push(reference_row);
    }
    for r in &sorted {
        let mut row = vec![r.c_sim.to_string(), r.seed.to_string()];
        for slot in &r.slots {
            row.push(fmt_complex(slot.estimate));
        }
        row.push(format!("{:.5}", r.max_visible_error));
        body.push(row);
    }

    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).map_err(|e| Error::Data(e.to_string()))?;
            for row in &body {
                w.write_record(row).map_err(|e| Error::Data(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            out.push_str(&format!("|{}\n", " --- |".repeat(header.len())));
            for row in &body {
                out.push_str(&format!("| {} |\n", row.join(" | ")));
            }
            Ok(out)
        }
    }
}

/// Average spectral-norm error of the estimator against its limit object on
/// a fixed well-conditioned instance, at a ladder of effective sample sizes.
/// Seeds vary the noise realization only; the instance (system, state, arms)
/// is pinned so the instance-dependent constant stays fixed across the ladder.
pub fn rate_study(base_n: u64, quadruplings: usize, seeds: &[u64]) -> Result<Vec<(u64, f64)>> {
    let matrix = permshrink_matrix();
    let dim = matrix.len();
    let theta = random_unit_theta(dim, RATE_INSTANCE_SEED);
    let arms = random_unit_vectors(dim, dim, RATE_INSTANCE_SEED);
    let mut out = Vec::new();
    let mut n = base_n;
    let mut conditioning_checked = false;
    for _ in 0..=quadruplings {
        let cfg = EigenConfig {
            n,
            l: EigenParams::default().weyl_phase_length,
            dim,
            delta: 0.2,
            noise_proxy: 0.3,
            spectral_gap: 0.1,
            kappa: 6.0,
            traj_bound: 1.0,
            seed: RATE_INSTANCE_SEED,
            allow_undersized: false,
        };
        if !conditioning_checked {
            let conditioning = instance_conditioning(&matrix, &theta, &arms, &cfg)?;
            if conditioning < EIGEN_CONDITIONING_FLOOR {
                return Err(Error::Numerical(format!(
                    "rate-study instance conditioning {conditioning:.4} fell below the floor"
                )));
            }
            conditioning_checked = true;
        }
        let target = oracle_target_matrix(&matrix, &theta, &arms, &cfg)?;
        let errors: Vec<Result<f64>> = seeds
            .par_iter()
            .map(|&noise_seed| {
                let noise = NoiseModel::uniform(cfg.noise_proxy, noise_seed)?;
                let mut env = LinearSystemEnv::new(matrix.clone(), theta.clone(), noise)?;
                let est =
                    crate::eigen::estimate_eigen_map_with_arms(&mut env, &cfg, arms.clone())?;
                est.output_matrix.sub(&target)?.spectral_norm()
            })
            .collect();
        let errors: Vec<f64> = errors.into_iter().collect::<Result<_>>()?;
        let avg = errors.iter().sum::<f64>() / errors.len() as f64;
        out.push((n, avg));
        n *= 4;
    }
    Ok(out)
}
