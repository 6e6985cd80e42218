//! Thin command-line front end over the library. The runnable programs in
//! `examples/` are the richer tour; this binary exists for scripted runs.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use dynspec::eigen::{
    estimate_eigen_map, min_effective_n, reconstruct_unit_eigenvalues, EigenConfig,
};
use dynspec::envs::{
    BanditEnvironment, CircleEnv, LifeGameEnv, LinearSystemEnv, NoiseKind, NoiseModel,
    random_unit_theta,
};
use dynspec::error::Error;
use dynspec::harness::{
    emit_table, eigen_reference_slots, permshrink_matrix, run_experiment, score_eigen_run,
    ExperimentConfig, ExperimentKind, TableFormat,
};
use dynspec::period::{estimate_period, standard_basis, PeriodConfig};
use dynspec::properties::run_property_suite;

#[derive(Parser)]
#[command(name = "dynspec", version, about = "Hidden-structure estimation from bandit feedback")]
struct Cli {
    /// Output root; flags override, subdirectories per run (env: DYNSPEC_OUT)
    #[arg(long, global = true, env = "DYNSPEC_OUT")]
    out_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate an aliquot nearly period from noisy rewards
    Period(PeriodArgs),
    /// Estimate unit-circle eigenvalues of a hidden linear system
    Eigen(EigenArgs),
    /// Re-run a packaged experiment end to end
    Reproduce(ReproduceArgs),
    /// Run a verification suite
    Check(CheckArgs),
}

#[derive(Args)]
struct PeriodArgs {
    /// Environment: lifegame, circle, or linear
    #[arg(long)]
    env: String,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Accuracy target; defaults follow the chosen environment
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    lmax: Option<u64>,
    #[arg(long)]
    r_margin: Option<f64>,
    /// Hard cap on total pulls
    #[arg(long)]
    budget: Option<u64>,
    /// System matrix file for --env linear (whitespace rows)
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Seed for the hidden initial state of --env linear
    #[arg(long)]
    theta_seed: Option<u64>,
    /// Output directory for JSON estimate and CSV spectrum
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    /// System matrix file; defaults to the packaged permutation-shrink system
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Seed for the hidden initial state (defaults to --seed)
    #[arg(long)]
    theta_seed: Option<u64>,
    /// Nearly-period length entering the Weyl phase
    #[arg(long = "L", default_value_t = 3)]
    l: u64,
    /// Period used by the minimum-sample-size rule
    #[arg(long, default_value_t = 24)]
    sizing_period: u64,
    /// Effective-sample-size multipliers, comma separated
    #[arg(long, default_value = "1", value_delimiter = ',')]
    c_sim: Vec<u64>,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    /// Noise proxy R
    #[arg(long = "R", default_value_t = 0.3)]
    noise_proxy: f64,
    /// Noise kind: gaussian, uniform, or none
    #[arg(long, default_value = "uniform")]
    noise: String,
    /// Spectral gap Delta for the sample-size rule
    #[arg(long, default_value_t = 0.1)]
    delta_gap: f64,
    #[arg(long, default_value_t = 6.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    ball_radius: f64,
    /// Pad the system by r inert dimensions and recover eigenvalues of M
    /// itself (requires gcd(d + r, L) = 1)
    #[arg(long)]
    reconstruct_r: Option<usize>,
    /// Experimental: multiply the Weyl phase length by this factor
    #[arg(long, default_value_t = 1)]
    phase_multiplier: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// period-lifegame, period-circle, eigen-permshrink, or property-suite
    #[arg(long)]
    experiment: String,
    /// Seeds, comma separated (defaults to the packaged seed set)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Optional TOML config overlaying the packaged hyperparameters
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Only "properties" is packaged
    #[arg(long, default_value = "properties")]
    suite: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::Parse(_) | Error::Domain(_) => ExitCode::from(2),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> dynspec::Result<ExitCode> {
    match cli.command {
        Command::Period(args) => run_period(args, cli.out_root),
        Command::Eigen(args) => run_eigen(args, cli.out_root),
        Command::Reproduce(args) => run_reproduce(args, cli.out_root),
        Command::Check(args) => run_check(args),
    }
}

fn out_dir(
    explicit: Option<PathBuf>,
    root: Option<PathBuf>,
    leaf: &str,
) -> Option<PathBuf> {
    explicit.or_else(|| root.map(|r| r.join(leaf)))
}

fn run_period(args: PeriodArgs, root: Option<PathBuf>) -> dynspec::Result<ExitCode> {
    let mut env: Box<dyn BanditEnvironment> = match args.env.as_str() {
        "lifegame" => {
            let noise = NoiseModel::gaussian(0.3, args.seed)?;
            Box::new(LifeGameEnv::from_fixture_str(LifeGameEnv::fixture_text(), noise)?)
        }
        "circle" => {
            let noise = NoiseModel::uniform(0.3, args.seed)?;
            Box::new(CircleEnv::new(0.001, 5, std::f64::consts::PI, noise)?)
        }
        "linear" => {
            let path = args.matrix_file.as_ref().ok_or_else(|| {
                Error::Config("--env linear requires --matrix-file".into())
            })?;
            let matrix = LinearSystemEnv::parse_matrix(&std::fs::read_to_string(path)?)?;
            let d = matrix.len();
            let theta = random_unit_theta(d, args.theta_seed.unwrap_or(args.seed));
            let noise = NoiseModel::gaussian(0.3, args.seed)?;
            Box::new(LinearSystemEnv::new(matrix, theta, noise)?)
        }
        other => return Err(Error::Config(format!("unknown environment '{other}'"))),
    };

    // table defaults per environment, overridable by flags
    let (rho, delta, lmax, bound) = match args.env.as_str() {
        "lifegame" => (0.98, 0.2, 10, 5.0f64.sqrt()),
        "circle" => (0.3, 0.2, 8, 2.0),
        _ => (0.5, 0.2, 10, 1.0),
    };
    let cfg = PeriodConfig {
        rho: args.rho.unwrap_or(rho),
        delta: args.delta.unwrap_or(delta),
        l_max: args.lmax.unwrap_or(lmax),
        r_margin: args.r_margin.unwrap_or(0.0),
        dim: env.dim(),
        noise_proxy: 0.3,
        traj_bound: bound,
        pull_budget: args.budget,
    };
    let basis = standard_basis(env.dim());
    let estimate = estimate_period(env.as_mut(), &cfg, &basis)?;
    println!(
        "environment {}  seed {}  ->  nearly period {} ({} pulls, eps {:.6})",
        args.env, args.seed, estimate.beta, estimate.total_pulls, estimate.eps
    );

    if let Some(dir) = out_dir(args.out, root, "period") {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(
            dir.join("estimate.json"),
            serde_json::to_string_pretty(&estimate).map_err(|e| Error::Data(e.to_string()))?,
        )?;
        let mut w = csv::Writer::from_path(dir.join("spectrum.csv"))
            .map_err(|e| Error::Data(e.to_string()))?;
        w.write_record(["dimension", "offset", "alpha", "ell", "beta", "magnitude", "hit"])
            .map_err(|e| Error::Data(e.to_string()))?;
        for dim_log in &estimate.per_dimension_log {
            for p in dim_log {
                w.write_record([
                    p.dimension.to_string(),
                    p.offset.to_string(),
                    p.q.numerator().to_string(),
                    p.q.denominator().to_string(),
                    p.beta.to_string(),
                    format!("{:.8}", p.magnitude),
                    p.hit.to_string(),
                ])
                .map_err(|e| Error::Data(e.to_string()))?;
            }
        }
        w.flush()?;
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_eigen(args: EigenArgs, root: Option<PathBuf>) -> dynspec::Result<ExitCode> {
    let matrix = match &args.matrix_file {
        Some(path) => LinearSystemEnv::parse_matrix(&std::fs::read_to_string(path)?)?,
        None => permshrink_matrix(),
    };
    let dim = matrix.len();
    let noise_kind: NoiseKind = args.noise.parse()?;
    let theta = random_unit_theta(dim, args.theta_seed.unwrap_or(args.seed));
    let n_min = min_effective_n(args.sizing_period, dim, args.delta_gap, args.ball_radius, args.kappa)?;

    let slots = eigen_reference_slots(&matrix, &theta, dim)?;
    let mut runs = Vec::new();
    let mut rate_rows: Vec<(u64, f64)> = Vec::new();
    for &c in &args.c_sim {
        let cfg = EigenConfig {
            n: c * n_min,
            l: args.l * args.phase_multiplier,
            dim,
            delta: args.delta,
            noise_proxy: args.noise_proxy,
            spectral_gap: args.delta_gap,
            kappa: args.kappa,
            traj_bound: args.ball_radius,
            seed: args.seed,
            allow_undersized: false,
        };
        let noise = NoiseModel::new(noise_kind, args.noise_proxy, args.seed)?;
        let mut env = LinearSystemEnv::new(matrix.clone(), theta.clone(), noise)?;
        let estimate = estimate_eigen_map(&mut env, &cfg)?;
        let scored = score_eigen_run(&estimate, &slots, args.seed, c, cfg.n)?;
        println!(
            "c_sim {:>3}: N = {:>8}, gamma = {:.5}, max matched error = {:.5}",
            c, cfg.n, estimate.gamma_used, scored.max_visible_error
        );
        rate_rows.push((c, scored.max_visible_error));

        let reconstructed = match args.reconstruct_r {
            Some(r_pad) => {
                let base = LinearSystemEnv::new(
                    matrix.clone(),
                    theta.clone(),
                    NoiseModel::new(noise_kind, args.noise_proxy, args.seed)?,
                )?;
                Some(reconstruct_unit_eigenvalues(&base, &cfg, r_pad)?)
            }
            None => None,
        };
        runs.push(serde_json::json!({
            "c_sim": c,
            "config": cfg,
            "estimate": estimate,
            "scored": scored,
            "reconstructed_unit_eigenvalues": reconstructed,
        }));
    }

    if let Some(dir) = out_dir(args.out, root, "eigen") {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(
            dir.join("estimates.json"),
            serde_json::to_string_pretty(&runs).map_err(|e| Error::Data(e.to_string()))?,
        )?;
        let mut w = csv::Writer::from_path(dir.join("rate.csv"))
            .map_err(|e| Error::Data(e.to_string()))?;
        w.write_record(["c_sim", "eigenvalue_error"])
            .map_err(|e| Error::Data(e.to_string()))?;
        for (c, err) in &rate_rows {
            w.write_record([c.to_string(), format!("{err:.8}")])
                .map_err(|e| Error::Data(e.to_string()))?;
        }
        w.flush()?;
        println!("wrote {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_reproduce(args: ReproduceArgs, root: Option<PathBuf>) -> dynspec::Result<ExitCode> {
    let kind: ExperimentKind = args.experiment.parse()?;
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(path) = &args.config {
        cfg = cfg.with_file(path)?;
    }
    if let Some(seeds) = args.seeds {
        cfg.seeds = seeds;
    }
    cfg.out_dir = out_dir(args.out, root, &kind.to_string());
    let report = run_experiment(&cfg)?;
    match &report.results {
        dynspec::harness::ExperimentResults::Period(rows) => {
            for r in rows {
                println!(
                    "seed {}: beta = {}{}  [{}]",
                    r.seed,
                    r.beta,
                    r.anp_confirmed
                        .map(|ok| format!(", anp confirmed = {ok}"))
                        .unwrap_or_default(),
                    if r.passed { "pass" } else { "FAIL" }
                );
            }
        }
        dynspec::harness::ExperimentResults::Eigen(_) => {
            print!("{}", emit_table(&report, TableFormat::Markdown)?);
        }
        dynspec::harness::ExperimentResults::Properties(rows) => {
            for r in rows {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
        }
    }
    if let Some(dir) = &cfg.out_dir {
        println!("wrote {}", dir.display());
    }
    println!("experiment {}: {}", kind, if report.passed { "PASS" } else { "FAIL" });
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_check(args: CheckArgs) -> dynspec::Result<ExitCode> {
    if args.suite != "properties" {
        return Err(Error::Config(format!("unknown suite '{}'", args.suite)));
    }
    let results = run_property_suite();
    let mut ok = true;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        ok &= r.passed;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
