use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_mean::applications::{
    complete, cov_known_mean, cov_pair_diff, cov_soft_threshold, cov_ustat, tau_completion,
    theta_completion, CovMethod,
};
use robust_mean::estimators::{
    catoni_fixed_point, iterative_adaptive_mean, lepski_adaptive_mean, theta_for, truncated_mean,
    two_step_mean, CatoniOptions, LepskiConfig, VarianceBounds,
};
use robust_mean::harness::{run, write_results_to, SimConfig};
use robust_mean::{io, Error, InfluenceKind, Result};

#[derive(Parser)]
#[command(name = "robust-mean", version, about = "Robust estimators for heavy-tailed random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean of a sample of symmetric matrices (one flattened matrix per row).
    EstimateMean(MeanArgs),
    /// Estimate a covariance matrix from vectors (one per row).
    EstimateCov(CovArgs),
    /// Recover a low-rank matrix from noisy entries given as `row,col,y`.
    Complete(CompleteArgs),
    /// Run a Monte Carlo experiment described by a JSON config.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct Common {
    /// Influence function: psi1, psi2 or alpha=<a>.
    #[arg(long, default_value = "psi1")]
    psi: InfluenceKind,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeanMethod {
    Truncated,
    Lepski,
    FixedPoint,
    TwoStep,
    Iterative,
}

#[derive(Args)]
struct MeanArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "truncated")]
    method: MeanMethod,
    /// Truncation parameter; otherwise derived from --sigma and --t.
    #[arg(long)]
    theta: Option<f64>,
    /// Bound on ‖E Y²‖^{1/2} (or on ‖E (Y - EY)²‖^{1/2} for fixed-point).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    sigma_max: Option<f64>,
    #[arg(long)]
    sigma0_min: Option<f64>,
    #[arg(long)]
    sigma0_max: Option<f64>,
    /// Confidence parameter.
    #[arg(long, default_value_t = 10f64.ln())]
    t: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CovArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "known_mean")]
    method: CovMethod,
    #[arg(long)]
    theta: f64,
    /// Eigenvalue soft-thresholding level applied to the estimate.
    #[arg(long)]
    tau: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long)]
    obs: PathBuf,
    #[arg(long)]
    d1: usize,
    #[arg(long)]
    d2: usize,
    #[arg(long, default_value_t = 10f64.ln())]
    t: f64,
    /// Bound on both the largest entry of the target and the noise standard deviation.
    #[arg(long)]
    scale_bound: f64,
    /// Threshold, or `auto` for the rule derived from --t and --scale-bound.
    #[arg(long, default_value = "auto")]
    tau: String,
    /// Truncation parameter; defaults to the rule derived from --t and --scale-bound.
    #[arg(long)]
    theta: Option<f64>,
    /// Write the unthresholded robust estimate instead.
    #[arg(long)]
    raw: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-replication results CSV.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn write_output(out: &Option<PathBuf>, rows: &[Vec<f64>]) -> Result<()> {
    match out {
        Some(path) => io::write_rows_to(path, rows),
        None => io::write_rows(std::io::stdout().lock(), rows),
    }
}

fn required(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("--{flag} is required for this method")))
}

fn bounds(args: &MeanArgs, with_sigma0: bool) -> Result<VarianceBounds> {
    let b = VarianceBounds::new(required(args.sigma_min, "sigma-min")?, required(args.sigma_max, "sigma-max")?)?;
    if with_sigma0 {
        b.with_sigma0(required(args.sigma0_min, "sigma0-min")?, required(args.sigma0_max, "sigma0-max")?)
    } else {
        Ok(b)
    }
}

fn estimate_mean(args: &MeanArgs) -> Result<()> {
    let sample = io::read_matrix_sample(&args.input)?;
    if sample.is_empty() {
        return Err(Error::Parse("input holds no matrices".into()));
    }
    let kind = args.common.psi;
    let theta = || match args.theta {
        Some(th) => Ok(th),
        None => theta_for(required(args.sigma, "sigma")?, sample.len(), args.t),
    };
    let est = match args.method {
        MeanMethod::Truncated => truncated_mean(&sample, theta()?, kind)?,
        MeanMethod::FixedPoint => catoni_fixed_point(&sample, theta()?, kind, &CatoniOptions::default())?,
        MeanMethod::Lepski => lepski_adaptive_mean(&sample, &LepskiConfig::new(args.t), &bounds(args, false)?, kind)?,
        MeanMethod::TwoStep => two_step_mean(&sample, args.t, &bounds(args, true)?, kind)?,
        MeanMethod::Iterative => iterative_adaptive_mean(&sample, args.t, &bounds(args, true)?, kind)?,
    };
    log::info!("theta = {}, grid index = {:?}, iterations = {}", est.theta, est.grid_index, est.iterations);
    write_output(&args.common.out, &est.value.to_rows())
}

fn estimate_cov(args: &CovArgs) -> Result<()> {
    let z = io::read_vectors(&args.input)?;
    let kind = args.common.psi;
    let est = match args.method {
        CovMethod::KnownMean => cov_known_mean(&z, args.theta, kind)?,
        CovMethod::PairDiff => cov_pair_diff(&z, args.theta, kind)?,
        CovMethod::UStat => cov_ustat(&z, args.theta, kind)?,
    };
    let out = match args.tau {
        Some(tau) => cov_soft_threshold(&est, tau)?,
        None => est.sigma_hat,
    };
    write_output(&args.common.out, &out.to_rows())
}

fn complete_cmd(args: &CompleteArgs) -> Result<()> {
    let obs = io::read_observations(&args.obs)?;
    let n = obs.len();
    let theta = match args.theta {
        Some(th) => th,
        None => theta_completion(args.t, n, args.d1, args.d2, args.scale_bound)?,
    };
    let tau = if args.tau == "auto" {
        let tau = tau_completion(args.t, n, args.d1, args.d2, args.scale_bound)?;
        eprintln!(
            "tau = {tau} from 4 * scale_bound * sqrt((t + ln(2(d1 + d2))) / (n min(d1, d2))) with scale_bound = {}, t = {}, n = {n}, d1 = {}, d2 = {}",
            args.scale_bound, args.t, args.d1, args.d2
        );
        tau
    } else {
        args.tau.parse::<f64>().map_err(|_| Error::Config(format!("--tau expects a number or `auto`, got `{}`", args.tau)))?
    };
    let est = complete(&obs, args.d1, args.d2, theta, tau, args.common.psi)?;
    let out = if args.raw { est.raw } else { est.thresholded };
    write_output(&args.common.out, &out.to_rows())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = SimConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let result = run(&cfg)?;
    write_results_to(&args.out, &result)?;
    println!("{}", result.summary_json());
    if !result.failures.is_empty() {
        for f in &result.failures {
            eprintln!("replication {} ({}): {}", f.rep, f.estimator, f.message);
        }
        return Err(Error::Numeric(format!("{} estimator runs failed", result.failures.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::EstimateMean(a) => estimate_mean(a),
        Command::EstimateCov(a) => estimate_cov(a),
        Command::Complete(a) => complete_cmd(a),
        Command::Simulate(a) => simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
