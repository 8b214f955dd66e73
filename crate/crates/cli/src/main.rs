use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periodic_loss::estimate::{FitMethod, Fold};
use periodic_loss::par::{set_threads, Exec};
use periodic_loss_cli::commands::{
    cmd_bounds, cmd_fit, cmd_generate, cmd_limit, cmd_simulate, cmd_smoothing, FitArgs,
    GenerateArgs, SmoothingArgs,
};
use periodic_loss_cli::{CliError, StudyConfig};

#[derive(Parser)]
#[command(
    name = "periodic-loss",
    version,
    about = "Long-run loss of periodically used cells under random outages"
)]
struct Cli {
    /// TOML study file; defaults reproduce the single-cell example.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Worker threads for the data-parallel paths.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form limit, availability and repair share.
    Limit,
    /// Monte Carlo convergence study (cell or network mode).
    Simulate,
    /// Fourier contraction constants and covariance/variance bounds.
    Bounds,
    /// Smoothing of a wrapped exponential by Gaussian convolutions.
    Smoothing(SmoothingCmd),
    /// Fit up-time and repair laws and the usage profile from CSV data.
    Fit(FitCmd),
    /// Write synthetic ticket and KPI files.
    Generate(GenerateCmd),
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Args)]
struct SmoothingCmd {
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    #[arg(long, default_value_t = periodic_loss::stochastic::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 10.0)]
    rate: f64,
    /// Numbers of Gaussian summands to report.
    #[arg(long, value_delimiter = ',', default_value = "0,1,10")]
    gaussians: Vec<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pooled,
    UpTime,
}

#[derive(Clone, Copy, ValueEnum)]
enum FoldArg {
    Weekly,
    Daily,
}

#[derive(Args)]
struct FitCmd {
    #[arg(long)]
    tickets: PathBuf,
    #[arg(long)]
    kpi: Option<PathBuf>,
    /// Number of cells in the network the tickets come from.
    #[arg(long)]
    cells: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::UpTime)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = FoldArg::Weekly)]
    fold: FoldArg,
    /// Rolling window in hours; omit to skip the rolling series.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 24.0)]
    step: f64,
    #[arg(long, default_value_t = 0.25)]
    bin_width: f64,
}

#[derive(Args)]
struct GenerateCmd {
    #[arg(long, default_value_t = 2)]
    weeks: usize,
    #[arg(long, default_value_t = 1.55)]
    u_bar: f64,
}

fn effective_config(cli: &Cli) -> Result<StudyConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(reps) = cli.reps {
        config.replications = reps;
    }
    config.validate()?;
    Ok(config)
}

fn print<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialises")
    );
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config("`--threads` must be positive".into()));
        }
        set_threads(t);
    }
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let config = effective_config(&cli)?;
    let out = config.output_dir.clone();
    match cli.command {
        Command::Limit => print(&cmd_limit(&config, &out)?),
        Command::Simulate => {
            let r = cmd_simulate(&config, &out, exec)?;
            print(&serde_json::json!({
                "limit": r.limit,
                "network_limit": r.network_limit,
                "stage_unit": r.stage_unit,
                "summary": r.summary,
                "final_within_threshold": r.final_within_threshold,
                "clean": r.clean,
            }));
        }
        Command::Bounds => {
            let r = cmd_bounds(&config, &out)?;
            print(&serde_json::json!({
                "fourier": r.fourier,
                "c_prime": r.inputs.c_prime,
                "variance": r.variance,
            }));
        }
        Command::Smoothing(a) => {
            let args = SmoothingArgs {
                period: a.period,
                bins: a.bins,
                rate: a.rate,
                gaussians: a.gaussians,
            };
            print(&cmd_smoothing(&config, &args, &out)?);
        }
        Command::Fit(a) => {
            let args = FitArgs {
                tickets: a.tickets,
                kpi: a.kpi,
                n_cells: a.cells,
                method: match a.method {
                    MethodArg::Pooled => FitMethod::PooledGaps,
                    MethodArg::UpTime => FitMethod::UpTimeGaps,
                },
                fold: match a.fold {
                    FoldArg::Weekly => Fold::Weekly,
                    FoldArg::Daily => Fold::Daily,
                },
                window: a.window,
                step: a.step,
                bin_width: a.bin_width,
            };
            let r = cmd_fit(&config, &args, &out)?;
            print(&serde_json::json!({
                "tickets": r.tickets,
                "pooled_lambda": r.pooled.lambda_hat,
                "up_time_lambda": r.up_time.lambda_hat,
                "maintenance_mean_y": r.maintenance.mean_y,
                "fitted": r.fitted,
            }));
        }
        Command::Generate(a) => {
            let args = GenerateArgs {
                weeks: a.weeks,
                u_bar: a.u_bar,
            };
            print(&cmd_generate(&config, &args, &out, exec)?);
        }
        Command::Config => print!("{}", config.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
