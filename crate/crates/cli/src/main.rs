use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critnet::commands::{analyze, predict, simulate, AnalyzeRequest, SimulateRequest};
use critnet::config::SimOverrides;
use critnet::error::Result;
use critnet_core::stats::{EventSize, FitMethod, Xmin};

#[derive(Parser)]
#[command(name = "critnet", version, about = "Trade-network crash model and index drawdown analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the agent model and write its index, avalanches and graph.
    Simulate(SimulateArgs),
    /// Fit the drawdown-size distribution of a daily index CSV.
    Analyze(AnalyzeArgs),
    /// Critical threshold and predicted avalanche exponent for a degree exponent.
    Predict(PredictArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// `key=value` file; a previous run's manifest.txt also works.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    k_out: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Solvency threshold in [0, 1), or `auto` for the critical value.
    #[arg(long)]
    d_th: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    stride: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// assets, absolute or net.
    #[arg(long)]
    aggregator: Option<String>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeArg {
    Magnitude,
    Length,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "Date")]
    date_col: String,
    #[arg(long, default_value = "Close")]
    close_col: String,
    /// Lower cutoff of the fit, or `auto`.
    #[arg(long, default_value = "auto")]
    xmin: Xmin,
    /// mle or ccdf.
    #[arg(long, default_value = "mle")]
    method: FitMethod,
    #[arg(long, value_enum, default_value = "magnitude")]
    size: SizeArg,
    #[arg(long, default_value = "analysis")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    k0: u32,
    /// Classify this threshold as sub-, super- or critical.
    #[arg(long)]
    d_th: Option<f64>,
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Simulate(a) => {
            let file = match &a.config {
                Some(path) => SimOverrides::from_file(path)?,
                None => SimOverrides::default(),
            };
            let flags = SimOverrides {
                agents: a.agents,
                k_out: a.k_out,
                gamma: a.gamma,
                d_th: a.d_th,
                steps: a.steps,
                stride: a.stride,
                seed: a.seed,
                aggregator: a.aggregator,
                snapshots: a.snapshots,
            };
            let config = file.merged(flags).resolve()?;
            let summary = simulate(&SimulateRequest {
                config,
                out: a.out,
                replicas: a.replicas,
            })?;
            Ok(summary.to_text())
        }
        Command::Analyze(a) => {
            let report = analyze(&AnalyzeRequest {
                input: a.input,
                date_col: a.date_col,
                close_col: a.close_col,
                xmin: a.xmin,
                method: a.method,
                size: match a.size {
                    SizeArg::Magnitude => EventSize::Magnitude,
                    SizeArg::Length => EventSize::RunLength,
                },
                out: a.out,
            })?;
            Ok(report.to_text())
        }
        Command::Predict(a) => Ok(predict(a.gamma, a.k0, a.d_th)?.to_text()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
