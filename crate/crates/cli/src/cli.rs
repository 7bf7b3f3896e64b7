use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::service::{self, ServiceOptions};

#[derive(Debug, Parser)]
#[command(name = "demosuff", version, about = "Decide when a robot has seen enough demonstrations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run acquisition to termination with the simulated teacher.
    Acquire(AcquireArgs),
    /// Demonstration counts over repeated runs for several partition sizes.
    KSweep(KSweepArgs),
    /// Check the bandit's accuracy on arms with known failure rates.
    BanditValidate(BanditValidateArgs),
    /// Acquire with one cell, then re-evaluate the result on a finer partition.
    MaskStudy(MaskStudyArgs),
    /// Export the latest per-cell estimates of a checkpoint.
    Heatmap(HeatmapArgs),
    /// Serve the acquisition loop over HTTP for an interactive teacher.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct AcquireArgs {
    /// JSON acquisition config.
    #[arg(long)]
    pub config: PathBuf,
    /// Continue from a checkpoint written for the same config.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Where the checkpoint is written after every iteration.
    #[arg(long, default_value = "checkpoint.json")]
    pub checkpoint: PathBuf,
    /// Use epsilon 0.02, delta 0.05, beta 0.95, K 16 instead of the config's values.
    #[arg(long)]
    pub tight_params: bool,
}

#[derive(Debug, Args)]
pub struct KSweepArgs {
    #[arg(long = "K", value_delimiter = ',', default_value = "1,4,16")]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Base config; the bundled disc-world sweep when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "k-sweep")]
    pub out: PathBuf,
    /// Use epsilon 0.02, delta 0.05, beta 0.95.
    #[arg(long)]
    pub tight_params: bool,
}

#[derive(Debug, Args)]
pub struct BanditValidateArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Failure probability of every arm.
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.5,0.1")]
    pub arms: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the full per-run report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaskStudyArgs {
    /// Scenario file, or the name of a bundled scenario (`weak-corner`, `uniform`).
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// CSV output; a JSON copy is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional PNG rendering.
    #[arg(long)]
    pub png: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
    /// Seconds a suggestion waits for an answer before counting as a refusal.
    #[arg(long, default_value_t = 600)]
    pub suggestion_timeout: u64,
    /// Write a checkpoint after every iteration.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Acquire(a) => commands::acquire(&a),
        Command::KSweep(a) => commands::k_sweep(&a),
        Command::BanditValidate(a) => commands::bandit_validate(&a),
        Command::MaskStudy(a) => commands::mask_study(&a),
        Command::Heatmap(a) => commands::heatmap(&a),
        Command::Serve(a) => {
            let opts = ServiceOptions {
                suggestion_timeout: Duration::from_secs(a.suggestion_timeout),
                checkpoint: a.checkpoint.clone(),
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(SocketAddr::new(a.host, a.port), opts))
        }
    }
}
