mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csqc_core::noise::LossConvention;

use crate::config::{FactorySource, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "csqc", version, about = "Coherent-state quantum computing simulations")]
struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fock-space checks of measurement, teleportation and gates.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Per-operation error rates.
    Noise {
        #[command(subcommand)]
        what: NoiseCommand,
    },
    /// Error-correction simulation.
    Ec {
        #[command(subcommand)]
        what: EcCommand,
    },
    /// Threshold search.
    Threshold {
        #[command(subcommand)]
        what: ThresholdCommand,
    },
    /// Resource counts per error-correction round.
    Resources(ResourcesArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Branch enumeration of every circuit on a grid of amplitudes.
    Gates(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum NoiseCommand {
    /// Print the operation table.
    Table(NoiseTableArgs),
}

#[derive(Subcommand, Debug)]
enum EcCommand {
    /// Monte Carlo effective rates of the CZ extended rectangle.
    Simulate(EcArgs),
}

#[derive(Subcommand, Debug)]
enum ThresholdCommand {
    /// Threshold loss at each amplitude; CSV plus a JSON sidecar.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Default)]
struct NoiseArgs {
    /// Qubit amplitude; with --eta, derives p and q.
    #[arg(long)]
    alpha: Option<f64>,
    /// Photon loss fraction.
    #[arg(long)]
    eta: Option<f64>,
    /// Unlocated Z rate, instead of --alpha/--eta.
    #[arg(long)]
    p: Option<f64>,
    /// Located failure rate, instead of --alpha/--eta.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_parser = parse_convention)]
    convention: Option<LossConvention>,
    #[arg(long)]
    memory_noise: Option<bool>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma-separated amplitudes.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Output JSON path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NoiseTableArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    /// Print JSON instead of aligned text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EcArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Likelihood ratio under which the decoder reports a located failure.
    #[arg(long)]
    tie_ratio: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated amplitudes.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    eta_low: Option<f64>,
    #[arg(long)]
    eta_high: Option<f64>,
    /// Bracket width at which bisection stops, relative to its upper end.
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    levels: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    escalations: Option<u32>,
    #[arg(long, value_parser = parse_convention)]
    convention: Option<LossConvention>,
    #[arg(long)]
    memory_noise: Option<bool>,
    #[arg(long)]
    tie_ratio: Option<f64>,
    /// CSV path; the sidecar is written next to it with a `.json` extension.
    #[arg(long, default_value = "threshold_sweep.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ResourcesArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    levels: Option<u32>,
    /// Factory acceptances: nominal, or measured at --factory-alpha.
    #[arg(long, value_enum)]
    factory: Option<FactorySource>,
    #[arg(long)]
    factory_alpha: Option<f64>,
    /// Samples for the verifier acceptance.
    #[arg(long)]
    verifier_samples: Option<u64>,
    /// Trials per level for the effective rates behind max_steps.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_convention(s: &str) -> Result<LossConvention, String> {
    match s {
        "paper_literal" => Ok(LossConvention::PaperLiteral),
        "intensity_loss" => Ok(LossConvention::IntensityLoss),
        _ => Err(format!("unknown convention {s:?}; expected paper_literal or intensity_loss")),
    }
}

fn overlay<T>(flag: Option<T>, file: &mut Option<T>) {
    if flag.is_some() {
        *file = flag;
    }
}

impl NoiseArgs {
    fn apply(self, c: &mut FileConfig) {
        // a flag source replaces the file's source entirely
        if self.alpha.is_some() || self.eta.is_some() {
            c.p = None;
            c.q = None;
        }
        if self.p.is_some() || self.q.is_some() {
            c.alpha = None;
            c.eta = None;
        }
        overlay(self.alpha, &mut c.alpha);
        overlay(self.eta, &mut c.eta);
        overlay(self.p, &mut c.p);
        overlay(self.q, &mut c.q);
        overlay(self.convention, &mut c.convention);
        overlay(self.memory_noise, &mut c.memory_noise);
    }
}

fn run(cli: Cli) -> Result<(), commands::Failure> {
    let mut file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(commands::Failure::Config)?,
        None => FileConfig::default(),
    };
    let workers = match cli.workers {
        Some(0) => return Err(commands::Failure::Config(anyhow::anyhow!("workers must be at least 1"))),
        w => w,
    };
    let job = match cli.command {
        Command::Verify { what: VerifyCommand::Gates(a) } => {
            if a.alpha.is_some() {
                file.alphas = a.alpha;
            }
            commands::Job::Verify(commands::verify_config(&file)?, a.out)
        }
        Command::Noise { what: NoiseCommand::Table(a) } => {
            a.noise.apply(&mut file);
            commands::Job::Noise(commands::noise_config(&file)?, a.json, a.out)
        }
        Command::Ec { what: EcCommand::Simulate(a) } => {
            a.noise.apply(&mut file);
            overlay(a.trials, &mut file.trials);
            overlay(a.seed, &mut file.seed);
            overlay(a.tie_ratio, &mut file.tie_ratio);
            commands::Job::Ec(commands::ec_config(&file)?, a.out)
        }
        Command::Threshold { what: ThresholdCommand::Sweep(a) } => {
            if a.alphas.is_some() {
                file.alphas = a.alphas;
            }
            overlay(a.eta_low, &mut file.eta_low);
            overlay(a.eta_high, &mut file.eta_high);
            overlay(a.rel_tol, &mut file.rel_tol);
            overlay(a.levels, &mut file.levels);
            overlay(a.trials, &mut file.trials);
            overlay(a.seed, &mut file.seed);
            overlay(a.escalations, &mut file.escalations);
            overlay(a.convention, &mut file.convention);
            overlay(a.memory_noise, &mut file.memory_noise);
            overlay(a.tie_ratio, &mut file.tie_ratio);
            commands::Job::Sweep(commands::sweep_config(&file)?, a.out)
        }
        Command::Resources(a) => {
            a.noise.apply(&mut file);
            overlay(a.levels, &mut file.levels);
            overlay(a.factory, &mut file.factory);
            overlay(a.factory_alpha, &mut file.factory_alpha);
            overlay(a.verifier_samples, &mut file.verifier_samples);
            overlay(a.trials, &mut file.trials);
            overlay(a.seed, &mut file.seed);
            commands::Job::Resources(commands::resources_config(&file)?, a.out)
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| commands::Failure::Guard(e.into()))?;
    pool.install(|| job.run())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
