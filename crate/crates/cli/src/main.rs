//! Experiment harness around the secroute library: SCP sweeps, route
//! reports, aggregate routing studies, the anchoring-inequality check and a
//! numeric selftest. Every run is reproducible from (config, seed).

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{MethodSel, ModeSel, ScenarioConfig};

#[derive(Parser)]
#[command(name = "secroute", version, about = "Secure-connection probability and routing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the SCP of a configured path per density, method and mode
    ScpEval(RunArgs),
    /// Report the highest-SCP route and optional benchmark routes
    Route(RunArgs),
    /// Aggregate proposed-vs-benchmark routing over random placements
    RouteStudy(RunArgs),
    /// Verify the anchoring inequality on random instances
    Lemma1Check(Lemma1Args),
    /// Run quick numeric self-checks
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Colluding,
    Noncolluding,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mc,
    Exact,
    Approx,
    All,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte-Carlo trial count
    #[arg(long)]
    trials: Option<u64>,
    /// Output file prefix; omit to write CSV to stdout
    #[arg(long)]
    out: Option<String>,
    /// Override the eavesdropper mode selection
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Override the method selection
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Args)]
struct Lemma1Args {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long)]
    out: Option<String>,
}

fn load_config(args: &RunArgs) -> Result<(ScenarioConfig, String), String> {
    let bytes = std::fs::read(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| format!("{} is not UTF-8", args.config.display()))?;
    let mut cfg = config::parse_scenario(&text)
        .map_err(|e| format!("{}: {e}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err("trials must be at least 1".into());
        }
        cfg.trials = trials;
    }
    if let Some(mode) = args.mode {
        cfg.mode = match mode {
            ModeArg::Colluding => ModeSel::Colluding,
            ModeArg::Noncolluding => ModeSel::NonColluding,
            ModeArg::Both => ModeSel::Both,
        };
    }
    if let Some(method) = args.method {
        cfg.method = match method {
            MethodArg::Mc => MethodSel::Mc,
            MethodArg::Exact => MethodSel::Exact,
            MethodArg::Approx => MethodSel::Approx,
            MethodArg::All => MethodSel::All,
        };
    }
    Ok((cfg, report::sha256_hex(&bytes)))
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let result = match &cli.command {
        Command::ScpEval(args) => {
            let (cfg, hash) = load_config(args)?;
            commands::scp_eval::run(&cfg, hash, &args.out)
        }
        Command::Route(args) => {
            let (cfg, hash) = load_config(args)?;
            commands::route::run(&cfg, hash, &args.out)
        }
        Command::RouteStudy(args) => {
            let (cfg, hash) = load_config(args)?;
            commands::route_study::run(&cfg, hash, &args.out)
        }
        Command::Lemma1Check(args) => commands::lemma1::run(args.seed, args.instances, &args.out),
        Command::Selftest => commands::selftest::run(),
    };
    eprintln!("done in {} ms", started.elapsed().as_millis());
    result
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
