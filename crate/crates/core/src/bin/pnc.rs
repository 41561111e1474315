use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pnc::harness::{run_command, write_output, Command, ExperimentConfig, HarnessError, ScenarioKind};

#[derive(Parser)]
#[command(name = "pnc", version, about = "PNC synchronization-error experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// XOR bit-error rate at the relay vs SNR
    Ber(Common),
    /// Relay mutual information vs SNR
    Mi(Common),
    /// Closed-form phase and time offset penalties
    Penalty(Common),
    /// Synchronization plan for an N-node chain
    Chain(Common),
    /// Time-slot comparison of relaying schemes
    Throughput(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with experiment settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// perfect, phase_unsync or time_unsync
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Bits (ber) or samples (mi) per SNR point
    #[arg(long)]
    samples: Option<u64>,
    /// Half-width of the offset draw (radians or fraction of T)
    #[arg(long)]
    offset_range: Option<f64>,
    /// Comma-separated SNR grid in dB
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Number of chain nodes
    #[arg(long)]
    nodes: Option<usize>,
}

fn build_config(args: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = &args.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(s) = args.scenario {
        cfg.scenario = s;
    }
    if let Some(n) = args.samples {
        cfg.samples_per_point = n;
    }
    if let Some(r) = args.offset_range {
        cfg.offset_range = Some(r);
    }
    if let Some(g) = &args.snr {
        cfg.snr_grid_db = g.clone();
    }
    if let Some(n) = args.nodes {
        cfg.num_nodes = n;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Ber(a) => (Command::Ber, a),
        Cmd::Mi(a) => (Command::Mi, a),
        Cmd::Penalty(a) => (Command::Penalty, a),
        Cmd::Chain(a) => (Command::Chain, a),
        Cmd::Throughput(a) => (Command::Throughput, a),
    };
    let result = build_config(args).and_then(|cfg| {
        if let Some(c) = cfg.command.filter(|c| *c != command) {
            eprintln!("note: config names command `{}`; running `{}`", c.name(), command.name());
        }
        let text = run_command(command, &cfg)?;
        write_output(&text, cfg.output_path.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
