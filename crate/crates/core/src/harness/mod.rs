//! Experiment commands: configuration, the BER and MI sweeps, the penalty
//! tables, the chain plan, and their text output.
//!
//! Output is UTF-8 with LF line endings. Comment lines start with `#`; the
//! first names the figure the data corresponds to.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod ber;
pub mod config;
pub mod curves;

pub use ber::{run_ber, BerResult, BerSpec, BER_HEADER};
pub use config::{Command, ExperimentConfig, ScenarioKind};

use crate::analysis::{
    avg_phase_penalty_db, avg_sinr_penalty_db, emit_penalty_curves, sir_1d_traditional_db, worst_sinr_penalty_db,
    AnalysisError, CurveGrid, PenaltyCurve, SinrContext,
};
use crate::chain::{make_plan, ChainError, ChainPlan};
use crate::detection::DetectionError;
use crate::impairments::ImpairmentError;
use crate::info::{mi_curve, InfoError, MiCurveSpec, MiEstimate};
use crate::runner::RunnerError;

pub const MI_HEADER: &str = "snr_db,scenario,mi_bits_per_dim,num_samples,num_workers,seed";
pub const PENALTY_HEADER: &str = "curve,offset,penalty_db";
pub const THROUGHPUT_HEADER: &str = "scheme,time_slots,relative_throughput";

/// SIR of PNC on the 1-D chain at path-loss exponent 4, carried as a
/// reference value rather than recomputed.
pub const PNC_1D_SIR_DB: f64 = 15.3;
/// Path-loss exponent of the SIR comparison.
pub const SIR_PATH_LOSS: f64 = 4.0;
const SIR_MAX_TERMS: usize = 100_000;
const WORST_SINR_POINTS: usize = 1001;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] io::Error),
    #[error(transparent)]
    Impairment(#[from] ImpairmentError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Runner(#[from] RunnerError),
}

fn figure_line(command: Command) -> &'static str {
    match command {
        Command::Ber => "# figure: 10 (XOR bit-error rate at the relay vs SNR)",
        Command::Mi => "# figure: 11 (relay mutual information vs SNR)",
        Command::Penalty => "# figures: 6, 7 (phase and time offset penalties)",
        Command::Chain => "# figure: 8 (chain synchronization schedule)",
        Command::Throughput => "# slot counts per two-way frame exchange",
    }
}

fn statistical_header(command: Command, cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let mut out = String::new();
    writeln!(out, "{}", figure_line(command)).unwrap();
    writeln!(out, "# command: {}", command.name()).unwrap();
    writeln!(out, "# scenario: {}", cfg.scenario()?).unwrap();
    writeln!(out, "# seed: {}", cfg.master_seed).unwrap();
    writeln!(out, "# workers: {}", cfg.workers).unwrap();
    writeln!(out, "# samples_per_point: {}", cfg.samples_per_point).unwrap();
    writeln!(out, "# rolloff: {}", cfg.rolloff).unwrap();
    writeln!(out, "# truncation: {}", cfg.truncation).unwrap();
    Ok(out)
}

pub fn ber_spec(cfg: &ExperimentConfig) -> Result<BerSpec, HarnessError> {
    cfg.validate_statistical()?;
    Ok(BerSpec {
        scenario: cfg.scenario()?,
        bits_per_point: cfg.samples_per_point,
        frame_len: cfg.frame_len,
        pulse: cfg.pulse()?,
        seed: cfg.master_seed,
        workers: cfg.workers,
    })
}

pub fn ber_csv(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let results = run_ber(&ber_spec(cfg)?, &cfg.snr_grid_db)?;
    let mut out = statistical_header(Command::Ber, cfg)?;
    writeln!(out, "# frame_len: {}", cfg.frame_len).unwrap();
    writeln!(out, "{BER_HEADER}").unwrap();
    for r in results {
        writeln!(out, "{},{},{},{},{},{}", r.snr_db, r.scenario, r.ber, r.num_bits, r.num_errors, r.seed).unwrap();
    }
    Ok(out)
}

pub fn run_mi(cfg: &ExperimentConfig) -> Result<Vec<MiEstimate>, HarnessError> {
    cfg.validate_statistical()?;
    let spec = MiCurveSpec {
        scenario: cfg.scenario()?,
        samples_per_point: cfg.samples_per_point,
        seed: cfg.master_seed,
        workers: cfg.workers,
        pulse: cfg.pulse()?,
        phase_grid: cfg.phase_grid,
    };
    Ok(mi_curve(&spec, &cfg.snr_grid_db)?)
}

pub fn mi_csv(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let results = run_mi(cfg)?;
    let mut out = statistical_header(Command::Mi, cfg)?;
    writeln!(out, "# phase_grid: {}", cfg.phase_grid).unwrap();
    writeln!(out, "{MI_HEADER}").unwrap();
    for e in results {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            e.snr_db, e.scenario, e.mi_bits_per_dim, e.num_samples, cfg.workers, e.seed
        )
        .unwrap();
    }
    Ok(out)
}

/// Closed-form curves and their scalar summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyReport {
    pub curves: Vec<PenaltyCurve>,
    pub avg_phase_penalty_db: f64,
    pub avg_sinr_penalty_db: f64,
    pub worst_sinr_offset: f64,
    pub worst_sinr_penalty_db: f64,
    pub sir_1d_traditional_db: f64,
    pub sir_1d_pnc_db: f64,
}

impl PenaltyReport {
    /// PNC chain SIR after the average phase penalty.
    pub fn pnc_minus_phase_db(&self) -> f64 {
        self.sir_1d_pnc_db + self.avg_phase_penalty_db
    }
}

pub fn run_penalty(cfg: &ExperimentConfig) -> Result<PenaltyReport, HarnessError> {
    let ctx = SinrContext::new(cfg.snr0_db, cfg.rolloff, cfg.truncation)?;
    let grid = CurveGrid {
        phase_points: cfg.penalty_phase_points,
        time_points: cfg.penalty_time_points,
    };
    let (worst_sinr_offset, worst_sinr_penalty_db) = worst_sinr_penalty_db(&ctx, WORST_SINR_POINTS)?;
    Ok(PenaltyReport {
        curves: emit_penalty_curves(grid, &ctx)?,
        avg_phase_penalty_db: avg_phase_penalty_db(),
        avg_sinr_penalty_db: avg_sinr_penalty_db(&ctx),
        worst_sinr_offset,
        worst_sinr_penalty_db,
        sir_1d_traditional_db: sir_1d_traditional_db(SIR_PATH_LOSS, SIR_MAX_TERMS)?,
        sir_1d_pnc_db: PNC_1D_SIR_DB,
    })
}

pub fn penalty_csv(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let r = run_penalty(cfg)?;
    let mut out = String::new();
    writeln!(out, "{}", figure_line(Command::Penalty)).unwrap();
    writeln!(out, "# command: penalty").unwrap();
    writeln!(out, "# snr0_db: {}", cfg.snr0_db).unwrap();
    writeln!(out, "# rolloff: {}", cfg.rolloff).unwrap();
    writeln!(out, "# truncation: {}", cfg.truncation).unwrap();
    writeln!(out, "{PENALTY_HEADER}").unwrap();
    for c in &r.curves {
        for (x, p) in &c.points {
            writeln!(out, "{},{x},{p}", c.parameter_name).unwrap();
        }
    }
    writeln!(out, "# avg_phase_penalty_db: {}", r.avg_phase_penalty_db).unwrap();
    writeln!(out, "# avg_sinr_penalty_db: {}", r.avg_sinr_penalty_db).unwrap();
    writeln!(
        out,
        "# worst_sinr_penalty_db: {} at offset {}",
        r.worst_sinr_penalty_db, r.worst_sinr_offset
    )
    .unwrap();
    writeln!(out, "# sir_1d_traditional_db: {}", r.sir_1d_traditional_db).unwrap();
    writeln!(out, "# sir_1d_pnc_db: {} (reference value)", r.sir_1d_pnc_db).unwrap();
    writeln!(out, "# sir_1d_pnc_minus_avg_phase_db: {}", r.pnc_minus_phase_db()).unwrap();
    Ok(out)
}

pub fn run_chain(cfg: &ExperimentConfig) -> Result<ChainPlan, HarnessError> {
    Ok(make_plan(&cfg.chain())?)
}

pub fn chain_text(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let plan = run_chain(cfg)?;
    let mut out = String::new();
    writeln!(out, "{}", figure_line(Command::Chain)).unwrap();
    writeln!(out, "# command: chain").unwrap();
    writeln!(out, "# bg_sync_time_s: {}", cfg.bg_sync_time).unwrap();
    writeln!(out, "# period_s: {}", cfg.period).unwrap();
    out.push_str(&plan.to_text());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputRow {
    pub scheme: &'static str,
    pub time_slots: u32,
    /// Relative to the traditional four-slot exchange.
    pub relative_throughput: f64,
}

/// Slots needed to exchange one frame in each direction through the relay.
pub fn throughput_summary() -> Vec<ThroughputRow> {
    [("traditional", 4), ("straightforward_nc", 3), ("pnc", 2)]
        .into_iter()
        .map(|(scheme, time_slots)| ThroughputRow {
            scheme,
            time_slots,
            relative_throughput: 4.0 / f64::from(time_slots),
        })
        .collect()
}

pub fn throughput_text() -> String {
    let mut out = String::new();
    writeln!(out, "{}", figure_line(Command::Throughput)).unwrap();
    writeln!(out, "{THROUGHPUT_HEADER}").unwrap();
    for r in throughput_summary() {
        writeln!(out, "{},{},{}", r.scheme, r.time_slots, r.relative_throughput).unwrap();
    }
    out
}

/// Runs `command` and returns its full text output.
pub fn run_command(command: Command, cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    match command {
        Command::Ber => ber_csv(cfg),
        Command::Mi => mi_csv(cfg),
        Command::Penalty => penalty_csv(cfg),
        Command::Chain => chain_text(cfg),
        Command::Throughput => Ok(throughput_text()),
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), HarnessError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::Io(p.to_path_buf(), e)),
        None => {
            use std::io::Write;
            io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| HarnessError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}
