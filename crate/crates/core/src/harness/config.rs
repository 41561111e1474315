//! Flat TOML experiment configuration.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::chain::{ChainConfig, ErrorTriple};
use crate::impairments::PulseShape;
use crate::runner::Scenario;

use super::HarnessError;

/// Smallest sample count accepted for the statistical commands.
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Ber,
    Mi,
    Penalty,
    Chain,
    Throughput,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ber => "ber",
            Command::Mi => "mi",
            Command::Penalty => "penalty",
            Command::Chain => "chain",
            Command::Throughput => "throughput",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Perfect,
    PhaseUnsync,
    TimeUnsync,
}

impl std::str::FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perfect" => Ok(ScenarioKind::Perfect),
            "phase_unsync" => Ok(ScenarioKind::PhaseUnsync),
            "time_unsync" => Ok(ScenarioKind::TimeUnsync),
            other => Err(HarnessError::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub scenario: ScenarioKind,
    pub snr_grid_db: Vec<f64>,
    /// Half-width of the offset draw: radians for phase, fraction of `T`
    /// for time. Defaults to the unsynchronized range of the scenario.
    pub offset_range: Option<f64>,
    /// XOR bits per point for `ber`, samples per point for `mi`.
    pub samples_per_point: u64,
    pub rolloff: f64,
    pub truncation: usize,
    pub frame_len: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub output_path: Option<PathBuf>,
    pub phase_grid: usize,
    pub snr0_db: f64,
    pub penalty_phase_points: usize,
    pub penalty_time_points: usize,
    pub num_nodes: usize,
    pub bg_sync_time: f64,
    pub period: f64,
    pub local_theta: f64,
    pub local_freq: f64,
    pub local_time: f64,
    pub halved_sync: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            scenario: ScenarioKind::Perfect,
            snr_grid_db: (0..=12).map(f64::from).collect(),
            offset_range: None,
            samples_per_point: 1_000_000,
            rolloff: 0.5,
            truncation: 16,
            frame_len: 1000,
            master_seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_path: None,
            phase_grid: crate::info::DEFAULT_PHASE_GRID,
            snr0_db: 10.0,
            penalty_phase_points: 91,
            penalty_time_points: 101,
            num_nodes: 5,
            bg_sync_time: 1.0,
            period: 100.0,
            local_theta: 0.1,
            local_freq: 0.02,
            local_time: 0.001,
            halved_sync: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(path.to_path_buf(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn pulse(&self) -> Result<PulseShape, HarnessError> {
        Ok(PulseShape::new(self.rolloff, self.truncation)?)
    }

    pub fn scenario(&self) -> Result<Scenario, HarnessError> {
        Ok(match self.scenario {
            ScenarioKind::Perfect => Scenario::Perfect,
            ScenarioKind::PhaseUnsync => {
                let r = self.offset_range.unwrap_or(FRAC_PI_4);
                if !(0.0..=PI).contains(&r) {
                    return Err(HarnessError::Config(format!("phase offset_range {r} outside [0, π]")));
                }
                Scenario::PhaseUnsync { max_phase: r }
            }
            ScenarioKind::TimeUnsync => {
                let r = self.offset_range.unwrap_or(0.5);
                if !(0.0..=0.5).contains(&r) {
                    return Err(HarnessError::Config(format!("time offset_range {r} outside [0, 0.5]")));
                }
                Scenario::TimeUnsync { max_offset: r }
            }
        })
    }

    pub fn chain(&self) -> ChainConfig {
        ChainConfig {
            num_nodes: self.num_nodes,
            bg_sync_time: self.bg_sync_time,
            period: self.period,
            local_errors: ErrorTriple::new(self.local_theta, self.local_freq, self.local_time),
            halved_sync: self.halved_sync,
        }
    }

    /// Checks what the statistical commands need.
    pub fn validate_statistical(&self) -> Result<(), HarnessError> {
        if self.snr_grid_db.is_empty() {
            return Err(HarnessError::Config("snr_grid_db is empty".into()));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(HarnessError::Config("snr_grid_db has a non-finite entry".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Config("snr_grid_db must be strictly increasing".into()));
        }
        if self.samples_per_point < MIN_SAMPLES {
            return Err(HarnessError::Config(format!(
                "samples_per_point must be at least {MIN_SAMPLES}, got {}",
                self.samples_per_point
            )));
        }
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        if self.frame_len == 0 {
            return Err(HarnessError::Config("frame_len must be at least 1".into()));
        }
        self.pulse()?;
        self.scenario()?;
        Ok(())
    }
}
