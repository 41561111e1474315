//! Synchronization plan for an N-node chain of relays.
//!
//! Nodes `1..=N` are split into basic groups (BGs) of three consecutive nodes.
//! Sub-phase 1 walks the odd nodes: BG `j = (2j−1, 2j, 2j+1)` lets node `2j+1`
//! lock onto node `2j−1` through relay `2j`. Sub-phase 2 does the same for the
//! even nodes with groups `(2j, 2j+1, 2j+2)`. Each step takes `Δt_BG`.
//!
//! For even N the odd chain ends at node `N−1`; node N joins the last BG as an
//! extra member and is synchronized to node `N−2` in sub-phase 2.

use std::fmt::{self, Write as _};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("N ≥ 3 required, got {0}")]
    TooFewNodes(usize),
    #[error("BG synchronization time must be positive and finite, got {0}")]
    BgSyncTime(f64),
    #[error("period must be positive and finite, got {0}")]
    Period(f64),
    #[error("infeasible plan: T_s = (N−2)·Δt_BG = {ts} s ≥ T_p = {period} s")]
    Infeasible { ts: f64, period: f64 },
    #[error("error bounds must be finite and non-negative, got {0:?}")]
    ErrorBounds(ErrorTriple),
    #[error("node {node} is not a relay: relays are even nodes in 2..={last}")]
    NotARelay { node: usize, last: usize },
    #[error("drift rates must be finite and non-negative, got {0:?}")]
    Drift(ErrorTriple),
    #[error("tolerances must be positive and finite, got {0:?}")]
    Tolerance(ErrorTriple),
}

/// Phase (rad), frequency (rad/s, the `2Δω` bound) and time (s) components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorTriple {
    pub theta: f64,
    pub freq: f64,
    pub time: f64,
}

impl ErrorTriple {
    pub fn new(theta: f64, freq: f64, time: f64) -> Self {
        Self { theta, freq, time }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(self.theta * k, self.freq * k, self.time * k)
    }

    fn components(self) -> [f64; 3] {
        [self.theta, self.freq, self.time]
    }
}

impl fmt::Display for ErrorTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.theta, self.freq, self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub num_nodes: usize,
    pub bg_sync_time: f64,
    pub period: f64,
    pub local_errors: ErrorTriple,
    /// Also report the approximate duration of a schedule without sub-phase 2.
    pub halved_sync: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicGroup {
    /// 1-based.
    pub index: usize,
    /// Node ids in increasing order.
    pub members: Vec<usize>,
}

/// One `Δt_BG` slot in which `right` synchronizes to `left` through `relay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncStep {
    pub sub_phase: u8,
    /// 1-based position within the whole synchronization phase.
    pub step: usize,
    /// 1-based group index within the sub-phase.
    pub group: usize,
    pub left: usize,
    pub relay: usize,
    pub right: usize,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPlan {
    pub num_nodes: usize,
    pub num_groups: usize,
    pub groups: Vec<BasicGroup>,
    pub steps: Vec<SyncStep>,
    pub ts: f64,
    pub td: f64,
    pub overhead: f64,
    pub accumulated_errors: ErrorTriple,
    pub local_errors: ErrorTriple,
    /// Rough `T_s/2` for a schedule that drops sub-phase 2. No construction
    /// backs this number.
    pub ts_halved_approx: Option<f64>,
}

pub fn num_groups(num_nodes: usize) -> usize {
    (num_nodes.saturating_sub(1)) / 2
}

/// Sub-phase 1 groups. For even N the last group also lists node N.
pub fn partition_groups(num_nodes: usize) -> Result<Vec<BasicGroup>, ChainError> {
    if num_nodes < 3 {
        return Err(ChainError::TooFewNodes(num_nodes));
    }
    let m = num_groups(num_nodes);
    let mut groups: Vec<BasicGroup> = (1..=m)
        .map(|j| BasicGroup {
            index: j,
            members: vec![2 * j - 1, 2 * j, 2 * j + 1],
        })
        .collect();
    if num_nodes.is_multiple_of(2) {
        groups[m - 1].members.push(num_nodes);
    }
    Ok(groups)
}

fn check_triple(t: ErrorTriple) -> bool {
    t.components().iter().all(|c| c.is_finite() && *c >= 0.0)
}

pub fn make_plan(cfg: &ChainConfig) -> Result<ChainPlan, ChainError> {
    let groups = partition_groups(cfg.num_nodes)?;
    if !(cfg.bg_sync_time > 0.0 && cfg.bg_sync_time.is_finite()) {
        return Err(ChainError::BgSyncTime(cfg.bg_sync_time));
    }
    if !(cfg.period > 0.0 && cfg.period.is_finite()) {
        return Err(ChainError::Period(cfg.period));
    }
    if !check_triple(cfg.local_errors) {
        return Err(ChainError::ErrorBounds(cfg.local_errors));
    }
    let n = cfg.num_nodes;
    let m = groups.len();
    let ts = (n - 2) as f64 * cfg.bg_sync_time;
    if ts >= cfg.period {
        return Err(ChainError::Infeasible { ts, period: cfg.period });
    }

    let mut steps = Vec::with_capacity(n - 2);
    let mut push = |sub_phase: u8, group: usize, left: usize| {
        let k = steps.len();
        steps.push(SyncStep {
            sub_phase,
            step: k + 1,
            group,
            left,
            relay: left + 1,
            right: left + 2,
            start_s: k as f64 * cfg.bg_sync_time,
            end_s: (k + 1) as f64 * cfg.bg_sync_time,
        });
    };
    for j in 1..=m {
        push(1, j, 2 * j - 1);
    }
    for j in 1..=(n - 2 - m) {
        push(2, j, 2 * j);
    }

    Ok(ChainPlan {
        num_nodes: n,
        num_groups: m,
        groups,
        steps,
        ts,
        td: cfg.period - ts,
        overhead: ts / cfg.period,
        accumulated_errors: cfg.local_errors.scaled(m as f64),
        local_errors: cfg.local_errors,
        ts_halved_approx: cfg.halved_sync.then_some(ts / 2.0),
    })
}

/// Synchronization errors that matter for PNC reception at `relay_node`:
/// only those between its two neighbours, whatever the chain length.
pub fn effective_detection_errors(plan: &ChainPlan, relay_node: usize) -> Result<ErrorTriple, ChainError> {
    let last = plan.num_nodes - 1;
    if !relay_node.is_multiple_of(2) || relay_node < 2 || relay_node > last {
        return Err(ChainError::NotARelay { node: relay_node, last });
    }
    Ok(plan.local_errors)
}

/// Longest resynchronization period before any error component drifts past
/// its tolerance. Components that do not drift impose no bound.
pub fn resync_period_bound(drift: ErrorTriple, tolerance: ErrorTriple) -> Result<f64, ChainError> {
    if !check_triple(drift) {
        return Err(ChainError::Drift(drift));
    }
    if !tolerance.components().iter().all(|c| c.is_finite() && *c > 0.0) {
        return Err(ChainError::Tolerance(tolerance));
    }
    Ok(drift
        .components()
        .iter()
        .zip(tolerance.components())
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, t)| t / d)
        .fold(f64::INFINITY, f64::min))
}

pub const PLAN_HEADER: &str = "phase,step,group,left_node,right_node,start_s,end_s";

impl ChainPlan {
    /// One CSV line per step, then a `#`-prefixed summary block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(PLAN_HEADER);
        out.push('\n');
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.sub_phase, s.step, s.group, s.left, s.right, s.start_s, s.end_s
            );
        }
        let _ = writeln!(out, "# num_nodes: {}", self.num_nodes);
        let _ = writeln!(out, "# num_groups: {}", self.num_groups);
        for g in &self.groups {
            let ids: Vec<String> = g.members.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(out, "# group {}: {}", g.index, ids.join(" "));
        }
        if self.num_nodes.is_multiple_of(2) {
            let _ = writeln!(
                out,
                "# boundary rule: node {} syncs to node {} in sub-phase 2",
                self.num_nodes,
                self.num_nodes - 2
            );
        }
        let _ = writeln!(out, "# ts_s: {}", self.ts);
        let _ = writeln!(out, "# td_s: {}", self.td);
        let _ = writeln!(out, "# overhead: {}", self.overhead);
        let _ = writeln!(out, "# local_errors: {}", self.local_errors);
        let _ = writeln!(out, "# accumulated_errors: {}", self.accumulated_errors);
        if let Some(h) = self.ts_halved_approx {
            let _ = writeln!(out, "# ts_halved_approx_s: {h} (approximate, sub-phase 2 dropped)");
        }
        out
    }
}
