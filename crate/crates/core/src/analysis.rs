//! Closed-form penalty analysis.
//!
//! Phase offsets are scored by the minimum inter-class distance of the
//! superimposed constellation against a perfectly synchronized reference
//! whose power is lowered until the two minimum distances match. Time offsets
//! are scored by the SINR of the mid-offset sample, with ISI variance taken
//! over i.i.d. equiprobable ±1 neighbours.

use std::f64::consts::{FRAC_PI_4, PI};

use quadrature::double_exponential;
use thiserror::Error;

use crate::impairments::{noise_var_for_snr_db, ImpairmentError, PulseShape};

/// Accepts tiny overshoot from callers that compute `π/4` arithmetically.
const PHASE_DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("phase {0} outside [-π/4, π/4]; fold it first")]
    UnfoldedPhase(f64),
    #[error("path-loss exponent {0} must exceed 1 for the interference series to converge")]
    DivergentSeries(f64),
    #[error("at least one series term is required")]
    NoTerms,
    #[error("time offset fraction {0} outside [-0.5, 0.5]")]
    TimeOffsetRange(f64),
    #[error("reference SNR {0} dB is not finite")]
    Snr(f64),
    #[error("grid needs at least {min} points, got {got}")]
    Grid { min: usize, got: usize },
    #[error(transparent)]
    Pulse(#[from] ImpairmentError),
}

fn check_phase(theta: f64) -> Result<f64, AnalysisError> {
    let t = theta.abs();
    if t <= FRAC_PI_4 + PHASE_DOMAIN_SLACK {
        Ok(t.min(FRAC_PI_4))
    } else {
        Err(AnalysisError::UnfoldedPhase(theta))
    }
}

fn check_offset(dt_frac: f64) -> Result<(), AnalysisError> {
    if dt_frac.abs() <= 0.5 {
        Ok(())
    } else {
        Err(AnalysisError::TimeOffsetRange(dt_frac))
    }
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Minimum squared distance between superimposed points of different XOR
/// classes, `4(1 − cos θ)² + 4(1 − sin θ)²`, for `|θ| ≤ π/4`.
pub fn min_distance_sq(theta: f64) -> Result<f64, AnalysisError> {
    let t = check_phase(theta)?;
    Ok(4.0 * (1.0 - t.cos()).powi(2) + 4.0 * (1.0 - t.sin()).powi(2))
}

/// Power-penalty bound `d²/4` on the linear scale.
pub fn phase_penalty_linear(theta: f64) -> Result<f64, AnalysisError> {
    Ok(min_distance_sq(theta)? / 4.0)
}

/// Power-penalty bound in dB (non-positive).
pub fn phase_penalty_db(theta: f64) -> Result<f64, AnalysisError> {
    Ok(db(phase_penalty_linear(theta)?))
}

/// Target absolute error of the averaged phase bound.
pub const AVG_PHASE_TOLERANCE: f64 = 1e-10;

/// Phase bound averaged over a uniform offset on `[−π/4, π/4]`, linear scale.
pub fn avg_phase_penalty_linear() -> f64 {
    let f = |t: f64| (1.0 - t.cos()).powi(2) + (1.0 - t.sin()).powi(2);
    let out = double_exponential::integrate(f, 0.0, FRAC_PI_4, AVG_PHASE_TOLERANCE * PI / 4.0);
    4.0 / PI * out.integral
}

pub fn avg_phase_penalty_db() -> f64 {
    db(avg_phase_penalty_linear())
}

/// SIR of the traditional 1-D chain schedule:
/// `1 / Σ_l [2/(2+4l)^α + 1/(3+4l)^α + 1/(5+4l)^α]`.
///
/// Summation stops after `max_terms` terms or once a term drops below 1e-12.
pub fn sir_1d_traditional_db(alpha: f64, max_terms: usize) -> Result<f64, AnalysisError> {
    if !(alpha > 1.0) {
        return Err(AnalysisError::DivergentSeries(alpha));
    }
    if max_terms == 0 {
        return Err(AnalysisError::NoTerms);
    }
    let mut total = 0.0;
    for l in 0..max_terms {
        let base = 4.0 * l as f64;
        let term =
            2.0 / (2.0 + base).powf(alpha) + 1.0 / (3.0 + base).powf(alpha) + 1.0 / (5.0 + base).powf(alpha);
        total += term;
        if term < 1e-12 {
            break;
        }
    }
    Ok(-db(total))
}

/// Reference operating point for the time-offset SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrContext {
    pub snr0_db: f64,
    pub pulse: PulseShape,
}

impl Default for SinrContext {
    fn default() -> Self {
        Self {
            snr0_db: 10.0,
            pulse: PulseShape::default(),
        }
    }
}

impl SinrContext {
    pub fn new(snr0_db: f64, rolloff: f64, truncation_symbols: usize) -> Result<Self, AnalysisError> {
        if !snr0_db.is_finite() {
            return Err(AnalysisError::Snr(snr0_db));
        }
        Ok(Self {
            snr0_db,
            pulse: PulseShape::new(rolloff, truncation_symbols)?,
        })
    }

    /// Noise variance per source for unit signal amplitude.
    pub fn noise_var(&self) -> f64 {
        noise_var_for_snr_db(self.snr0_db)
    }
}

/// ISI variance at the mid-offset sample for unit-amplitude sources:
/// `Σ_{l≠0, |l|≤L} p(l + Δt/2)² + p(l − Δt/2)²`.
pub fn isi_variance(dt_frac: f64, ctx: &SinrContext) -> Result<f64, AnalysisError> {
    check_offset(dt_frac)?;
    let half = dt_frac / 2.0;
    let l = ctx.pulse.truncation_symbols() as i64;
    Ok((1..=l)
        .flat_map(|k| [k, -k])
        .map(|k| {
            let x = k as f64;
            ctx.pulse.eval(x + half).powi(2) + ctx.pulse.eval(x - half).powi(2)
        })
        .sum())
}

/// `SINR(Δt) / SNR_0` on the linear scale.
pub fn relative_sinr(dt_frac: f64, ctx: &SinrContext) -> Result<f64, AnalysisError> {
    let noise = ctx.noise_var();
    let gain = ctx.pulse.eval(dt_frac / 2.0).powi(2);
    Ok(gain * noise / (isi_variance(dt_frac, ctx)? + noise))
}

/// `10·log10 p(Δt/2)² − 10·log10((σ_isi² + σ_n²)/σ_n²)`.
pub fn sinr_penalty_db(dt_frac: f64, ctx: &SinrContext) -> Result<f64, AnalysisError> {
    let noise = ctx.noise_var();
    let gain = ctx.pulse.eval(dt_frac / 2.0).powi(2);
    let isi = isi_variance(dt_frac, ctx)?;
    Ok(db(gain) - db((isi + noise) / noise))
}

/// Penalty with the SINR averaged linearly over `Δt/T ~ U[−½, ½]`.
pub fn avg_sinr_penalty_db(ctx: &SinrContext) -> f64 {
    let f = |tau: f64| relative_sinr(tau, ctx).expect("tau within range");
    // even integrand
    let half = double_exponential::integrate(f, 0.0, 0.5, 1e-12);
    db(2.0 * half.integral)
}

/// Same average with composite Simpson on `points` equally spaced nodes
/// (rounded up to an odd count).
pub fn avg_sinr_penalty_db_on_grid(ctx: &SinrContext, points: usize) -> Result<f64, AnalysisError> {
    if points < 3 {
        return Err(AnalysisError::Grid { min: 3, got: points });
    }
    let n = if points.is_multiple_of(2) { points + 1 } else { points };
    let h = 1.0 / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let tau = (-0.5 + i as f64 * h).clamp(-0.5, 0.5);
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * relative_sinr(tau, ctx)?;
    }
    Ok(db(acc * h / 3.0))
}

/// Most negative SINR penalty over `Δt/T ∈ [−½, ½]` and where it occurs,
/// searched on `points` equally spaced offsets.
pub fn worst_sinr_penalty_db(ctx: &SinrContext, points: usize) -> Result<(f64, f64), AnalysisError> {
    if points < 2 {
        return Err(AnalysisError::Grid { min: 2, got: points });
    }
    let mut worst = (0.0, 0.0);
    for i in 0..points {
        let tau = (-0.5 + i as f64 / (points - 1) as f64).clamp(-0.5, 0.5);
        let pen = sinr_penalty_db(tau, ctx)?;
        if pen < worst.1 {
            worst = (tau, pen);
        }
    }
    Ok(worst)
}

/// A tabulated penalty curve, parameter strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyCurve {
    pub parameter_name: String,
    pub points: Vec<(f64, f64)>,
}

/// Number of samples on each tabulated curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveGrid {
    pub phase_points: usize,
    pub time_points: usize,
}

impl Default for CurveGrid {
    fn default() -> Self {
        Self {
            phase_points: 91,
            time_points: 101,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// Phase bound over `θ ∈ [−π/4, π/4]` and time penalty over
/// `Δt/T ∈ [−½, ½]`, in that order.
pub fn emit_penalty_curves(grid: CurveGrid, ctx: &SinrContext) -> Result<Vec<PenaltyCurve>, AnalysisError> {
    for n in [grid.phase_points, grid.time_points] {
        if n < 2 {
            return Err(AnalysisError::Grid { min: 2, got: n });
        }
    }
    let phase = linspace(-FRAC_PI_4, FRAC_PI_4, grid.phase_points)
        .map(|t| Ok((t, phase_penalty_db(t)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let time = linspace(-0.5, 0.5, grid.time_points)
        .map(|t| Ok((t, sinr_penalty_db(t, ctx)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(vec![
        PenaltyCurve {
            parameter_name: "phase_offset_rad".into(),
            points: phase,
        },
        PenaltyCurve {
            parameter_name: "time_offset_frac".into(),
            points: time,
        },
    ])
}
