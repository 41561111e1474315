//! Monte-Carlo estimates of the mutual information `½·I(s1 ⊕ s3; r)` at the
//! relay, in bits per real dimension.
//!
//! Each sample contributes its information density
//! `log2 p(r | X) − log2 Σ_x ¼·p(r | x)`, where the class-conditional density
//! is the Gaussian mixture over the superimposed points of that XOR class.
//! Everything is accumulated in the log domain.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::detection::{build_hypotheses, log_sum_exp, DetectionError, XorHypothesisSet};
use crate::impairments::{
    add_awgn, noise_var_for_snr_db, superpose_phase_offset, ImpairmentError, PulseShape, TimeOffsetTaps,
};
use crate::mapping::{qpsk_modulate, BitPair};
use crate::runner::{run_batches, RunnerError, Scenario};

/// Phase grid used to average over a uniform phase offset.
pub const DEFAULT_PHASE_GRID: usize = 20;
/// Neighbour realizations used to marginalize the ISI in each frame.
pub const ISI_BANK_SIZE: usize = 256;
/// Symbols per time-offset frame.
pub const FRAME_LEN: usize = 1000;
/// Samples per work unit in [`mi_curve`].
pub const MI_BATCH: u64 = 10_000;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error("at least one sample is required")]
    NoSamples,
    #[error("SNR grid is empty")]
    EmptyGrid,
    #[error("phase grid needs at least 2 points, got {0}")]
    PhaseGrid(usize),
    #[error("SNR {0} dB is not finite")]
    Snr(f64),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Impairment(#[from] ImpairmentError),
    #[error(transparent)]
    Runner(#[from] RunnerError),
}

/// A mutual-information estimate with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiSample {
    pub bits_per_dim: f64,
    pub std_error: f64,
    pub num_samples: u64,
}

/// One point of a mutual-information curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MiEstimate {
    pub snr_db: f64,
    pub scenario: Scenario,
    pub mi_bits_per_dim: f64,
    pub std_error: f64,
    pub num_samples: u64,
    pub seed: u64,
}

/// Running sums of per-sample information densities (bits per dimension).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Accumulator {
    sum: f64,
    sum_sq: f64,
    n: u64,
}

impl Accumulator {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
        self.n += 1;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.n += other.n;
    }

    fn finish(&self) -> MiSample {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        MiSample {
            bits_per_dim: mean,
            std_error: (var / n).sqrt(),
            num_samples: self.n,
        }
    }
}

fn check_snr(snr_db: f64) -> Result<f64, InfoError> {
    if snr_db.is_finite() {
        Ok(noise_var_for_snr_db(snr_db))
    } else {
        Err(InfoError::Snr(snr_db))
    }
}

/// Draws `(s1, s3)`, forms the noisy superposition and returns the
/// information density of the XOR class, halved to bits per dimension.
fn phase_density<R: Rng + ?Sized>(hyp: &XorHypothesisSet, noise_var: f64, rng: &mut R) -> f64 {
    let s1 = BitPair::from_index(rng.gen_range(0..4));
    let s3 = BitPair::from_index(rng.gen_range(0..4));
    let clean = superpose_phase_offset(
        qpsk_modulate(s1).to_complex(),
        qpsk_modulate(s3).to_complex(),
        hyp.theta(),
    );
    let obs = add_awgn(clean, noise_var, rng).expect("validated noise variance");
    let ll = hyp.class_log_likelihoods(obs.sample(), noise_var);
    let own = ll[(s1 ^ s3).index()];
    // log p(r|X) − log(¼ Σ p(r|x)); the per-class ¼ cancels
    0.5 * (own - log_sum_exp(ll) + 4f64.ln()) / LN_2
}

fn accumulate_phase_grid<R: Rng + ?Sized>(
    hyps: &[XorHypothesisSet],
    noise_var: f64,
    n: u64,
    rng: &mut R,
) -> Accumulator {
    let mut acc = Accumulator::default();
    for i in 0..n {
        let hyp = &hyps[(i % hyps.len() as u64) as usize];
        acc.push(phase_density(hyp, noise_var, rng));
    }
    acc
}

/// `½·I(X; r | θ)` for a known phase offset `θ ∈ [−π/4, π/4]`.
pub fn mi_given_theta<R: Rng + ?Sized>(
    snr_db: f64,
    theta: f64,
    num_samples: u64,
    rng: &mut R,
) -> Result<MiSample, InfoError> {
    if num_samples == 0 {
        return Err(InfoError::NoSamples);
    }
    let noise_var = check_snr(snr_db)?;
    let hyp = build_hypotheses(theta)?;
    Ok(accumulate_phase_grid(std::slice::from_ref(&hyp), noise_var, num_samples, rng).finish())
}

/// Midpoint grid `θ_k = (k + ½)/G · max_phase` on the positive half; the
/// ensemble is symmetric in `θ ↔ −θ`.
pub fn phase_grid(max_phase: f64, num_grid: usize) -> Vec<f64> {
    (0..num_grid)
        .map(|k| (k as f64 + 0.5) / num_grid as f64 * max_phase)
        .collect()
}

fn phase_hypotheses(max_phase: f64, num_grid: usize) -> Result<Vec<XorHypothesisSet>, InfoError> {
    if num_grid < 2 {
        return Err(InfoError::PhaseGrid(num_grid));
    }
    phase_grid(max_phase, num_grid)
        .into_iter()
        .map(|t| build_hypotheses(t).map_err(InfoError::from))
        .collect()
}

/// Uniform average of `½·I(X; r | θ)` over the phase grid. Samples cycle
/// through the grid, so each offset gets an equal share when `num_samples`
/// is a multiple of `num_grid`.
pub fn mi_phase_unsync<R: Rng + ?Sized>(
    snr_db: f64,
    max_phase: f64,
    num_grid: usize,
    num_samples: u64,
    rng: &mut R,
) -> Result<MiSample, InfoError> {
    if num_samples == 0 {
        return Err(InfoError::NoSamples);
    }
    let noise_var = check_snr(snr_db)?;
    let hyps = phase_hypotheses(max_phase, num_grid)?;
    Ok(accumulate_phase_grid(&hyps, noise_var, num_samples, rng).finish())
}

fn log_mean_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + (xs.iter().map(|x| (x - max).exp()).sum::<f64>() / xs.len() as f64).ln()
}

fn random_signs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn accumulate_time<R: Rng + ?Sized>(
    noise_var: f64,
    max_offset: f64,
    pulse: &PulseShape,
    n: u64,
    rng: &mut R,
) -> Result<Accumulator, InfoError> {
    let sigma = noise_var.sqrt();
    let scale = 0.5 / noise_var;
    let window = pulse.truncation_symbols();
    let mut acc = Accumulator::default();
    let mut left = n as usize;
    let mut scratch0 = vec![0.0; 2 * ISI_BANK_SIZE];
    let mut scratch1 = vec![0.0; ISI_BANK_SIZE];
    while left > 0 {
        let frame = left.min(FRAME_LEN);
        left -= frame;
        let dt = if max_offset > 0.0 {
            rng.gen_range(-max_offset..=max_offset)
        } else {
            0.0
        };
        let taps = TimeOffsetTaps::new(dt, pulse)?;
        // Observations are rescaled by 2 to undo the ½ of the two-source sum,
        // so a level is (a1 + a3)·p(Δt/2) and the ISI is the plain tap sum.
        let gain = taps.signal_gain();
        let bank: Vec<f64> = (0..ISI_BANK_SIZE)
            .map(|_| {
                taps.lead()
                    .iter()
                    .zip(taps.lag())
                    .map(|(w1, w3)| {
                        let a1 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                        let a3 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                        a1 * w1 + a3 * w3
                    })
                    .sum()
            })
            .collect();
        let len = frame + 2 * window;
        let dims: Vec<(Vec<f64>, Vec<f64>)> = (0..2)
            .map(|_| (random_signs(len, rng), random_signs(len, rng)))
            .collect();
        for k in window..window + frame {
            let mut density = 0.0;
            for (a1, a3) in &dims {
                let noise: f64 = rng.sample(StandardNormal);
                let y = 2.0 * taps.sample(a1, a3, k)? + sigma * noise;
                for (j, b) in bank.iter().enumerate() {
                    let c = y - b;
                    scratch0[2 * j] = -(c - 2.0 * gain).powi(2) * scale;
                    scratch0[2 * j + 1] = -(c + 2.0 * gain).powi(2) * scale;
                    scratch1[j] = -c * c * scale;
                }
                let l0 = log_mean_exp(&scratch0);
                let l1 = log_mean_exp(&scratch1);
                let own = if a1[k] == a3[k] { l0 } else { l1 };
                let mix = log_sum_exp([l0, l1]) - LN_2;
                density += (own - mix) / LN_2;
            }
            acc.push(0.5 * density);
        }
    }
    Ok(acc)
}

/// `½·I(X; r)` with a per-frame time offset uniform on
/// `[−max_offset, max_offset]`, known to the receiver. The ISI from unknown
/// neighbour bits is marginalized over a bank of random realizations.
pub fn mi_time_unsync<R: Rng + ?Sized>(
    snr_db: f64,
    max_offset: f64,
    pulse: &PulseShape,
    num_samples: u64,
    rng: &mut R,
) -> Result<MiSample, InfoError> {
    if num_samples == 0 {
        return Err(InfoError::NoSamples);
    }
    if !(max_offset.abs() <= 0.5) {
        return Err(ImpairmentError::TimeOffsetRange(max_offset).into());
    }
    let noise_var = check_snr(snr_db)?;
    Ok(accumulate_time(noise_var, max_offset.abs(), pulse, num_samples, rng)?.finish())
}

/// Settings shared by every point of an MI curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiCurveSpec {
    pub scenario: Scenario,
    pub samples_per_point: u64,
    pub seed: u64,
    pub workers: usize,
    pub pulse: PulseShape,
    pub phase_grid: usize,
}

/// One estimate per SNR point, deterministic for a given seed.
pub fn mi_curve(spec: &MiCurveSpec, snr_grid_db: &[f64]) -> Result<Vec<MiEstimate>, InfoError> {
    if snr_grid_db.is_empty() {
        return Err(InfoError::EmptyGrid);
    }
    if spec.samples_per_point == 0 {
        return Err(InfoError::NoSamples);
    }
    for &s in snr_grid_db {
        check_snr(s)?;
    }
    let hyps = match spec.scenario {
        Scenario::Perfect => vec![build_hypotheses(0.0)?],
        Scenario::PhaseUnsync { max_phase } => phase_hypotheses(max_phase, spec.phase_grid)?,
        Scenario::TimeUnsync { max_offset } => {
            if !(max_offset.abs() <= 0.5) {
                return Err(ImpairmentError::TimeOffsetRange(max_offset).into());
            }
            Vec::new()
        }
    };
    let batches = run_batches(
        snr_grid_db.len(),
        spec.samples_per_point,
        MI_BATCH,
        spec.seed,
        spec.workers,
        |point, n, rng| -> Result<Accumulator, InfoError> {
            let noise_var = noise_var_for_snr_db(snr_grid_db[point]);
            match spec.scenario {
                Scenario::TimeUnsync { max_offset } => {
                    accumulate_time(noise_var, max_offset.abs(), &spec.pulse, n, rng)
                }
                _ => Ok(accumulate_phase_grid(&hyps, noise_var, n, rng)),
            }
        },
    )?;
    snr_grid_db
        .iter()
        .zip(batches)
        .map(|(&snr_db, parts)| {
            let mut total = Accumulator::default();
            for part in parts {
                total.merge(&part?);
            }
            let s = total.finish();
            Ok(MiEstimate {
                snr_db,
                scenario: spec.scenario,
                mi_bits_per_dim: s.bits_per_dim,
                std_error: s.std_error,
                num_samples: s.num_samples,
                seed: spec.seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::QpskSymbol;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// `½·I(X; r)` by midpoint quadrature of the 2-D mixture densities on a
    /// dense grid, straight from the 16 superimposed points.
    fn quadrature_oracle(snr_db: f64, theta: f64) -> f64 {
        let var = 10f64.powf(-snr_db / 10.0);
        let mut pts = Vec::new();
        for s1 in 0..4 {
            for s3 in 0..4 {
                let a = QpskSymbol::new(if s1 & 2 != 0 { 1 } else { -1 }, if s1 & 1 != 0 { 1 } else { -1 }).unwrap();
                let b = QpskSymbol::new(if s3 & 2 != 0 { 1 } else { -1 }, if s3 & 1 != 0 { 1 } else { -1 }).unwrap();
                let p = a.to_complex() + b.to_complex() * Complex64::from_polar(1.0, theta);
                pts.push((p, (s1 ^ s3) as usize));
            }
        }
        let (lo, hi, n) = (-4.0 - 8.0 * var.sqrt(), 4.0 + 8.0 * var.sqrt(), 600);
        let h = (hi - lo) / n as f64;
        let norm = 1.0 / (2.0 * PI * var);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r = Complex64::new(lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h);
                let mut cls = [0.0f64; 4];
                for (p, c) in &pts {
                    cls[*c] += 0.25 * norm * (-(r - p).norm_sqr() / (2.0 * var)).exp();
                }
                let mix: f64 = cls.iter().map(|c| 0.25 * c).sum();
                for c in cls {
                    if c > 0.0 {
                        total += 0.25 * c * (c / mix).log2() * h * h;
                    }
                }
            }
        }
        0.5 * total
    }

    #[test]
    fn matches_quadrature_at_zero_phase() {
        let oracle = quadrature_oracle(5.0, 0.0);
        let mc = mi_given_theta(5.0, 0.0, 100_000, &mut rng(1)).unwrap();
        assert!((mc.bits_per_dim - oracle).abs() < 0.01, "{} vs {oracle}", mc.bits_per_dim);
    }

    #[test]
    fn matches_quadrature_at_eighth_pi() {
        let oracle = quadrature_oracle(3.0, PI / 8.0);
        let mc = mi_given_theta(3.0, PI / 8.0, 100_000, &mut rng(2)).unwrap();
        assert!((mc.bits_per_dim - oracle).abs() < 0.01, "{} vs {oracle}", mc.bits_per_dim);
    }

    #[test]
    fn limits() {
        let hi = mi_given_theta(80.0, 0.0, 2000, &mut rng(3)).unwrap();
        assert!((hi.bits_per_dim - 1.0).abs() < 1e-9, "{}", hi.bits_per_dim);
        let lo = mi_given_theta(-60.0, 0.0, 20_000, &mut rng(4)).unwrap();
        assert!(lo.bits_per_dim.abs() < 1e-3, "{}", lo.bits_per_dim);
        assert!(mi_given_theta(0.0, 0.0, 0, &mut rng(0)).is_err());
        assert!(mi_given_theta(f64::NAN, 0.0, 10, &mut rng(0)).is_err());
        assert!(mi_given_theta(0.0, 1.0, 10, &mut rng(0)).is_err());
    }

    #[test]
    fn symmetric_in_phase_sign() {
        for theta in [PI / 16.0, PI / 8.0, 3.0 * PI / 16.0] {
            let a = mi_given_theta(4.0, theta, 100_000, &mut rng(10)).unwrap();
            let b = mi_given_theta(4.0, -theta, 100_000, &mut rng(11)).unwrap();
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!((a.bits_per_dim - b.bits_per_dim).abs() < 3.0 * se, "theta {theta}");
        }
    }

    #[test]
    fn phase_average_lies_within_grid_extremes() {
        let grid = phase_grid(FRAC_PI_4, 4);
        let per: Vec<f64> = grid
            .iter()
            .map(|&t| quadrature_oracle(3.0, t))
            .collect();
        let avg = mi_phase_unsync(3.0, FRAC_PI_4, 4, 40_000, &mut rng(5)).unwrap();
        let lo = per.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = per.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(avg.bits_per_dim > lo - 3.0 * avg.std_error && avg.bits_per_dim < hi + 3.0 * avg.std_error);
        assert!(mi_phase_unsync(3.0, FRAC_PI_4, 1, 100, &mut rng(5)).is_err());
    }

    #[test]
    fn phase_grid_is_midpoint() {
        let g = phase_grid(FRAC_PI_4, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.025 * FRAC_PI_4).abs() < 1e-15);
        assert!((g[19] - 0.975 * FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn zero_time_offset_equals_perfect_sync() {
        let oracle = quadrature_oracle(4.0, 0.0);
        let t = mi_time_unsync(4.0, 0.0, &PulseShape::default(), 20_000, &mut rng(6)).unwrap();
        assert!((t.bits_per_dim - oracle).abs() < 4.0 * t.std_error + 1e-3, "{} vs {oracle}", t.bits_per_dim);
    }

    #[test]
    fn larger_time_offsets_lose_more() {
        let pulse = PulseShape::default();
        let small = mi_time_unsync(4.0, 0.2, &pulse, 20_000, &mut rng(7)).unwrap();
        let large = mi_time_unsync(4.0, 0.5, &pulse, 20_000, &mut rng(7)).unwrap();
        let perfect = quadrature_oracle(4.0, 0.0);
        assert!(large.bits_per_dim < small.bits_per_dim);
        assert!(small.bits_per_dim < perfect);
        assert!(mi_time_unsync(4.0, 0.7, &pulse, 10, &mut rng(7)).is_err());
    }

    #[test]
    fn standard_error_shrinks_with_samples() {
        let a = mi_given_theta(3.0, 0.2, 10_000, &mut rng(8)).unwrap();
        let b = mi_given_theta(3.0, 0.2, 160_000, &mut rng(9)).unwrap();
        let ratio = a.std_error / b.std_error;
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    fn spec(scenario: Scenario, seed: u64, workers: usize) -> MiCurveSpec {
        MiCurveSpec {
            scenario,
            samples_per_point: 20_000,
            seed,
            workers,
            pulse: PulseShape::default(),
            phase_grid: DEFAULT_PHASE_GRID,
        }
    }

    #[test]
    fn curve_is_deterministic_and_bounded() {
        let grid = [0.0, 2.0, 4.0, 6.0];
        for scenario in [Scenario::Perfect, Scenario::NO_PHASE_SYNC, Scenario::TimeUnsync { max_offset: 0.3 }] {
            let a = mi_curve(&spec(scenario, 5, 1), &grid).unwrap();
            let b = mi_curve(&spec(scenario, 5, 3), &grid).unwrap();
            assert_eq!(a, b);
            for e in &a {
                assert!((0.0..=1.0).contains(&e.mi_bits_per_dim));
                assert_eq!(e.num_samples, 20_000);
            }
            for w in a.windows(2) {
                let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
                assert!(w[1].mi_bits_per_dim > w[0].mi_bits_per_dim - 3.0 * se);
            }
        }
        assert!(matches!(mi_curve(&spec(Scenario::Perfect, 1, 1), &[]), Err(InfoError::EmptyGrid)));
    }
}
