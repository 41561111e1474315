//! Received baseband samples at the relay under synchronization errors.
//!
//! Two impairment classes are modeled, never jointly:
//!
//! * a carrier phase offset (with an optional per-symbol frequency ramp),
//!   giving `r = s1 + s3·e^{jθ}`;
//! * a symbol-time offset `Δt` between the two raised-cosine pulse trains,
//!   sampled at the middle of the offset, `t = kT − Δt/2`.
//!
//! Time is normalized to the symbol duration wherever a pulse is evaluated.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Default one-sided ISI window, in symbols.
pub const DEFAULT_TRUNCATION: usize = 16;
/// Default raised-cosine roll-off.
pub const DEFAULT_ROLLOFF: f64 = 0.5;

const SINGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImpairmentError {
    #[error("phase {0} is not finite")]
    NonFinitePhase(f64),
    #[error("time offset fraction {0} outside [-0.5, 0.5]")]
    TimeOffsetRange(f64),
    #[error("symbol duration {0} must be positive and finite")]
    SymbolDuration(f64),
    #[error("roll-off {0} outside [0, 1]")]
    Rolloff(f64),
    #[error("truncation window must be at least one symbol")]
    Truncation,
    #[error("noise variance {0} is negative or not finite")]
    NoiseVariance(f64),
    #[error("phase and time offsets cannot be combined in one scenario")]
    MixedImpairments,
    #[error("symbol index {index} with window {window} exceeds sequences of length {len}")]
    IndexOutOfRange { index: usize, window: usize, len: usize },
    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Synchronization error between the two end nodes as seen at the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncOffsets {
    /// Carrier phase offset, radians.
    pub delta_theta: f64,
    /// Frequency offset expressed as phase advance per symbol, radians.
    pub delta_omega: f64,
    /// Symbol-time offset as a fraction of the symbol duration.
    pub time_offset_frac: f64,
    /// Symbol duration in seconds.
    pub symbol_duration: f64,
}

impl Default for SyncOffsets {
    fn default() -> Self {
        Self {
            delta_theta: 0.0,
            delta_omega: 0.0,
            time_offset_frac: 0.0,
            symbol_duration: 1.0,
        }
    }
}

impl SyncOffsets {
    pub fn new(
        delta_theta: f64,
        delta_omega: f64,
        time_offset_frac: f64,
        symbol_duration: f64,
    ) -> Result<Self, ImpairmentError> {
        for v in [delta_theta, delta_omega] {
            if !v.is_finite() {
                return Err(ImpairmentError::NonFinitePhase(v));
            }
        }
        if !(time_offset_frac.abs() <= 0.5) {
            return Err(ImpairmentError::TimeOffsetRange(time_offset_frac));
        }
        if !(symbol_duration > 0.0 && symbol_duration.is_finite()) {
            return Err(ImpairmentError::SymbolDuration(symbol_duration));
        }
        if time_offset_frac != 0.0 && (delta_theta != 0.0 || delta_omega != 0.0) {
            return Err(ImpairmentError::MixedImpairments);
        }
        Ok(Self {
            delta_theta,
            delta_omega,
            time_offset_frac,
            symbol_duration,
        })
    }

    pub fn phase_only(delta_theta: f64, delta_omega: f64) -> Result<Self, ImpairmentError> {
        Self::new(delta_theta, delta_omega, 0.0, 1.0)
    }

    pub fn time_only(time_offset_frac: f64) -> Result<Self, ImpairmentError> {
        Self::new(0.0, 0.0, time_offset_frac, 1.0)
    }

    /// Unfolded phase of symbol `k`: `Δθ + k·Δω`.
    pub fn phase_at(&self, k: usize) -> f64 {
        self.delta_theta + k as f64 * self.delta_omega
    }

    /// Folded per-symbol phases for a frame of `len` symbols.
    pub fn phase_ramp(&self, len: usize) -> Vec<(f64, u8)> {
        (0..len)
            .map(|k| fold_phase(self.phase_at(k)).expect("finite offsets"))
            .collect()
    }
}

/// Raised-cosine pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    rolloff: f64,
    truncation_symbols: usize,
}

impl Default for PulseShape {
    fn default() -> Self {
        Self {
            rolloff: DEFAULT_ROLLOFF,
            truncation_symbols: DEFAULT_TRUNCATION,
        }
    }
}

impl PulseShape {
    pub fn new(rolloff: f64, truncation_symbols: usize) -> Result<Self, ImpairmentError> {
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(ImpairmentError::Rolloff(rolloff));
        }
        if truncation_symbols == 0 {
            return Err(ImpairmentError::Truncation);
        }
        Ok(Self {
            rolloff,
            truncation_symbols,
        })
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn truncation_symbols(&self) -> usize {
        self.truncation_symbols
    }

    /// Pulse value at `x = t/T`.
    pub fn eval(&self, x: f64) -> f64 {
        raised_cosine(x, 1.0, self.rolloff)
    }
}

/// One complex baseband sample at the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub i_sample: f64,
    pub q_sample: f64,
    /// Noise variance per real dimension.
    pub noise_var: f64,
}

impl Observation {
    pub fn new(sample: Complex64, noise_var: f64) -> Self {
        Self {
            i_sample: sample.re,
            q_sample: sample.im,
            noise_var,
        }
    }

    pub fn sample(&self) -> Complex64 {
        Complex64::new(self.i_sample, self.q_sample)
    }
}

/// Reduces `theta` to `θ' ∈ [−π/4, π/4)` and the quadrant `k ∈ 0..4` with
/// `θ ≡ θ' + k·π/2 (mod 2π)`.
pub fn fold_phase(theta: f64) -> Result<(f64, u8), ImpairmentError> {
    if !theta.is_finite() {
        return Err(ImpairmentError::NonFinitePhase(theta));
    }
    let mut steps = ((theta + FRAC_PI_4) / FRAC_PI_2).floor();
    let mut folded = theta - steps * FRAC_PI_2;
    // floor() can land one step off when theta sits on a boundary after rounding
    if folded >= FRAC_PI_4 {
        steps += 1.0;
        folded -= FRAC_PI_2;
    } else if folded < -FRAC_PI_4 {
        steps -= 1.0;
        folded += FRAC_PI_2;
    }
    let quadrant = steps.rem_euclid(4.0) as u8;
    Ok((folded, quadrant))
}

/// Multiplies `sym` by `j^quadrant`. Exact for grid points.
pub fn rotate_symbol(sym: Complex64, quadrant: u8) -> Complex64 {
    match quadrant % 4 {
        0 => sym,
        1 => Complex64::new(-sym.im, sym.re),
        2 => -sym,
        _ => Complex64::new(sym.im, -sym.re),
    }
}

/// Noiseless superposition `s1 + s3·e^{jθ}`.
pub fn superpose_phase_offset(s1: Complex64, s3: Complex64, theta: f64) -> Complex64 {
    s1 + s3 * Complex64::from_polar(1.0, theta)
}

/// Raised-cosine pulse
/// `p(t) = sinc(t/T)·cos(πβt/T) / (1 − 4β²t²/T²)`.
///
/// The removable singularities at `t = 0` and `t = ±T/(2β)` are replaced by
/// their limits when the argument falls within `1e-9·T` of them.
pub fn raised_cosine(t: f64, period: f64, rolloff: f64) -> f64 {
    let x = t / period;
    let sinc = |u: f64| {
        if u.abs() < SINGULARITY_TOL {
            1.0
        } else {
            (PI * u).sin() / (PI * u)
        }
    };
    if rolloff > 0.0 {
        let edge = 1.0 / (2.0 * rolloff);
        if (x.abs() - edge).abs() < SINGULARITY_TOL {
            return FRAC_PI_4 * sinc(edge);
        }
    }
    let bx = rolloff * x;
    sinc(x) * (PI * bx).cos() / (1.0 - 4.0 * bx * bx)
}

/// Pulse weights for one symbol-time offset, sampled at `kT − Δt/2`.
///
/// The received sample keeps the `1/2` factor of the two-source baseband sum:
///
/// `r[k] = (a1[k] + a3[k])·p(Δt/2)/2
///        + ½·Σ_{d≠0, |d|≤L} a1[k−d]·p(dT + Δt/2) + a3[k−d]·p(dT − Δt/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeOffsetTaps {
    time_offset_frac: f64,
    truncation: usize,
    signal_gain: f64,
    /// Indexed by `d + L`; the `d = 0` entry is zero.
    lead: Vec<f64>,
    lag: Vec<f64>,
}

impl TimeOffsetTaps {
    pub fn new(time_offset_frac: f64, pulse: &PulseShape) -> Result<Self, ImpairmentError> {
        if !(time_offset_frac.abs() <= 0.5) {
            return Err(ImpairmentError::TimeOffsetRange(time_offset_frac));
        }
        let l = pulse.truncation_symbols as isize;
        let half = time_offset_frac / 2.0;
        let weight = |shift: f64| {
            (-l..=l)
                .map(|d| if d == 0 { 0.0 } else { pulse.eval(d as f64 + shift) })
                .collect::<Vec<_>>()
        };
        Ok(Self {
            time_offset_frac,
            truncation: pulse.truncation_symbols,
            signal_gain: pulse.eval(half),
            lead: weight(half),
            lag: weight(-half),
        })
    }

    pub fn time_offset_frac(&self) -> f64 {
        self.time_offset_frac
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `p(Δt/2)`.
    pub fn signal_gain(&self) -> f64 {
        self.signal_gain
    }

    /// Weights `p(dT + Δt/2)` applied to node 1 neighbours, `d = −L..=L`.
    pub fn lead(&self) -> &[f64] {
        &self.lead
    }

    /// Weights `p(dT − Δt/2)` applied to node 3 neighbours, `d = −L..=L`.
    pub fn lag(&self) -> &[f64] {
        &self.lag
    }

    /// Sample at symbol `k` of the padded sequences; callers guarantee that
    /// `k ± L` is in range.
    fn sample_unchecked(&self, a1: &[f64], a3: &[f64], k: usize) -> f64 {
        let l = self.truncation;
        let mut isi = 0.0;
        for (idx, (w1, w3)) in self.lead.iter().zip(&self.lag).enumerate() {
            // idx = d + L, neighbour index k - d = k + L - idx
            let n = k + l - idx;
            isi += a1[n] * w1 + a3[n] * w3;
        }
        0.5 * ((a1[k] + a3[k]) * self.signal_gain + isi)
    }

    /// Sample at symbol `k`, requiring the full `±L` window inside the
    /// sequences.
    pub fn sample(&self, a1: &[f64], a3: &[f64], k: usize) -> Result<f64, ImpairmentError> {
        if a1.len() != a3.len() {
            return Err(ImpairmentError::LengthMismatch(a1.len(), a3.len()));
        }
        let window = self.truncation;
        if k < window || k + window >= a1.len() {
            return Err(ImpairmentError::IndexOutOfRange {
                index: k,
                window,
                len: a1.len(),
            });
        }
        Ok(self.sample_unchecked(a1, a3, k))
    }

    /// Samples a whole frame, treating symbols outside it as zero.
    pub fn sample_frame(&self, a1: &[f64], a3: &[f64]) -> Result<Vec<f64>, ImpairmentError> {
        if a1.len() != a3.len() {
            return Err(ImpairmentError::LengthMismatch(a1.len(), a3.len()));
        }
        let l = self.truncation;
        let pad = |a: &[f64]| {
            let mut v = vec![0.0; a.len() + 2 * l];
            v[l..l + a.len()].copy_from_slice(a);
            v
        };
        let (p1, p3) = (pad(a1), pad(a3));
        Ok((0..a1.len())
            .map(|k| self.sample_unchecked(&p1, &p3, k + l))
            .collect())
    }
}

/// Mid-offset sample of symbol `k` with ISI truncated to `|k − l| ≤ L`.
pub fn sample_with_time_offset(
    a1: &[f64],
    a3: &[f64],
    k: usize,
    offsets: &SyncOffsets,
    pulse: &PulseShape,
) -> Result<f64, ImpairmentError> {
    TimeOffsetTaps::new(offsets.time_offset_frac, pulse)?.sample(a1, a3, k)
}

/// Noise variance per real dimension for unit-amplitude symbols.
pub fn noise_var_for_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Draws one standard normal sample per dimension scaled by `√noise_var`.
pub fn add_awgn<R: Rng + ?Sized>(
    clean: Complex64,
    noise_var: f64,
    rng: &mut R,
) -> Result<Observation, ImpairmentError> {
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(ImpairmentError::NoiseVariance(noise_var));
    }
    let sigma = noise_var.sqrt();
    let ni: f64 = rng.sample(StandardNormal);
    let nq: f64 = rng.sample(StandardNormal);
    Ok(Observation {
        i_sample: clean.re + sigma * ni,
        q_sample: clean.im + sigma * nq,
        noise_var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const QPSK: [Complex64; 4] = [
        Complex64::new(1.0, 1.0),
        Complex64::new(-1.0, 1.0),
        Complex64::new(1.0, -1.0),
        Complex64::new(-1.0, -1.0),
    ];

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn fold_examples() {
        assert_eq!(fold_phase(0.0).unwrap(), (0.0, 0));
        let (t, k) = fold_phase(FRAC_PI_2).unwrap();
        assert!(t.abs() < 1e-15);
        assert_eq!(k, 1);
        let (t, k) = fold_phase(3.0 * PI / 8.0).unwrap();
        assert!((t + PI / 8.0).abs() < 1e-15);
        assert_eq!(k, 1);
        assert!(fold_phase(f64::NAN).is_err());
        assert!(fold_phase(f64::INFINITY).is_err());
    }

    #[test]
    fn fold_boundaries() {
        let (t, k) = fold_phase(FRAC_PI_4).unwrap();
        assert!((t + FRAC_PI_4).abs() < 1e-15);
        assert_eq!(k, 1);
        let (t, k) = fold_phase(-FRAC_PI_4).unwrap();
        assert_eq!((t, k), (-FRAC_PI_4, 0));
        let (_, k) = fold_phase(-FRAC_PI_2).unwrap();
        assert_eq!(k, 3);
        let (t, k) = fold_phase(-100.0).unwrap();
        assert!((-FRAC_PI_4..FRAC_PI_4).contains(&t));
        assert!(k < 4);
    }

    #[test]
    fn rotate_examples() {
        let one_j = Complex64::new(1.0, 1.0);
        assert_eq!(rotate_symbol(one_j, 0), one_j);
        assert_eq!(rotate_symbol(one_j, 1), Complex64::new(-1.0, 1.0));
        assert_eq!(rotate_symbol(-one_j, 2), one_j);
        for s in QPSK {
            for k in 0..4u8 {
                let r = rotate_symbol(s, k);
                assert!(QPSK.contains(&r));
                assert_eq!(rotate_symbol(r, (4 - k) % 4), s);
                assert!(close(r, s * Complex64::from_polar(1.0, k as f64 * FRAC_PI_2), 1e-15));
            }
        }
    }

    #[test]
    fn superpose_examples() {
        let one_j = Complex64::new(1.0, 1.0);
        assert_eq!(superpose_phase_offset(one_j, one_j, 0.0), Complex64::new(2.0, 2.0));
        assert_eq!(superpose_phase_offset(one_j, -one_j, 0.0), Complex64::new(0.0, 0.0));
        // (1+j)·e^{jπ/4} = √2·j
        let r = superpose_phase_offset(one_j, one_j, FRAC_PI_4);
        assert!(close(r, Complex64::new(1.0, 1.0 + 2f64.sqrt()), 1e-12));
    }

    #[test]
    fn superposition_commutes_with_folding() {
        for s1 in QPSK {
            for s3 in QPSK {
                for i in -40..=40 {
                    let theta = i as f64 * 0.17;
                    let (folded, k) = fold_phase(theta).unwrap();
                    let a = superpose_phase_offset(s1, rotate_symbol(s3, k), folded);
                    let b = superpose_phase_offset(s1, s3, theta);
                    assert!(close(a, b, 1e-12), "theta {theta}");
                }
            }
        }
    }

    #[test]
    fn raised_cosine_examples() {
        for beta in [0.0, 0.25, 0.5, 1.0] {
            assert_eq!(raised_cosine(0.0, 1.0, beta), 1.0);
            for k in 1..=10 {
                assert!(raised_cosine(k as f64, 1.0, beta).abs() < 1e-12);
                assert!(raised_cosine(-(k as f64), 1.0, beta).abs() < 1e-12);
            }
        }
        // Scaled period.
        assert!(raised_cosine(2e-3, 1e-3, 0.5).abs() < 1e-12);
        assert_eq!(raised_cosine(0.0, 1e-3, 0.5), 1.0);
    }

    #[test]
    fn raised_cosine_singularity_matches_neighbourhood() {
        for beta in [0.25, 0.5, 0.75, 1.0] {
            let edge = 1.0 / (2.0 * beta);
            let at = raised_cosine(edge, 1.0, beta);
            let below = raised_cosine(edge * (1.0 - 1e-6), 1.0, beta);
            let above = raised_cosine(edge * (1.0 + 1e-6), 1.0, beta);
            assert!((at - below).abs() < 1e-5, "beta {beta}: {at} vs {below}");
            assert!((at - above).abs() < 1e-5, "beta {beta}: {at} vs {above}");
            assert_eq!(raised_cosine(-edge, 1.0, beta), at);
        }
        assert!(raised_cosine(1.0, 1.0, 0.5).abs() < 1e-12);
    }

    #[test]
    fn pulse_validation() {
        assert!(PulseShape::new(-0.1, 16).is_err());
        assert!(PulseShape::new(1.1, 16).is_err());
        assert!(PulseShape::new(0.5, 0).is_err());
        assert_eq!(PulseShape::default().rolloff(), 0.5);
        assert_eq!(PulseShape::default().truncation_symbols(), 16);
    }

    #[test]
    fn offsets_validation() {
        assert!(SyncOffsets::time_only(0.6).is_err());
        assert!(SyncOffsets::time_only(-0.5).is_ok());
        assert_eq!(
            SyncOffsets::new(0.1, 0.0, 0.2, 1.0),
            Err(ImpairmentError::MixedImpairments)
        );
        assert!(SyncOffsets::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SyncOffsets::phase_only(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn phase_ramp_folds_each_symbol() {
        let off = SyncOffsets::phase_only(0.1, 0.3).unwrap();
        let ramp = off.phase_ramp(50);
        for (k, &(t, q)) in ramp.iter().enumerate() {
            assert!((-FRAC_PI_4..FRAC_PI_4).contains(&t));
            let back = t + q as f64 * FRAC_PI_2;
            let diff = (back - off.phase_at(k)).rem_euclid(2.0 * PI);
            assert!(diff < 1e-9 || 2.0 * PI - diff < 1e-9);
        }
    }

    fn ones(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn zero_offset_has_no_isi() {
        let pulse = PulseShape::default();
        let off = SyncOffsets::time_only(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a1: Vec<f64> = (0..40).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        let mut a3: Vec<f64> = (0..40).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        a1[20] = 1.0;
        a3[20] = 1.0;
        let v = sample_with_time_offset(&a1, &a3, 20, &off, &pulse).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        a3[20] = -1.0;
        let v = sample_with_time_offset(&a1, &a3, 20, &off, &pulse).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn window_must_fit() {
        let pulse = PulseShape::default();
        let off = SyncOffsets::time_only(0.2).unwrap();
        let a = ones(33);
        assert!(sample_with_time_offset(&a, &a, 16, &off, &pulse).is_ok());
        assert!(matches!(
            sample_with_time_offset(&a, &a, 15, &off, &pulse),
            Err(ImpairmentError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            sample_with_time_offset(&a, &a, 17, &off, &pulse),
            Err(ImpairmentError::IndexOutOfRange { .. })
        ));
        assert!(sample_with_time_offset(&a, &a[..32], 16, &off, &pulse).is_err());
    }

    /// Source 3 arrives `Δt` after source 1. Sums both pulse trains directly
    /// at the midpoint instant `kT + Δt/2`, without the tap tables.
    fn waveform_oracle(a1: &[f64], a3: &[f64], k: usize, dt: f64, beta: f64, window: usize) -> f64 {
        let t = k as f64 + dt / 2.0;
        let mut v = 0.0;
        for l in k - window..=k + window {
            v += a1[l] * raised_cosine(t - l as f64, 1.0, beta);
            v += a3[l] * raised_cosine(t - l as f64 - dt, 1.0, beta);
        }
        0.5 * v
    }

    #[test]
    fn half_symbol_offset_matches_waveform_synthesis() {
        let pulse = PulseShape::new(0.5, 16).unwrap();
        let off = SyncOffsets::time_only(0.5).unwrap();
        let a = ones(41);
        let v = sample_with_time_offset(&a, &a, 20, &off, &pulse).unwrap();
        let oracle = waveform_oracle(&a, &a, 20, 0.5, 0.5, 16);
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a1: Vec<f64> = (0..41).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        let a3: Vec<f64> = (0..41).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        for dt in [-0.5, -0.3, 0.1, 0.45] {
            let off = SyncOffsets::time_only(dt).unwrap();
            let v = sample_with_time_offset(&a1, &a3, 20, &off, &pulse).unwrap();
            let oracle = waveform_oracle(&a1, &a3, 20, dt, 0.5, 16);
            assert!((v - oracle).abs() < 1e-12, "dt {dt}: {v} vs {oracle}");
        }
    }

    #[test]
    fn truncation_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 161;
        let a1: Vec<f64> = (0..n).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        let a3: Vec<f64> = (0..n).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
        let off = SyncOffsets::time_only(0.5).unwrap();
        let at = |l: usize| {
            sample_with_time_offset(&a1, &a3, 80, &off, &PulseShape::new(0.5, l).unwrap()).unwrap()
        };
        let mut prev = f64::INFINITY;
        for l in [2, 4, 8, 16] {
            let d = (at(l) - at(2 * l)).abs();
            assert!(d <= prev + 1e-15);
            prev = d;
        }
        // tails decay like 1/x³
        assert!((at(16) - at(32)).abs() < 1e-3);
    }

    #[test]
    fn frame_sampling_pads_with_zeros() {
        let pulse = PulseShape::default();
        let taps = TimeOffsetTaps::new(0.3, &pulse).unwrap();
        let a1 = vec![1.0, -1.0, 1.0];
        let a3 = vec![-1.0, -1.0, 1.0];
        let frame = taps.sample_frame(&a1, &a3).unwrap();
        let mut p1 = vec![0.0; 16];
        p1.extend(&a1);
        p1.extend(vec![0.0; 16]);
        let mut p3 = vec![0.0; 16];
        p3.extend(&a3);
        p3.extend(vec![0.0; 16]);
        let off = SyncOffsets::time_only(0.3).unwrap();
        for (k, v) in frame.iter().enumerate() {
            let direct = sample_with_time_offset(&p1, &p3, k + 16, &off, &pulse).unwrap();
            assert_eq!(*v, direct);
        }
    }

    #[test]
    fn awgn_zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = add_awgn(Complex64::new(2.0, 2.0), 0.0, &mut rng).unwrap();
        assert_eq!(obs, Observation { i_sample: 2.0, q_sample: 2.0, noise_var: 0.0 });
        assert!(add_awgn(Complex64::new(0.0, 0.0), -1.0, &mut rng).is_err());
    }

    #[test]
    fn awgn_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let clean = Complex64::new(2.0, -2.0);
        let (mut si, mut sq, mut sii) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let o = add_awgn(clean, 1.0, &mut rng).unwrap();
            si += o.i_sample;
            sq += o.q_sample;
            sii += (o.i_sample - clean.re).powi(2);
        }
        let tol = 3.0 / (n as f64).sqrt();
        assert!((si / n as f64 - clean.re).abs() < tol);
        assert!((sq / n as f64 - clean.im).abs() < tol);
        assert!((sii / n as f64 - 1.0).abs() < 0.05);
    }

    #[test]
    fn awgn_is_deterministic_per_stream() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..10)
                .map(|_| add_awgn(Complex64::new(0.0, 0.0), 0.5, &mut rng).unwrap().i_sample)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }
}
