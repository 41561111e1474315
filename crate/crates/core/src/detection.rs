//! Relay-side detection of the XOR bits.
//!
//! The threshold rule decides each dimension independently from the level
//! lattice `{0, ±2·scale}`. The ML rule scores the four XOR classes by their
//! exact Gaussian-mixture likelihood over the superimposed constellation for a
//! known phase offset.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use thiserror::Error;

use crate::impairments::{superpose_phase_offset, Observation};
use crate::mapping::{qpsk_modulate, BitPair};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("phase {0} outside the folded range [-π/4, π/4]")]
    PhaseOutOfRange(f64),
}

/// The 16 noiseless superpositions `s1 + s3·e^{jθ}`, grouped by `s1 ⊕ s3`.
#[derive(Debug, Clone, PartialEq)]
pub struct XorHypothesisSet {
    theta: f64,
    /// `classes[c]` holds the points of XOR class `c` (see [`BitPair::index`]).
    classes: [[Complex64; 4]; 4],
}

impl XorHypothesisSet {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn class_points(&self, class: BitPair) -> &[Complex64; 4] {
        &self.classes[class.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitPair, Complex64)> + '_ {
        self.classes.iter().enumerate().flat_map(|(c, pts)| {
            pts.iter().map(move |&p| (BitPair::from_index(c), p))
        })
    }

    /// Smallest squared distance between points of different classes.
    pub fn min_inter_class_distance_sq(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (ci, pi) in self.iter() {
            for (cj, pj) in self.iter() {
                if ci != cj {
                    best = best.min((pi - pj).norm_sqr());
                }
            }
        }
        best
    }

    /// Per-class log-likelihoods `ln Σ_p exp(−|r − p|²/(2σ²))`, up to the
    /// common normalizing constant.
    pub fn class_log_likelihoods(&self, r: Complex64, noise_var: f64) -> [f64; 4] {
        let scale = 0.5 / noise_var;
        self.classes
            .map(|pts| log_sum_exp(pts.map(|p| -(r - p).norm_sqr() * scale)))
    }
}

/// Overflow-safe `ln Σ exp(x_i)`.
pub fn log_sum_exp<const N: usize>(xs: [f64; N]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Accepts rounding overshoot from callers that compute `π/4` arithmetically.
const PHASE_SLACK: f64 = 1e-12;

/// Enumerates the superimposed constellation at phase offset `theta`.
pub fn build_hypotheses(theta: f64) -> Result<XorHypothesisSet, DetectionError> {
    if !(theta.abs() <= FRAC_PI_4 + PHASE_SLACK) {
        return Err(DetectionError::PhaseOutOfRange(theta));
    }
    let theta = theta.clamp(-FRAC_PI_4, FRAC_PI_4);
    let mut classes = [[Complex64::new(0.0, 0.0); 4]; 4];
    let mut fill = [0usize; 4];
    for s1 in BitPair::all() {
        for s3 in BitPair::all() {
            let c = (s1 ^ s3).index();
            classes[c][fill[c]] = superpose_phase_offset(
                qpsk_modulate(s1).to_complex(),
                qpsk_modulate(s3).to_complex(),
                theta,
            );
            fill[c] += 1;
        }
    }
    Ok(XorHypothesisSet { theta, classes })
}

/// Per-dimension threshold rule: bit 0 when `|sample| > scale`, else 1.
pub fn detect_threshold(obs: &Observation, scale: f64) -> BitPair {
    BitPair::from_bools(obs.i_sample.abs() <= scale, obs.q_sample.abs() <= scale)
}

/// Maximum-likelihood XOR class with uniform priors. Ties go to the smallest
/// class index. With zero noise variance the class of the nearest point wins.
pub fn detect_ml_xor(obs: &Observation, hyp: &XorHypothesisSet) -> BitPair {
    let r = obs.sample();
    let scores = if obs.noise_var > 0.0 {
        hyp.class_log_likelihoods(r, obs.noise_var)
    } else {
        hyp.classes
            .map(|pts| pts.iter().map(|&p| -(r - p).norm_sqr()).fold(f64::NEG_INFINITY, f64::max))
    };
    let mut best = 0;
    for c in 1..4 {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    BitPair::from_index(best)
}
