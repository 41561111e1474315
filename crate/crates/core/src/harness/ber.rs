//! Monte-Carlo XOR bit-error rate at the relay.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::detection::{build_hypotheses, detect_ml_xor, detect_threshold};
use crate::impairments::{
    add_awgn, fold_phase, noise_var_for_snr_db, rotate_symbol, superpose_phase_offset, Observation, PulseShape,
    TimeOffsetTaps,
};
use crate::mapping::{qpsk_modulate, BitPair, QpskSymbol};
use crate::runner::{run_batches, Scenario};

use super::HarnessError;

/// Symbols per work unit. A multiple of the default frame length.
pub const BER_BATCH_SYMBOLS: u64 = 100_000;

pub const BER_HEADER: &str = "snr_db,scenario,ber,num_bits,num_errors,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    pub snr_db: f64,
    pub scenario: Scenario,
    pub ber: f64,
    pub num_bits: u64,
    pub num_errors: u64,
    pub seed: u64,
}

/// What [`run_ber`] needs besides the SNR grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerSpec {
    pub scenario: Scenario,
    /// Rounded up to whole symbols (2 XOR bits each).
    pub bits_per_point: u64,
    pub frame_len: usize,
    pub pulse: PulseShape,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Count {
    bits: u64,
    errors: u64,
}

fn random_pair(rng: &mut ChaCha8Rng) -> BitPair {
    BitPair::from_index(rng.gen_range(0..4))
}

fn frames(symbols: u64, frame_len: usize) -> impl Iterator<Item = usize> {
    let f = frame_len as u64;
    (0..symbols.div_ceil(f)).map(move |i| (symbols - i * f).min(f) as usize)
}

fn count_perfect(noise_var: f64, symbols: u64, rng: &mut ChaCha8Rng) -> Count {
    let mut c = Count::default();
    for _ in 0..symbols {
        let (s1, s3) = (random_pair(rng), random_pair(rng));
        let clean = qpsk_modulate(s1).to_complex() + qpsk_modulate(s3).to_complex();
        let obs = add_awgn(clean, noise_var, rng).expect("validated noise variance");
        c.errors += u64::from(detect_threshold(&obs, 1.0).hamming(s1 ^ s3));
        c.bits += 2;
    }
    c
}

fn count_phase(
    noise_var: f64,
    max_phase: f64,
    symbols: u64,
    frame_len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Count, HarnessError> {
    let mut c = Count::default();
    for len in frames(symbols, frame_len) {
        let theta = if max_phase > 0.0 {
            rng.gen_range(-max_phase..max_phase)
        } else {
            0.0
        };
        // The relay knows θ and detects against the folded constellation,
        // which labels s1 ⊕ rot(s3).
        let (folded, quadrant) = fold_phase(theta)?;
        let hyp = build_hypotheses(folded)?;
        for _ in 0..len {
            let (s1, s3) = (random_pair(rng), random_pair(rng));
            let c3 = qpsk_modulate(s3).to_complex();
            let clean = superpose_phase_offset(qpsk_modulate(s1).to_complex(), c3, theta);
            let obs = add_awgn(clean, noise_var, rng)?;
            let seen = QpskSymbol::from_complex(rotate_symbol(c3, quadrant))
                .expect("rotation keeps QPSK points")
                .bits();
            c.errors += u64::from(detect_ml_xor(&obs, &hyp).hamming(s1 ^ seen));
            c.bits += 2;
        }
    }
    Ok(c)
}

fn signs(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn count_time(
    noise_var: f64,
    max_offset: f64,
    symbols: u64,
    frame_len: usize,
    pulse: &PulseShape,
    rng: &mut ChaCha8Rng,
) -> Result<Count, HarnessError> {
    let sigma = noise_var.sqrt();
    let mut c = Count::default();
    for len in frames(symbols, frame_len) {
        let dt = if max_offset > 0.0 {
            rng.gen_range(-max_offset..=max_offset)
        } else {
            0.0
        };
        let taps = TimeOffsetTaps::new(dt, pulse)?;
        let (a1i, a1q, a3i, a3q) = (signs(len, rng), signs(len, rng), signs(len, rng), signs(len, rng));
        let yi = taps.sample_frame(&a1i, &a3i)?;
        let yq = taps.sample_frame(&a1q, &a3q)?;
        // ×2 undoes the ½ of the two-source sum; levels sit at 0, ±2·p(Δt/2)
        let scale = taps.signal_gain();
        for k in 0..len {
            let ni: f64 = rng.sample(rand_distr::StandardNormal);
            let nq: f64 = rng.sample(rand_distr::StandardNormal);
            let obs = Observation {
                i_sample: 2.0 * yi[k] + sigma * ni,
                q_sample: 2.0 * yq[k] + sigma * nq,
                noise_var,
            };
            let truth = BitPair::from_bools(a1i[k] != a3i[k], a1q[k] != a3q[k]);
            c.errors += u64::from(detect_threshold(&obs, scale).hamming(truth));
            c.bits += 2;
        }
    }
    Ok(c)
}

/// Simulates XOR detection at the relay for every SNR point. Offsets are
/// drawn once per frame.
pub fn run_ber(spec: &BerSpec, snr_grid_db: &[f64]) -> Result<Vec<BerResult>, HarnessError> {
    if snr_grid_db.is_empty() {
        return Err(HarnessError::Config("snr_grid_db is empty".into()));
    }
    if spec.frame_len == 0 {
        return Err(HarnessError::Config("frame_len must be at least 1".into()));
    }
    let symbols = spec.bits_per_point.div_ceil(2);
    let units = run_batches(
        snr_grid_db.len(),
        symbols,
        BER_BATCH_SYMBOLS,
        spec.seed,
        spec.workers,
        |point, n, rng| -> Result<Count, HarnessError> {
            let noise_var = noise_var_for_snr_db(snr_grid_db[point]);
            match spec.scenario {
                Scenario::Perfect => Ok(count_perfect(noise_var, n, rng)),
                Scenario::PhaseUnsync { max_phase } => count_phase(noise_var, max_phase, n, spec.frame_len, rng),
                Scenario::TimeUnsync { max_offset } => {
                    count_time(noise_var, max_offset, n, spec.frame_len, &spec.pulse, rng)
                }
            }
        },
    )?;
    snr_grid_db
        .iter()
        .zip(units)
        .map(|(&snr_db, parts)| {
            let mut total = Count::default();
            for p in parts {
                let p = p?;
                total.bits += p.bits;
                total.errors += p.errors;
            }
            Ok(BerResult {
                snr_db,
                scenario: spec.scenario,
                ber: total.errors as f64 / total.bits as f64,
                num_bits: total.bits,
                num_errors: total.errors,
                seed: spec.seed,
            })
        })
        .collect()
}
