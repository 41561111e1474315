//! Seeded work distribution for Monte-Carlo sweeps.
//!
//! Every (point, batch) work unit draws from its own ChaCha stream derived
//! from the master seed, and results come back in unit order. Output depends
//! on the seed only, never on how many workers ran the units.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Which synchronization error the relay is exposed to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Perfect,
    /// Phase offset uniform on `[−max_phase, max_phase)`, radians.
    PhaseUnsync { max_phase: f64 },
    /// Time offset uniform on `[−max_offset, max_offset]`, fraction of `T`.
    TimeUnsync { max_offset: f64 },
}

impl Scenario {
    pub const NO_PHASE_SYNC: Scenario = Scenario::PhaseUnsync { max_phase: FRAC_PI_4 };
    pub const NO_TIME_SYNC: Scenario = Scenario::TimeUnsync { max_offset: 0.5 };

    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Perfect => "perfect",
            Scenario::PhaseUnsync { .. } => "phase_unsync",
            Scenario::TimeUnsync { .. } => "time_unsync",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Perfect => write!(f, "perfect"),
            Scenario::PhaseUnsync { max_phase } if *max_phase == FRAC_PI_4 => write!(f, "phase_unsync"),
            Scenario::PhaseUnsync { max_phase } => write!(f, "phase_unsync({max_phase})"),
            Scenario::TimeUnsync { max_offset } => write!(f, "time_unsync({max_offset})"),
        }
    }
}

/// Stream for unit `(point, batch)` under `seed`.
pub fn stream_rng(seed: u64, point: usize, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | batch as u64);
    rng
}

/// Splits `total` into chunks of at most `batch`.
pub fn batch_sizes(total: u64, batch: u64) -> Vec<u64> {
    let batch = batch.max(1);
    let mut out = Vec::with_capacity((total / batch + 1) as usize);
    let mut left = total;
    while left > 0 {
        let n = left.min(batch);
        out.push(n);
        left -= n;
    }
    out
}

/// Runs `work(point, size, rng)` for every batch of every point on a pool of
/// `workers` threads. The outer vector is indexed by point, the inner by
/// batch, both in order.
pub fn run_batches<T, F>(
    points: usize,
    per_point: u64,
    batch: u64,
    seed: u64,
    workers: usize,
    work: F,
) -> Result<Vec<Vec<T>>, RunnerError>
where
    T: Send,
    F: Fn(usize, u64, &mut ChaCha8Rng) -> T + Sync,
{
    if workers == 0 {
        return Err(RunnerError::NoWorkers);
    }
    let sizes = batch_sizes(per_point, batch);
    let units: Vec<(usize, usize, u64)> = (0..points)
        .flat_map(|p| sizes.iter().enumerate().map(move |(b, &n)| (p, b, n)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let flat: Vec<T> = pool.install(|| {
        units
            .par_iter()
            .map(|&(p, b, n)| {
                let mut rng = stream_rng(seed, p, b);
                work(p, n, &mut rng)
            })
            .collect()
    });
    let mut out: Vec<Vec<T>> = (0..points).map(|_| Vec::with_capacity(sizes.len())).collect();
    for ((p, _, _), t) in units.into_iter().zip(flat) {
        out[p].push(t);
    }
    Ok(out)
}
