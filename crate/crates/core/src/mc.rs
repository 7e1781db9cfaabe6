//! Monte-Carlo outage estimation straight from the capacity expressions.
//!
//! Samples are split into fixed blocks and block `b` draws from ChaCha8
//! stream `b` under the base seed, so the estimate depends only on
//! `(base_seed, n_samples)` and never on how blocks land on workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outage::{Direction, LinkScenario, Method, OutageResult, Power, Scheme, User};

/// Samples per random stream.
pub const BLOCK_SIZE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub n_samples: u64,
    pub base_seed: u64,
    pub n_workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 1_000_000,
            base_seed: 0x5eed_0f0a_7a9e,
            n_workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Contract("monte carlo needs at least one sample".into()));
        }
        if self.n_workers == 0 {
            return Err(Error::Contract("monte carlo needs at least one worker".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub result: OutageResult,
    /// Binomial standard error √(p(1−p)/n).
    pub std_error: f64,
    pub outages: u64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn probability(&self) -> f64 {
        self.result.probability
    }

    fn from_counts(outages: u64, n_samples: u64) -> Self {
        let p = outages as f64 / n_samples as f64;
        McEstimate {
            result: OutageResult {
                probability: p,
                method: Method::MonteCarlo,
                terms_used: None,
                truncation_bound: 0.0,
                infeasible: false,
            },
            std_error: (p * (1.0 - p) / n_samples as f64).sqrt(),
            outages,
            n_samples,
        }
    }
}

/// Counts how many of `cfg.n_samples` trials report an event.
///
/// `trial` receives the stream for the current block and must consume a
/// fixed pattern of draws per call for results to be reproducible.
pub fn count_events<F>(cfg: &McConfig, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    cfg.validate()?;
    let n_blocks = cfg.n_samples.div_ceil(BLOCK_SIZE);
    let run_block = |b: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
        rng.set_stream(b);
        let len = BLOCK_SIZE.min(cfg.n_samples - b * BLOCK_SIZE);
        (0..len).filter(|_| trial(&mut rng)).count() as u64
    };
    let outages = if cfg.n_workers == 1 {
        (0..n_blocks).map(run_block).sum()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.n_workers)
            .build()
            .map_err(|e| Error::Contract(format!("worker pool: {e}")))?;
        pool.install(|| (0..n_blocks).into_par_iter().map(run_block).sum())
    };
    Ok(McEstimate::from_counts(outages, cfg.n_samples))
}

/// Spectral efficiency of `user` for one draw of the fading gains `[near, far]`.
pub fn capacity(scn: &LinkScenario, user: User, fading: [f64; 2]) -> f64 {
    let rx = |i: usize, p: f64| p * scn.gains[i] * fading[i];
    let i = user.index();
    match (scn.scheme, scn.direction, scn.power) {
        (Scheme::Oma, _, power) => 0.5 * rx(i, power.orthogonal(user)).ln_1p() / std::f64::consts::LN_2,
        (Scheme::Noma, Direction::Downlink, Power::Downlink { total, near_share }) => {
            let (a1, a2) = (near_share, 1.0 - near_share);
            let sinr = match user {
                User::Near => rx(0, a1 * total),
                User::Far => rx(1, a2 * total) / (rx(1, a1 * total) + 1.0),
            };
            sinr.ln_1p() / std::f64::consts::LN_2
        }
        (Scheme::Noma, Direction::Uplink, Power::Uplink { near, far }) => {
            let sinr = match user {
                User::Near => rx(0, near) / (rx(1, far) + 1.0),
                User::Far => rx(1, far),
            };
            sinr.ln_1p() / std::f64::consts::LN_2
        }
        _ => f64::NAN,
    }
}

/// Fraction of fading draws for which `user` falls short of the target rate.
pub fn simulate_outage(scn: &LinkScenario, user: User, cfg: &McConfig) -> Result<McEstimate> {
    scn.validate()?;
    let [f_near, f_far] = scn.fading;
    let target = scn.target_rate;
    count_events(cfg, |rng| {
        let draw = [f_near.sample(rng), f_far.sample(rng)];
        capacity(scn, user, draw) < target
    })
}
