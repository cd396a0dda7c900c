//! Deterministic parallel Monte-Carlo execution.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(master seed, point index, trial index)`. Trials run in fixed-size
//! batches; the stop rule is checked between batches only, so results do not
//! depend on how many workers execute a batch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

/// Trial budget and stop rule of one simulation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Upper limit on trials.
    pub max_trials: u64,
    /// Stop once this many word errors were seen.
    pub target_errors: u64,
    /// Trials per batch.
    pub batch: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_trials: 10_000,
            target_errors: 100,
            batch: 1_000,
        }
    }
}

fn splitmix(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed ^ point.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Outcome of a single coded trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Information bits in error.
    pub bit_errors: u64,
    /// Information bits sent.
    pub bits: u64,
}

/// Error counts of a simulation point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    /// Trials run.
    pub trials: u64,
    /// Trials with at least one information-bit error.
    pub word_errors: u64,
    /// Information-bit errors.
    pub bit_errors: u64,
    /// Information bits sent.
    pub bits: u64,
}

impl Counts {
    fn add(self, o: Counts) -> Counts {
        Counts {
            trials: self.trials + o.trials,
            word_errors: self.word_errors + o.word_errors,
            bit_errors: self.bit_errors + o.bit_errors,
            bits: self.bits + o.bits,
        }
    }

    /// Word error rate.
    pub fn wer(&self) -> f64 {
        ratio(self.word_errors, self.trials)
    }

    /// Bit error rate.
    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits)
    }

    /// Normal-approximation 95% half-width of the WER.
    pub fn wer_half_width(&self) -> f64 {
        half_width(self.wer(), self.trials)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// `1.96·sqrt(p(1-p)/n)`.
pub fn half_width(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Worker pool with `threads` workers (0 = one per core).
pub fn pool(threads: usize) -> crate::Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

/// Runs trials until the budget or the error target is reached.
///
/// `init` builds a per-worker workspace; `trial` returns the outcome of one
/// trial from its own random stream.
pub fn run_point<W, I, T>(pool: &ThreadPool, budget: &Budget, seed: u64, point: u64, init: I, trial: T) -> Counts
where
    I: Fn() -> W + Sync + Send,
    T: Fn(&mut W, &mut ChaCha8Rng) -> TrialOutcome + Sync + Send,
{
    let batch = budget.batch.max(1);
    let mut total = Counts::default();
    while total.trials < budget.max_trials && total.word_errors < budget.target_errors {
        let start = total.trials;
        let end = (start + batch).min(budget.max_trials);
        let counts = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(&init, |w, t| {
                    let mut rng = trial_rng(seed, point, t);
                    let o = trial(w, &mut rng);
                    Counts {
                        trials: 1,
                        word_errors: u64::from(o.bit_errors > 0),
                        bit_errors: o.bit_errors,
                        bits: o.bits,
                    }
                })
                .reduce(Counts::default, Counts::add)
        });
        total = total.add(counts);
    }
    total
}

/// Runs exactly `trials` trials and folds their per-trial outputs in trial
/// order, so floating-point accumulation is reproducible.
pub fn run_ordered<W, I, T, A, F, O>(
    pool: &ThreadPool,
    trials: u64,
    batch: u64,
    seed: u64,
    point: u64,
    init: I,
    trial: T,
    mut acc: A,
    mut fold: F,
) -> A
where
    I: Fn() -> W + Sync + Send,
    T: Fn(&mut W, &mut ChaCha8Rng) -> O + Sync + Send,
    O: Send,
    F: FnMut(&mut A, O),
{
    let batch = batch.max(1);
    let mut start = 0;
    while start < trials {
        let end = (start + batch).min(trials);
        let outs: Vec<O> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(&init, |w, t| {
                    let mut rng = trial_rng(seed, point, t);
                    trial(w, &mut rng)
                })
                .collect()
        });
        for o in outs {
            fold(&mut acc, o);
        }
        start = end;
    }
    acc
}
