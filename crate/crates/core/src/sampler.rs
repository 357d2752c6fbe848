//! Measurement simulation.
//!
//! A shot on `G^k|Φ⟩` yields the good state with probability
//! `sin²((2k+1)θ_a)`, so the simulator draws Bernoulli samples with that
//! probability instead of evolving a state vector.
//!
//! Streams are ChaCha8 generators. [`derive_stream`] expands the master seed
//! into a 256-bit key with four SplitMix64 steps and uses the task index as
//! the ChaCha stream id, so every `(master_seed, task_index)` pair owns an
//! independent, order-free sequence.

use std::cell::Cell;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::estimation::{theta_of_amplitude, Amplitude};

/// Name of the generator and key schedule, recorded in output metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9); key = 4 x SplitMix64(master_seed); stream id = task_index";

/// A private random stream owned by one task.
#[derive(Debug, Clone)]
pub struct ShotStream {
    rng: ChaCha8Rng,
}

impl ShotStream {
    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream for task `task_index` of the campaign seeded by `master_seed`.
pub fn derive_stream(master_seed: u64, task_index: u64) -> ShotStream {
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(task_index);
    ShotStream { rng }
}

/// Seed bookkeeping surfaced in output metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master_seed: u64,
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        SeedPlan { master_seed }
    }

    pub fn stream(&self, task_index: u64) -> ShotStream {
        derive_stream(self.master_seed, task_index)
    }

    pub fn derivation(&self) -> &'static str {
        RNG_ALGORITHM
    }
}

/// Source of measurement outcomes for a given Grover number.
pub trait AmplitudeOracle {
    /// Number of good outcomes among `n` shots on `G^k|Φ⟩`. Always `<= n`.
    fn sample(&self, k: u64, n: u64, stream: &mut ShotStream) -> u64;
}

/// Bernoulli simulator holding the hidden amplitude.
#[derive(Debug, Clone, Copy)]
pub struct BernoulliOracle {
    amplitude: Amplitude,
    theta: f64,
}

impl BernoulliOracle {
    pub fn new(amplitude: Amplitude) -> Self {
        BernoulliOracle {
            amplitude,
            theta: theta_of_amplitude(amplitude).value(),
        }
    }

    pub fn amplitude(&self) -> Amplitude {
        self.amplitude
    }

    #[inline]
    fn success_probability(&self, k: u64) -> f64 {
        if k == 0 {
            return self.amplitude.value();
        }
        let s = ((2 * k + 1) as f64 * self.theta).sin();
        s * s
    }
}

impl AmplitudeOracle for BernoulliOracle {
    #[inline]
    fn sample(&self, k: u64, n: u64, stream: &mut ShotStream) -> u64 {
        let p = self.success_probability(k);
        (0..n).filter(|_| stream.next_unit() < p).count() as u64
    }
}

/// Replays a fixed outcome sequence, ignoring `k` and the stream.
///
/// Panics when asked for more outcomes than it holds.
#[derive(Debug)]
pub struct ScriptedOracle {
    outcomes: Vec<bool>,
    cursor: Cell<usize>,
}

impl ScriptedOracle {
    pub fn new(outcomes: Vec<bool>) -> Self {
        ScriptedOracle {
            outcomes,
            cursor: Cell::new(0),
        }
    }

    pub fn consumed(&self) -> usize {
        self.cursor.get()
    }
}

impl AmplitudeOracle for ScriptedOracle {
    fn sample(&self, _k: u64, n: u64, _stream: &mut ShotStream) -> u64 {
        let start = self.cursor.get();
        let end = start + n as usize;
        assert!(end <= self.outcomes.len(), "scripted outcomes exhausted");
        self.cursor.set(end);
        self.outcomes[start..end].iter().filter(|&&b| b).count() as u64
    }
}

/// Running totals of oracle usage. One shot at Grover number `k` costs `k`
/// applications of `G` and one state preparation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub grover_calls: u64,
    pub state_preparations: u64,
}

impl QueryLedger {
    pub fn record(&mut self, k: u64, n: u64) {
        self.grover_calls += k * n;
        self.state_preparations += n;
    }

    pub fn merge(&mut self, other: &QueryLedger) {
        self.grover_calls += other.grover_calls;
        self.state_preparations += other.state_preparations;
    }
}

/// Draws `n` shots at Grover number `k` and charges them to `ledger`.
#[inline]
pub fn sample_shots<O: AmplitudeOracle + ?Sized>(
    oracle: &O,
    k: u64,
    n: u64,
    stream: &mut ShotStream,
    ledger: &mut QueryLedger,
) -> u64 {
    let hits = oracle.sample(k, n, stream);
    debug_assert!(hits <= n);
    ledger.record(k, n);
    hits
}
