//! Classical simulation of iterative quantum amplitude estimation (IQAE)
//! and tools to measure and explain the bias of its estimate.
//!
//! * [`estimation`]: amplitude/angle maps, confidence intervals, shot budgets.
//! * [`sampler`]: Bernoulli measurement oracle, seeded streams, query ledger.
//! * [`engine`]: the modified IQAE algorithm and its re-execution variant.
//! * [`harness`]: bias sweeps, decomposition over the final Grover number,
//!   conditional bias, resonance detection and final-round scatter.

pub mod engine;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod sampler;
pub mod stats;

pub use engine::{
    find_next_k, reexecuted_estimate, run_iqae, run_mitigated, run_round, IqaeConfig,
    ReexecutedRound, RoundExit, RoundTrace, RunResult,
};
pub use error::{IqaeError, Result};
pub use estimation::{
    amplitude_of_theta, ci_from_counts, gamma, grover_amplitude, hoeffding_halfwidth, k_max,
    max_shots, round_alpha, theta_of_amplitude, Amplitude, Angle, ConfidenceInterval,
    IntervalDomain, RoundEstimate, RoundParams,
};
pub use harness::{
    cond_bias_grid, conditional_bias, decompose_bias, detect_resonance, f_fin, scatter_kfin_ffin,
    sweep_bias, BiasRow, CondBiasCell, KfinGroup, Resonance, ScatterRecord,
};
pub use sampler::{
    derive_stream, sample_shots, AmplitudeOracle, BernoulliOracle, QueryLedger, ScriptedOracle,
    SeedPlan, ShotStream, RNG_ALGORITHM,
};

/// Crate version, embedded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
