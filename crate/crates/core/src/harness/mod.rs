//! Monte Carlo campaigns over the engine.
//!
//! Every run of a campaign draws from its own stream, derived from the master
//! seed and a flattened task index. Runs execute in parallel on the current
//! rayon pool and are aggregated afterwards in index order, so every table
//! produced here depends on the seed and never on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::engine::{run_iqae, run_mitigated, IqaeConfig, RunResult};
use crate::error::Result;
use crate::estimation::{theta_of_amplitude, Amplitude};
use crate::sampler::{derive_stream, BernoulliOracle};

mod conditional;
mod decompose;
mod resonance;
mod scatter;
mod sweep;

pub use conditional::{
    adjusted_amplitude, cond_bias_grid, conditional_bias, reflection_correlation, AdjustedTarget,
    CellStatus, CondBiasCell, NAN_THRESHOLD_FRACTION,
};
pub use decompose::{decompose_bias, decompose_errors, weighted_mean_error, KfinGroup};
pub use resonance::{detect_resonance, Resonance};
pub use scatter::{occupied_bins, scatter_kfin_ffin, ScatterRecord};
pub use sweep::{bias_row, default_grid, linear_grid, sweep_bias, BiasRow};

/// `frac((2k+1) θ_a / π)`: where the final-round angle falls within a
/// half-period of `sin²`.
pub fn f_fin(a: Amplitude, k: u64) -> f64 {
    let x = (2 * k + 1) as f64 * theta_of_amplitude(a).value() / PI;
    x - x.floor()
}

/// Fills the fields of `result` that need the true amplitude.
pub fn annotate(result: &mut RunResult, a: Amplitude, epsilon: f64) {
    result.success = Some((result.a_hat - a.value()).abs() <= epsilon);
    result.f_fin = Some(f_fin(a, result.k_fin));
}

/// `n_run` independent runs at amplitude `a`, using task indices
/// `first_task .. first_task + n_run`. Results are annotated and returned in
/// task order.
pub fn run_campaign(
    a: Amplitude,
    config: &IqaeConfig,
    n_run: usize,
    mitigated: bool,
    master_seed: u64,
    first_task: u64,
) -> Vec<Result<RunResult>> {
    let oracle = BernoulliOracle::new(a);
    (0..n_run as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = derive_stream(master_seed, first_task + i);
            let mut result = if mitigated {
                run_mitigated(config, &oracle, &mut stream)?
            } else {
                run_iqae(config, &oracle, &mut stream)?
            };
            annotate(&mut result, a, config.epsilon);
            Ok(result)
        })
        .collect()
}
