//! The modified IQAE algorithm, its next-Grover-number search, and the
//! variant that re-executes the final round.
//!
//! A run is a chain of rounds. Round `i` fixes a Grover number `k_i`, a
//! quadrant index `R_i` and a confidence budget `α_i`, then takes shots in
//! batches of `n_shot` until one of three things happens:
//!
//! * the estimated accuracy `Δa` drops to `ε` (the run returns `â`),
//! * [`find_next_k`] finds a larger Grover number whose scaled angle interval
//!   sits in a single quadrant (the next round starts there),
//! * the round's shot budget runs out (a fresh round starts with the same `k`).

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{IqaeError, Result};
use crate::estimation::{
    estimate_unchecked, k_max, quadrant_index, round_alpha, ConfidenceInterval, RoundEstimate,
    RoundParams,
};
use crate::sampler::{sample_shots, AmplitudeOracle, QueryLedger, ShotStream};

/// Execution policy of one IQAE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqaeConfig {
    /// Target accuracy ε.
    pub epsilon: f64,
    /// Failure budget α.
    pub alpha: f64,
    /// Shots per batch.
    pub n_shot: u64,
    /// Minimum growth ratio of `K = 2k+1` between rounds.
    pub r_min: f64,
    /// Safety cap on the number of rounds.
    pub max_rounds: usize,
}

impl Default for IqaeConfig {
    fn default() -> Self {
        IqaeConfig {
            epsilon: 1e-3,
            alpha: 0.05,
            n_shot: 1,
            r_min: 2.0,
            max_rounds: 10_000,
        }
    }
}

impl IqaeConfig {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        let config = IqaeConfig {
            epsilon,
            alpha,
            ..IqaeConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(IqaeError::InvalidConfig(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(IqaeError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.n_shot == 0 {
            return Err(IqaeError::InvalidConfig("n_shot must be at least 1".into()));
        }
        if self.r_min.is_nan() || self.r_min <= 1.0 || !self.r_min.is_finite() {
            return Err(IqaeError::InvalidConfig(format!(
                "r_min must be a finite number > 1, got {}",
                self.r_min
            )));
        }
        if self.max_rounds == 0 {
            return Err(IqaeError::InvalidConfig(
                "max_rounds must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / (4.0 * self.epsilon)
    }

    /// Initial `K` used by [`find_next_k`] when the angle interval has zero width.
    pub fn zero_width_cap(&self) -> u64 {
        2 * self.k_max().ceil() as u64 + 1
    }

    /// Confidence budget `α_i` of a round at Grover number `k`.
    pub fn round_alpha(&self, k: u64) -> Result<f64> {
        round_alpha(2 * k + 1, k_max(self.epsilon)?, self.alpha)
    }
}

/// How a round ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k_next", rename_all = "snake_case")]
pub enum RoundExit {
    Terminated,
    NextK(u64),
    BudgetExhausted,
}

/// State of one round at the moment it ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    /// 1-based round number.
    pub index: usize,
    pub k: u64,
    #[serde(rename = "R")]
    pub quadrant: u64,
    pub alpha_i: f64,
    pub n_max: u64,
    pub shots: u64,
    pub hits: u64,
    pub a_hat_k: f64,
    pub a_hat: f64,
    pub ci_a: ConfidenceInterval,
    pub ci_theta: ConfidenceInterval,
    pub delta_a: f64,
    pub grover_calls: u64,
    pub exit: RoundExit,
}

/// Extra round executed by [`run_mitigated`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReexecutedRound {
    pub shots: u64,
    pub hits: u64,
    pub grover_calls: u64,
}

/// Outcome of a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub a_hat: f64,
    /// `|â − a| ≤ ε`; only known when the caller knows `a`.
    pub success: Option<bool>,
    pub rounds: Vec<RoundTrace>,
    pub k_fin: u64,
    #[serde(rename = "N_fin")]
    pub n_fin: u64,
    #[serde(rename = "R_fin")]
    pub r_fin: u64,
    /// `frac((2k_fin+1)θ_a/π)`; only known when the caller knows `a`.
    pub f_fin: Option<f64>,
    pub total_grover_calls: u64,
    pub final_round_grover_calls: u64,
    pub ledger: QueryLedger,
    pub mitigated: bool,
    pub reexecuted_round: Option<ReexecutedRound>,
}

impl RunResult {
    pub fn final_round(&self) -> &RoundTrace {
        self.rounds.last().expect("a run has at least one round")
    }

    pub fn error(&self, a: f64) -> f64 {
        self.a_hat - a
    }
}

/// Largest Grover number whose scaled angle interval fits in one quadrant.
///
/// Starts at `K = ⌊(π/2)/(θ_hi − θ_lo)⌋` (made odd) and walks down in steps of
/// two while `K ≥ r_min (2k_i + 1)`. Returns `k_i` when no such `K` exists.
/// When the interval has zero width (or the start would not fit in the
/// integers exactly), the walk starts from `zero_width_cap` instead.
pub fn find_next_k(k_i: u64, theta_lo: f64, theta_hi: f64, r_min: f64, zero_width_cap: u64) -> u64 {
    let width = theta_hi - theta_lo;
    let start = FRAC_PI_2 / width;
    let mut big_k = if width > 0.0 && start < 9.0e15 {
        start.floor() as u64
    } else {
        zero_width_cap
    };
    if big_k.is_multiple_of(2) {
        if big_k == 0 {
            return k_i;
        }
        big_k -= 1;
    }
    let floor = r_min * (2 * k_i + 1) as f64;
    while big_k as f64 >= floor {
        let kf = big_k as f64;
        let lower_quadrant = (kf * theta_lo / FRAC_PI_2).floor();
        let upper_quadrant = (kf * theta_hi / FRAC_PI_2).ceil();
        if lower_quadrant == upper_quadrant - 1.0 {
            return (big_k - 1) / 2;
        }
        big_k -= 2;
    }
    k_i
}

fn trace_from(
    index: usize,
    params: &RoundParams,
    shots: u64,
    hits: u64,
    est: &RoundEstimate,
    exit: RoundExit,
) -> RoundTrace {
    RoundTrace {
        index,
        k: params.k(),
        quadrant: params.quadrant(),
        alpha_i: params.alpha_i(),
        n_max: params.n_max(),
        shots,
        hits,
        a_hat_k: est.a_hat_k,
        a_hat: est.a_hat,
        ci_a: est.ci_a,
        ci_theta: est.ci_theta,
        delta_a: est.delta_a,
        grover_calls: params.k() * shots,
        exit,
    }
}

/// Runs one round at Grover number `k` inside quadrant `quadrant`.
///
/// Shots are charged to `ledger`. The returned trace has `index` 1; callers
/// chaining rounds renumber it.
pub fn run_round<O: AmplitudeOracle + ?Sized>(
    k: u64,
    quadrant: u64,
    alpha_i: f64,
    config: &IqaeConfig,
    oracle: &O,
    stream: &mut ShotStream,
    ledger: &mut QueryLedger,
) -> Result<RoundTrace> {
    let params = RoundParams::new(k, alpha_i, quadrant)?;
    let cap = config.zero_width_cap();
    let n_max = params.n_max();
    let mut shots = 0u64;
    let mut hits = 0u64;
    loop {
        let batch = config.n_shot.min(n_max - shots);
        hits += sample_shots(oracle, k, batch, stream, ledger);
        shots += batch;
        let est = estimate_unchecked(hits, shots, &params);
        if est.delta_a <= config.epsilon {
            return Ok(trace_from(
                1,
                &params,
                shots,
                hits,
                &est,
                RoundExit::Terminated,
            ));
        }
        let next = find_next_k(k, est.ci_theta.lo, est.ci_theta.hi, config.r_min, cap);
        if next > k {
            return Ok(trace_from(
                1,
                &params,
                shots,
                hits,
                &est,
                RoundExit::NextK(next),
            ));
        }
        if shots >= n_max {
            return Ok(trace_from(
                1,
                &params,
                shots,
                hits,
                &est,
                RoundExit::BudgetExhausted,
            ));
        }
    }
}

fn finish(rounds: Vec<RoundTrace>, ledger: QueryLedger) -> RunResult {
    let last = rounds.last().expect("at least one round");
    RunResult {
        a_hat: last.a_hat,
        success: None,
        k_fin: last.k,
        n_fin: last.shots,
        r_fin: last.quadrant,
        f_fin: None,
        total_grover_calls: ledger.grover_calls,
        final_round_grover_calls: last.grover_calls,
        ledger,
        mitigated: false,
        reexecuted_round: None,
        rounds,
    }
}

/// One full run of the modified IQAE algorithm.
pub fn run_iqae<O: AmplitudeOracle + ?Sized>(
    config: &IqaeConfig,
    oracle: &O,
    stream: &mut ShotStream,
) -> Result<RunResult> {
    config.validate()?;
    let mut ledger = QueryLedger::default();
    let mut rounds = Vec::new();
    let mut k = 0u64;
    let mut theta_lo_last = 0.0f64;
    for index in 1..=config.max_rounds {
        let big_k = 2 * k + 1;
        let alpha_i = config.round_alpha(k)?;
        let quadrant = quadrant_index(big_k, theta_lo_last);
        let mut trace = run_round(k, quadrant, alpha_i, config, oracle, stream, &mut ledger)?;
        trace.index = index;
        let exit = trace.exit;
        theta_lo_last = trace.ci_theta.lo;
        rounds.push(trace);
        match exit {
            RoundExit::Terminated => return Ok(finish(rounds, ledger)),
            RoundExit::NextK(next) => k = next,
            RoundExit::BudgetExhausted => {}
        }
    }
    Err(IqaeError::RoundLimitExceeded {
        rounds: config.max_rounds,
    })
}

/// Estimate produced by the re-executed round: `sin²((R π/2 + γ(N₁/N, R)) / (2k+1))`.
pub fn reexecuted_estimate(k_fin: u64, n_fin: u64, r_fin: u64, hits: u64) -> f64 {
    let a_k = hits as f64 / n_fin as f64;
    let g = a_k.sqrt().asin();
    let g = if r_fin.is_multiple_of(2) {
        g
    } else {
        FRAC_PI_2 - g
    };
    let theta = (r_fin as f64 * FRAC_PI_2 + g) / (2 * k_fin + 1) as f64;
    let s = theta.sin();
    s * s
}

/// Runs IQAE, then repeats its final round with the same Grover number and
/// shot count and no stopping rule, returning that round's estimate.
pub fn run_mitigated<O: AmplitudeOracle + ?Sized>(
    config: &IqaeConfig,
    oracle: &O,
    stream: &mut ShotStream,
) -> Result<RunResult> {
    let mut result = run_iqae(config, oracle, stream)?;
    let mut extra = QueryLedger::default();
    let hits = sample_shots(oracle, result.k_fin, result.n_fin, stream, &mut extra);
    result.a_hat = reexecuted_estimate(result.k_fin, result.n_fin, result.r_fin, hits);
    result.ledger.merge(&extra);
    result.total_grover_calls = result.ledger.grover_calls;
    result.final_round_grover_calls = extra.grover_calls;
    result.mitigated = true;
    result.reexecuted_round = Some(ReexecutedRound {
        shots: result.n_fin,
        hits,
        grover_calls: extra.grover_calls,
    });
    Ok(result)
}
