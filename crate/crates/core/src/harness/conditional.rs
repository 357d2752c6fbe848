//! Bias of a single final round with the Grover number and `f_fin` pinned.
//!
//! The true amplitude is moved to `ã` so that `frac((2k+1)θ_ã/π)` equals the
//! requested `f`, and one round is run many times assuming the previous
//! round's interval enclosed `ã`. Only runs whose round terminates contribute
//! to the mean.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_round, IqaeConfig, RoundExit};
use crate::error::{IqaeError, Result};
use crate::estimation::{quadrant_index, theta_of_amplitude, Amplitude};
use crate::sampler::{derive_stream, BernoulliOracle, QueryLedger};
use crate::stats::exact_sum;

/// Cells with fewer than this fraction of terminating runs report NaN.
pub const NAN_THRESHOLD_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Fewer than 10% of the runs terminated.
    InsufficientTerminations,
    /// The adjusted angle would pass π/2, so `f` cannot be realised.
    OutOfDomain,
}

impl CellStatus {
    pub fn reason(&self) -> &'static str {
        match self {
            CellStatus::Ok => "",
            CellStatus::InsufficientTerminations => "insufficient_terminations",
            CellStatus::OutOfDomain => "out_of_domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondBiasCell {
    pub k_fin: u64,
    pub f_fin: f64,
    pub a_tilde: f64,
    pub n_run: usize,
    pub n_end: usize,
    /// Mean error of terminating runs, or NaN.
    pub b_tilde: f64,
    pub status: CellStatus,
}

/// Adjusted amplitude for a pinned `(k, f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedTarget {
    /// `⌊(2k+1)θ_a/π⌋`.
    pub half_period: u64,
    pub a_tilde: f64,
    /// `(R̃ + f)π/(2k+1)`, the angle `ã` is built from.
    pub angle: f64,
    pub out_of_domain: bool,
}

/// `ã = sin²((R̃ + f)π/(2k+1))` with `R̃ = ⌊(2k+1)θ_a/π⌋`.
pub fn adjusted_amplitude(a: Amplitude, k: u64, f: f64) -> AdjustedTarget {
    let big_k = (2 * k + 1) as f64;
    let half_period = (big_k * theta_of_amplitude(a).value() / PI).floor() as u64;
    let angle = (half_period as f64 + f) * PI / big_k;
    let s = angle.sin();
    AdjustedTarget {
        half_period,
        a_tilde: (s * s).min(1.0),
        angle,
        out_of_domain: half_period as f64 + f > k as f64 + 0.5,
    }
}

fn check_inputs(f_target: f64, a: f64, n_run: usize) -> Result<Amplitude> {
    if !(0.0..=1.0).contains(&f_target) {
        return Err(IqaeError::domain("f_fin", f_target, "[0, 1]"));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(IqaeError::domain("a", a, "(0, 1)"));
    }
    if n_run == 0 {
        return Err(IqaeError::InvalidConfig("n_run must be at least 1".into()));
    }
    Amplitude::new(a)
}

fn cell(
    k_fin: u64,
    f_target: f64,
    a: Amplitude,
    n_run: usize,
    config: &IqaeConfig,
    master_seed: u64,
    first_task: u64,
) -> Result<CondBiasCell> {
    let target = adjusted_amplitude(a, k_fin, f_target);
    if target.out_of_domain {
        return Ok(CondBiasCell {
            k_fin,
            f_fin: f_target,
            a_tilde: target.a_tilde,
            n_run,
            n_end: 0,
            b_tilde: f64::NAN,
            status: CellStatus::OutOfDomain,
        });
    }
    let a_tilde = Amplitude::new(target.a_tilde)?;
    let big_k = 2 * k_fin + 1;
    let quadrant = quadrant_index(big_k, theta_of_amplitude(a_tilde).value());
    let alpha_i = config.round_alpha(k_fin)?;
    let oracle = BernoulliOracle::new(a_tilde);

    let errors: Vec<Option<f64>> = (0..n_run as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = derive_stream(master_seed, first_task + i);
            let mut ledger = QueryLedger::default();
            let trace = run_round(
                k_fin,
                quadrant,
                alpha_i,
                config,
                &oracle,
                &mut stream,
                &mut ledger,
            )?;
            Ok(match trace.exit {
                RoundExit::Terminated => Some(trace.a_hat - a_tilde.value()),
                RoundExit::NextK(_) | RoundExit::BudgetExhausted => None,
            })
        })
        .collect::<Result<_>>()?;

    let ended: Vec<f64> = errors.into_iter().flatten().collect();
    let n_end = ended.len();
    let enough = 10 * n_end >= n_run;
    let b_tilde = if enough {
        exact_sum(ended.iter().copied()) / n_end as f64
    } else {
        f64::NAN
    };
    Ok(CondBiasCell {
        k_fin,
        f_fin: f_target,
        a_tilde: a_tilde.value(),
        n_run,
        n_end,
        b_tilde,
        status: if enough {
            CellStatus::Ok
        } else {
            CellStatus::InsufficientTerminations
        },
    })
}

/// Conditional bias of the final round at `(k_fin, f_target)` around `a`.
pub fn conditional_bias(
    k_fin: u64,
    f_target: f64,
    a: f64,
    n_run: usize,
    config: &IqaeConfig,
    master_seed: u64,
) -> Result<CondBiasCell> {
    config.validate()?;
    let a = check_inputs(f_target, a, n_run)?;
    cell(k_fin, f_target, a, n_run, config, master_seed, 0)
}

/// [`conditional_bias`] over `k_values × f_grid`, `k`-major. Cell `c` uses
/// task indices `c · n_run .. (c+1) · n_run`.
pub fn cond_bias_grid(
    k_values: &[u64],
    f_grid: &[f64],
    a: f64,
    n_run: usize,
    config: &IqaeConfig,
    master_seed: u64,
) -> Result<Vec<CondBiasCell>> {
    config.validate()?;
    if k_values.is_empty() || f_grid.is_empty() {
        return Err(IqaeError::InvalidConfig("grids must be nonempty".into()));
    }
    let mut amp = None;
    for &f in f_grid {
        amp = Some(check_inputs(f, a, n_run)?);
    }
    let a = amp.expect("nonempty grid");
    let mut cells = Vec::with_capacity(k_values.len() * f_grid.len());
    for (ki, &k) in k_values.iter().enumerate() {
        for (fi, &f) in f_grid.iter().enumerate() {
            let index = (ki * f_grid.len() + fi) as u64;
            cells.push(cell(
                k,
                f,
                a,
                n_run,
                config,
                master_seed,
                index * n_run as u64,
            )?);
        }
    }
    Ok(cells)
}

/// Correlation between `b̃(k, f)` and `−b̃(k, 1−f)` over the cells of one
/// Grover number, pairing each `f` with the cell closest to `1 − f`. Pairs
/// with a NaN on either side are skipped.
pub fn reflection_correlation(cells: &[CondBiasCell]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in cells {
        let mirror = cells
            .iter()
            .min_by(|p, q| {
                let dp = (p.f_fin - (1.0 - c.f_fin)).abs();
                let dq = (q.f_fin - (1.0 - c.f_fin)).abs();
                dp.total_cmp(&dq)
            })
            .expect("nonempty");
        if (mirror.f_fin - (1.0 - c.f_fin)).abs() > 1e-9 {
            continue;
        }
        if c.b_tilde.is_finite() && mirror.b_tilde.is_finite() {
            xs.push(c.b_tilde);
            ys.push(-mirror.b_tilde);
        }
    }
    crate::stats::correlation(&xs, &ys)
}
