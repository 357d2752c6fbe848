use serde::{Deserialize, Serialize};

use super::run_campaign;
use crate::engine::{IqaeConfig, RunResult};
use crate::error::{IqaeError, Result};
use crate::estimation::Amplitude;
use crate::stats::exact_sum;

/// Bias statistics of one amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    pub a: f64,
    /// Completed runs entering the statistics.
    pub n_run: usize,
    /// Runs that ended with an engine diagnostic and were excluded.
    pub failed_runs: usize,
    /// Mean error `(1/N) Σ (â − a)`.
    pub mean_error: f64,
    /// Standard error `(1/√N) [(1/N) Σ (â − a)²]^{1/2}`.
    pub stderr: f64,
    /// `|mean_error| ≥ 2 · stderr`.
    pub biased: bool,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub mean_final_round_queries: f64,
    pub mitigated: bool,
}

/// `points` equally spaced values in `[lo, hi]`, ends included.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        hi
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// 201 points spanning `[0.001, 0.999]`.
pub fn default_grid() -> Vec<f64> {
    linear_grid(0.001, 0.999, 201)
}

/// Aggregates completed runs at amplitude `a`.
pub fn bias_row(
    a: f64,
    runs: &[RunResult],
    failed_runs: usize,
    epsilon: f64,
    mitigated: bool,
) -> BiasRow {
    let n = runs.len();
    let nf = n as f64;
    let mean_error = exact_sum(runs.iter().map(|r| r.a_hat - a)) / nf;
    let mean_square = exact_sum(runs.iter().map(|r| (r.a_hat - a) * (r.a_hat - a))) / nf;
    let stderr = (mean_square / nf).sqrt();
    let successes = runs
        .iter()
        .filter(|r| (r.a_hat - a).abs() <= epsilon)
        .count();
    let mean_queries = exact_sum(runs.iter().map(|r| r.total_grover_calls as f64)) / nf;
    let mean_final = exact_sum(runs.iter().map(|r| r.final_round_grover_calls as f64)) / nf;
    BiasRow {
        a,
        n_run: n,
        failed_runs,
        mean_error,
        stderr,
        biased: mean_error.abs() >= 2.0 * stderr,
        success_rate: successes as f64 / nf,
        mean_queries,
        mean_final_round_queries: mean_final,
        mitigated,
    }
}

/// Runs the engine `n_run` times at every grid amplitude.
///
/// Point `p` uses task indices `p · n_run .. (p+1) · n_run`. Runs ending in an
/// engine diagnostic are counted in `failed_runs` and left out of the
/// statistics.
pub fn sweep_bias(
    a_grid: &[f64],
    config: &IqaeConfig,
    n_run: usize,
    mitigated: bool,
    master_seed: u64,
) -> Result<Vec<BiasRow>> {
    config.validate()?;
    if n_run == 0 {
        return Err(IqaeError::InvalidConfig("n_run must be at least 1".into()));
    }
    let amplitudes = a_grid
        .iter()
        .map(|&a| Amplitude::new(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(amplitudes
        .iter()
        .enumerate()
        .map(|(p, &a)| {
            let first = (p * n_run) as u64;
            let results = run_campaign(a, config, n_run, mitigated, master_seed, first);
            let failed = results.iter().filter(|r| r.is_err()).count();
            let runs: Vec<RunResult> = results.into_iter().filter_map(|r| r.ok()).collect();
            bias_row(a.value(), &runs, failed, config.epsilon, mitigated)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(a_hat: f64, total: u64, last: u64) -> RunResult {
        RunResult {
            a_hat,
            success: None,
            rounds: Vec::new(),
            k_fin: 0,
            n_fin: 0,
            r_fin: 0,
            f_fin: None,
            total_grover_calls: total,
            final_round_grover_calls: last,
            ledger: Default::default(),
            mitigated: false,
            reexecuted_round: None,
        }
    }

    #[test]
    fn grid_ends_are_included() {
        let g = default_grid();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.001);
        assert_eq!(g[200], 0.999);
        assert!((g[100] - 0.5).abs() < 1e-15);
        assert_eq!(linear_grid(0.3, 0.7, 1), vec![0.3]);
    }

    #[test]
    fn row_formulas() {
        let runs = [fake(0.5 + 1e-4, 10, 4), fake(0.5 - 3e-4, 20, 6)];
        let row = bias_row(0.5, &runs, 1, 1e-3, false);
        assert!((row.mean_error - (-1e-4)).abs() < 1e-16);
        let ms: f64 = (1e-8 + 9e-8) / 2.0;
        assert!((row.stderr - (ms / 2.0).sqrt()).abs() < 1e-16);
        assert_eq!(row.mean_queries, 15.0);
        assert_eq!(row.mean_final_round_queries, 5.0);
        assert_eq!(row.success_rate, 1.0);
        assert_eq!(row.failed_runs, 1);
        assert!(!row.biased);
    }

    #[test]
    fn single_run_stderr_is_its_absolute_error() {
        let row = bias_row(0.2, &[fake(0.2 - 5e-4, 0, 0)], 0, 1e-3, false);
        assert!((row.stderr - 5e-4).abs() < 1e-18);
        assert!(!row.biased);
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let c = IqaeConfig::default();
        assert!(sweep_bias(&[1.5], &c, 1, false, 0).is_err());
        assert!(sweep_bias(&[0.5], &c, 0, false, 0).is_err());
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let c = IqaeConfig::default();
        let grid = [0.001, 0.3, 0.999];
        let a = sweep_bias(&grid, &c, 20, false, 5).unwrap();
        let b = sweep_bias(&grid, &c, 20, false, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.n_run == 20 && r.failed_runs == 0));
    }
}
