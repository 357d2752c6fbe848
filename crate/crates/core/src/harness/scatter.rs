use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::run_campaign;
use crate::engine::IqaeConfig;
use crate::error::{IqaeError, Result};
use crate::estimation::Amplitude;

/// One run's final-round coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    pub run_id: u64,
    pub a_hat: f64,
    pub error: f64,
    pub k_fin: u64,
    pub f_fin: f64,
    pub n_fin: u64,
    pub r_fin: u64,
    pub total_queries: u64,
    pub rounds: usize,
    pub success: bool,
}

/// `(k_fin, f_fin)` of `n_run` plain runs at `a`. Runs ending in an engine
/// diagnostic are skipped; `run_id` keeps the task index.
pub fn scatter_kfin_ffin(
    a: f64,
    config: &IqaeConfig,
    n_run: usize,
    master_seed: u64,
) -> Result<Vec<ScatterRecord>> {
    config.validate()?;
    if n_run == 0 {
        return Err(IqaeError::InvalidConfig("n_run must be at least 1".into()));
    }
    let amp = Amplitude::new(a)?;
    Ok(run_campaign(amp, config, n_run, false, master_seed, 0)
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.ok().map(|r| (i, r)))
        .map(|(i, r)| ScatterRecord {
            run_id: i as u64,
            a_hat: r.a_hat,
            error: r.a_hat - amp.value(),
            k_fin: r.k_fin,
            f_fin: r.f_fin.expect("annotated"),
            n_fin: r.n_fin,
            r_fin: r.r_fin,
            total_queries: r.total_grover_calls,
            rounds: r.rounds.len(),
            success: r.success.expect("annotated"),
        })
        .collect())
}

/// Number of distinct `width`-wide `f_fin` bins holding at least one record.
pub fn occupied_bins(records: &[ScatterRecord], width: f64) -> usize {
    records
        .iter()
        .map(|r| (r.f_fin / width).floor() as i64)
        .collect::<BTreeSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::f_fin;

    #[test]
    fn exact_resonance_lands_on_three_levels() {
        let recs = scatter_kfin_ffin(0.25, &IqaeConfig::default(), 200, 1).unwrap();
        assert_eq!(recs.len(), 200);
        for r in &recs {
            let near = [1.0 / 6.0, 0.5, 5.0 / 6.0]
                .iter()
                .any(|l| (r.f_fin - l).abs() < 1e-9);
            assert!(near, "f_fin = {}", r.f_fin);
            assert_eq!(r.f_fin, f_fin(Amplitude::new(0.25).unwrap(), r.k_fin));
        }
    }

    #[test]
    fn bins_count_distinct_levels() {
        let mk = |f| ScatterRecord {
            run_id: 0,
            a_hat: 0.0,
            error: 0.0,
            k_fin: 0,
            f_fin: f,
            n_fin: 0,
            r_fin: 0,
            total_queries: 0,
            rounds: 1,
            success: true,
        };
        let recs = vec![mk(0.01), mk(0.015), mk(0.5), mk(0.99)];
        assert_eq!(occupied_bins(&recs, 0.02), 3);
    }
}
