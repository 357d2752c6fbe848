use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::RunResult;
use crate::estimation::Amplitude;
use crate::stats::{exact_sum, ExactSum};

/// Runs sharing one final Grover number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KfinGroup {
    pub k_fin: u64,
    pub count: usize,
    /// Empirical probability of ending at `k_fin`.
    pub probability: f64,
    /// Mean error of the runs ending at `k_fin`.
    pub conditional_mean_error: f64,
}

/// Groups `(k_fin, error)` pairs by `k_fin`, in increasing `k_fin` order.
pub fn decompose_errors<I: IntoIterator<Item = (u64, f64)>>(items: I) -> Vec<KfinGroup> {
    let mut groups: BTreeMap<u64, (usize, ExactSum)> = BTreeMap::new();
    let mut total = 0usize;
    for (k, e) in items {
        let g = groups.entry(k).or_default();
        g.0 += 1;
        g.1.add(e);
        total += 1;
    }
    groups
        .into_iter()
        .map(|(k_fin, (count, sum))| KfinGroup {
            k_fin,
            count,
            probability: count as f64 / total as f64,
            conditional_mean_error: sum.value() / count as f64,
        })
        .collect()
}

/// Splits the mean error of `results` over the final Grover numbers.
pub fn decompose_bias(results: &[RunResult], a: Amplitude) -> Vec<KfinGroup> {
    decompose_errors(results.iter().map(|r| (r.k_fin, r.a_hat - a.value())))
}

/// `Σ p_k · b_k`, which recovers the overall mean error.
pub fn weighted_mean_error(groups: &[KfinGroup]) -> f64 {
    exact_sum(
        groups
            .iter()
            .map(|g| g.probability * g.conditional_mean_error),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        assert!(decompose_errors(std::iter::empty()).is_empty());
    }

    #[test]
    fn single_and_pair() {
        let g = decompose_errors([(3, 2e-4)]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].probability, 1.0);
        assert_eq!(g[0].conditional_mean_error, 2e-4);

        let g = decompose_errors([(3, 2e-4), (3, -1e-4)]);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].count, 2);
        assert!((g[0].conditional_mean_error - 0.5e-4).abs() < 1e-19);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let items: Vec<(u64, f64)> = (0..97).map(|i| (i % 5, (i as f64).sin() * 1e-3)).collect();
        let g = decompose_errors(items.iter().copied());
        assert_eq!(g.len(), 5);
        assert!((exact_sum(g.iter().map(|x| x.probability)) - 1.0).abs() < 1e-15);
        let mean = exact_sum(items.iter().map(|x| x.1)) / items.len() as f64;
        assert!((weighted_mean_error(&g) - mean).abs() <= 1e-15 * mean.abs());
    }
}
