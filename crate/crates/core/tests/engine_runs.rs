use proptest::prelude::*;

use iqae_core::harness::{decompose_bias, run_campaign, sweep_bias, weighted_mean_error};
use iqae_core::{
    derive_stream, run_iqae, run_mitigated, Amplitude, BernoulliOracle, IqaeConfig, RoundExit,
    RunResult,
};

fn run(a: f64, seed: u64, task: u64) -> RunResult {
    let oracle = BernoulliOracle::new(Amplitude::new(a).unwrap());
    run_iqae(
        &IqaeConfig::default(),
        &oracle,
        &mut derive_stream(seed, task),
    )
    .unwrap()
}

fn check_trace(r: &RunResult, config: &IqaeConfig) {
    let last = r.final_round();
    assert_eq!(last.exit, RoundExit::Terminated);
    assert!(last.delta_a <= config.epsilon);
    assert_eq!(r.a_hat, last.a_hat);
    assert_eq!(
        (r.k_fin, r.n_fin, r.r_fin),
        (last.k, last.shots, last.quadrant)
    );
    let g: u64 = r.rounds.iter().map(|t| t.grover_calls).sum();
    assert_eq!(g, r.total_grover_calls);
    let shots: u64 = r.rounds.iter().map(|t| t.shots).sum();
    assert_eq!(shots, r.ledger.state_preparations);
    assert_eq!(r.rounds[0].k, 0);
    for (i, w) in r.rounds.windows(2).enumerate() {
        assert_eq!(w[0].index, i + 1);
        match w[0].exit {
            RoundExit::NextK(next) => {
                assert_eq!(w[1].k, next);
                assert!((2 * next + 1) as f64 >= config.r_min * (2 * w[0].k + 1) as f64);
            }
            RoundExit::BudgetExhausted => {
                assert_eq!(w[1].k, w[0].k);
                assert_eq!(w[0].shots, w[0].n_max);
            }
            RoundExit::Terminated => panic!("terminated before the last round"),
        }
    }
    for t in &r.rounds {
        assert!(t.shots <= t.n_max && t.hits <= t.shots);
        assert!(t.ci_a.lo <= t.a_hat && t.a_hat <= t.ci_a.hi);
        assert!(t.quadrant <= 2 * t.k + 1);
    }
}

#[test]
fn runs_are_reproducible() {
    assert_eq!(run(0.37, 5, 0), run(0.37, 5, 0));
    assert_ne!(run(0.37, 5, 0).a_hat, run(0.37, 5, 1).a_hat);
}

#[test]
fn mitigated_run_extends_the_plain_run() {
    let config = IqaeConfig::default();
    let oracle = BernoulliOracle::new(Amplitude::new(0.2505).unwrap());
    for task in 0..20 {
        let plain = run_iqae(&config, &oracle, &mut derive_stream(3, task)).unwrap();
        let m = run_mitigated(&config, &oracle, &mut derive_stream(3, task)).unwrap();
        assert_eq!(plain.rounds, m.rounds);
        let extra = m.reexecuted_round.unwrap();
        assert_eq!(extra.shots, plain.n_fin);
        assert_eq!(extra.grover_calls, plain.k_fin * plain.n_fin);
        assert_eq!(
            m.total_grover_calls,
            plain.total_grover_calls + extra.grover_calls
        );
        assert_eq!(m.final_round_grover_calls, extra.grover_calls);
        assert!(m.mitigated);
    }
}

#[test]
fn sweep_rows_do_not_depend_on_pool_size() {
    let grid = [0.05, 0.2505, 0.9];
    let sweep = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep_bias(&grid, &IqaeConfig::default(), 64, false, 17).unwrap())
    };
    assert_eq!(sweep(1), sweep(3));
}

#[test]
fn decomposition_recombines_on_a_small_campaign() {
    let a = Amplitude::new(0.61).unwrap();
    let runs: Vec<RunResult> = run_campaign(a, &IqaeConfig::default(), 500, false, 8, 0)
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    let groups = decompose_bias(&runs, a);
    let p: f64 = groups.iter().map(|g| g.probability).sum();
    assert!((p - 1.0).abs() < 1e-12);
    let mean = runs.iter().map(|r| r.a_hat - 0.61).sum::<f64>() / runs.len() as f64;
    assert!((weighted_mean_error(&groups) - mean).abs() <= 1e-15 * mean.abs().max(1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_are_consistent(a in 0.0f64..=1.0, seed in any::<u64>()) {
        let r = run(a, seed, 0);
        check_trace(&r, &IqaeConfig::default());
    }

    #[test]
    fn coarse_runs_are_consistent(
        a in 0.0f64..=1.0,
        eps in 0.002f64..0.05,
        alpha in 0.01f64..0.2,
        n_shot in 1u64..40,
        seed in any::<u64>(),
    ) {
        let config = IqaeConfig { epsilon: eps, alpha, n_shot, ..IqaeConfig::default() };
        let oracle = BernoulliOracle::new(Amplitude::new(a).unwrap());
        let r = run_iqae(&config, &oracle, &mut derive_stream(seed, 0)).unwrap();
        check_trace(&r, &config);
    }
}
