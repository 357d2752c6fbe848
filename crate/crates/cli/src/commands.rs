use serde::Serialize;

use iqae_core::harness::{annotate, cond_bias_grid, linear_grid, scatter_kfin_ffin, sweep_bias};
use iqae_core::{
    ci_from_counts, detect_resonance, run_iqae, run_mitigated, theta_of_amplitude, Amplitude,
    BernoulliOracle, IqaeConfig, RoundParams, RunResult, SeedPlan, RNG_ALGORITHM, VERSION,
};

use crate::args::{
    CiProfileArgs, CondBiasArgs, EngineArgs, ResonanceArgs, RunArgs, ScatterArgs, SweepArgs,
};
use crate::error::{usage, CliError, CliResult};
use crate::output::{emit, emit_table, json_bytes, Table};

pub const SWEEP_HEADER: [&str; 9] = [
    "a",
    "n_run",
    "mean_error",
    "stderr",
    "biased_flag",
    "success_rate",
    "mean_queries",
    "mean_final_round_queries",
    "mitigated",
];
pub const COND_BIAS_HEADER: [&str; 6] = ["k_fin", "f_fin", "a_tilde", "n_end", "b_tilde", "reason"];
pub const SCATTER_HEADER: [&str; 10] = [
    "run_id",
    "a_hat",
    "error",
    "k_fin",
    "f_fin",
    "N_fin",
    "R_fin",
    "total_queries",
    "rounds",
    "success",
];
pub const CI_PROFILE_HEADER: [&str; 4] = ["a_hat", "a_lo", "a_hi", "delta_a"];

/// Provenance block shared by every document.
#[derive(Debug, Serialize)]
struct Provenance {
    version: &'static str,
    command: &'static str,
    config: IqaeConfig,
    seed_plan: SeedPlan,
    rng_algorithm: &'static str,
}

impl Provenance {
    fn new(command: &'static str, config: IqaeConfig, seed: u64) -> Self {
        Provenance {
            version: VERSION,
            command,
            config,
            seed_plan: SeedPlan::new(seed),
            rng_algorithm: RNG_ALGORITHM,
        }
    }
}

fn config_from(e: &EngineArgs) -> CliResult<IqaeConfig> {
    let config = IqaeConfig {
        epsilon: e.epsilon,
        alpha: e.alpha,
        n_shot: e.n_shot,
        r_min: e.r_min,
        max_rounds: e.max_rounds,
    };
    config.validate().map_err(usage)?;
    Ok(config)
}

fn amplitude(a: f64) -> CliResult<Amplitude> {
    Amplitude::new(a).map_err(usage)
}

fn open_amplitude(a: f64) -> CliResult<Amplitude> {
    if !(a > 0.0 && a < 1.0) {
        return Err(CliError::Usage(format!("a = {a} must lie in (0, 1)")));
    }
    amplitude(a)
}

fn at_least_one(name: &str, value: usize) -> CliResult<()> {
    if value == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RunDocument {
    #[serde(flatten)]
    provenance: Provenance,
    a: f64,
    task_index: u64,
    mitigated: bool,
    result: RunResult,
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    let config = config_from(&args.engine)?;
    let a = amplitude(args.a)?;
    let oracle = BernoulliOracle::new(a);
    let plan = SeedPlan::new(args.output.seed);
    let mut stream = plan.stream(0);
    let mut result: RunResult = if args.mitigate {
        run_mitigated(&config, &oracle, &mut stream)?
    } else {
        run_iqae(&config, &oracle, &mut stream)?
    };
    annotate(&mut result, a, config.epsilon);
    let doc = RunDocument {
        provenance: Provenance::new("run", config, args.output.seed),
        a: a.value(),
        task_index: 0,
        mitigated: args.mitigate,
        result,
    };
    emit(args.output.out.as_deref(), &json_bytes(&doc))
}

#[derive(Debug, Serialize)]
struct SweepMeta {
    #[serde(flatten)]
    provenance: Provenance,
    a_min: f64,
    a_max: f64,
    points: usize,
    runs_per_point: usize,
    mitigated: bool,
    task_layout: &'static str,
    /// Runs per grid point that ended with an engine diagnostic.
    failed_runs: Vec<usize>,
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let config = config_from(&args.engine)?;
    at_least_one("points", args.points)?;
    at_least_one("runs", args.runs)?;
    amplitude(args.a_min)?;
    amplitude(args.a_max)?;
    if args.a_min > args.a_max {
        return Err(CliError::Usage("--a-min exceeds --a-max".into()));
    }
    let grid = linear_grid(args.a_min, args.a_max, args.points);
    let rows = sweep_bias(&grid, &config, args.runs, args.mitigate, args.output.seed)?;

    let mut table = Table::new(&SWEEP_HEADER);
    for r in &rows {
        table.row(&[
            r.a.to_string(),
            r.n_run.to_string(),
            r.mean_error.to_string(),
            r.stderr.to_string(),
            r.biased.to_string(),
            r.success_rate.to_string(),
            r.mean_queries.to_string(),
            r.mean_final_round_queries.to_string(),
            r.mitigated.to_string(),
        ]);
    }
    let meta = SweepMeta {
        provenance: Provenance::new("sweep", config, args.output.seed),
        a_min: args.a_min,
        a_max: args.a_max,
        points: args.points,
        runs_per_point: args.runs,
        mitigated: args.mitigate,
        task_layout: "grid point p uses task indices p*runs .. (p+1)*runs",
        failed_runs: rows.iter().map(|r| r.failed_runs).collect(),
    };
    emit_table(args.output.out.as_deref(), table, &meta)
}

#[derive(Debug, Serialize)]
struct CondBiasMeta {
    #[serde(flatten)]
    provenance: Provenance,
    a: f64,
    k_list: Vec<u64>,
    f_points: usize,
    f_points_defaulted: bool,
    runs_per_cell: usize,
    nan_threshold_fraction: f64,
    task_layout: &'static str,
}

pub fn cond_bias(args: &CondBiasArgs) -> CliResult<()> {
    let config = config_from(&args.engine)?;
    open_amplitude(args.a)?;
    at_least_one("runs", args.runs)?;
    if args.k_list.is_empty() {
        return Err(CliError::Usage("--k-list is empty".into()));
    }
    let default_points = if args.k_list.len() == 1 { 51 } else { 101 };
    let f_points = args.f_points.unwrap_or(default_points);
    at_least_one("f-points", f_points)?;
    let f_grid = linear_grid(0.0, 1.0, f_points);
    let cells = cond_bias_grid(
        &args.k_list,
        &f_grid,
        args.a,
        args.runs,
        &config,
        args.output.seed,
    )?;

    let mut table = Table::new(&COND_BIAS_HEADER);
    for c in &cells {
        table.row(&[
            c.k_fin.to_string(),
            c.f_fin.to_string(),
            c.a_tilde.to_string(),
            c.n_end.to_string(),
            c.b_tilde.to_string(),
            c.status.reason().to_string(),
        ]);
    }
    let meta = CondBiasMeta {
        provenance: Provenance::new("cond-bias", config, args.output.seed),
        a: args.a,
        k_list: args.k_list.clone(),
        f_points,
        f_points_defaulted: args.f_points.is_none(),
        runs_per_cell: args.runs,
        nan_threshold_fraction: iqae_core::harness::NAN_THRESHOLD_FRACTION,
        task_layout: "cell c (k-major) uses task indices c*runs .. (c+1)*runs",
    };
    emit_table(args.output.out.as_deref(), table, &meta)
}

#[derive(Debug, Serialize)]
struct ScatterMeta {
    #[serde(flatten)]
    provenance: Provenance,
    a: f64,
    runs: usize,
    records: usize,
}

pub fn scatter(args: &ScatterArgs) -> CliResult<()> {
    let config = config_from(&args.engine)?;
    amplitude(args.a)?;
    at_least_one("runs", args.runs)?;
    let records = scatter_kfin_ffin(args.a, &config, args.runs, args.output.seed)?;

    let mut table = Table::new(&SCATTER_HEADER);
    for r in &records {
        table.row(&[
            r.run_id.to_string(),
            r.a_hat.to_string(),
            r.error.to_string(),
            r.k_fin.to_string(),
            r.f_fin.to_string(),
            r.n_fin.to_string(),
            r.r_fin.to_string(),
            r.total_queries.to_string(),
            r.rounds.to_string(),
            r.success.to_string(),
        ]);
    }
    let meta = ScatterMeta {
        provenance: Provenance::new("scatter", config, args.output.seed),
        a: args.a,
        runs: args.runs,
        records: records.len(),
    };
    emit_table(args.output.out.as_deref(), table, &meta)
}

#[derive(Debug, Serialize)]
struct CiProfileMeta {
    version: &'static str,
    command: &'static str,
    k: u64,
    n: u64,
    a: f64,
    epsilon: f64,
    alpha: f64,
    alpha_i: f64,
    quadrant: u64,
}

pub fn ci_profile(args: &CiProfileArgs) -> CliResult<()> {
    let a = amplitude(args.a)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let config = IqaeConfig::new(args.epsilon, args.alpha).map_err(usage)?;
    let alpha_i = config.round_alpha(args.k).map_err(usage)?;
    let big_k = 2 * args.k + 1;
    let quadrant = iqae_core::estimation::quadrant_index(big_k, theta_of_amplitude(a).value());
    let params = RoundParams::new(args.k, alpha_i, quadrant).map_err(usage)?;

    let mut rows = (0..=args.n)
        .map(|n1| ci_from_counts(n1, args.n, &params))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|p, q| p.a_hat.total_cmp(&q.a_hat));

    let mut table = Table::new(&CI_PROFILE_HEADER);
    for e in &rows {
        table.row(&[
            e.a_hat.to_string(),
            e.ci_a.lo.to_string(),
            e.ci_a.hi.to_string(),
            e.delta_a.to_string(),
        ]);
    }
    let meta = CiProfileMeta {
        version: VERSION,
        command: "ci-profile",
        k: args.k,
        n: args.n,
        a: a.value(),
        epsilon: args.epsilon,
        alpha: args.alpha,
        alpha_i,
        quadrant,
    };
    emit_table(args.out.as_deref(), table, &meta)
}

#[derive(Debug, Serialize)]
struct ResonanceDocument {
    l: u64,
    m: u64,
    delta: f64,
    a: f64,
    m_max: u64,
    version: &'static str,
}

pub fn resonance(args: &ResonanceArgs) -> CliResult<()> {
    let a = open_amplitude(args.a)?;
    let r = detect_resonance(a, args.m_max).map_err(usage)?;
    let doc = ResonanceDocument {
        l: r.l,
        m: r.m,
        delta: r.delta,
        a: a.value(),
        m_max: args.m_max,
        version: VERSION,
    };
    emit(args.out.as_deref(), &json_bytes(&doc))
}
