use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn iqae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iqae"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn lines(out: &Output) -> Vec<String> {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn resonance_documents() {
    let v = stdout_json(&iqae(&["resonance", "--a", "0.2505"]));
    assert_eq!((v["l"].as_u64(), v["m"].as_u64()), (Some(1), Some(3)));
    assert!((v["delta"].as_f64().unwrap() - 0.000577).abs() < 5e-7);

    let v = stdout_json(&iqae(&["resonance", "--a", "0.5"]));
    assert_eq!((v["l"].as_u64(), v["m"].as_u64()), (Some(1), Some(2)));
    assert!(v["delta"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn run_document_is_self_describing() {
    let v = stdout_json(&iqae(&["run", "--a", "0", "--seed", "1"]));
    assert_eq!(v["result"]["a_hat"].as_f64(), Some(0.0));
    assert_eq!(v["result"]["success"].as_bool(), Some(true));
    assert_eq!(v["seed_plan"]["master_seed"].as_u64(), Some(1));
    assert_eq!(v["config"]["epsilon"].as_f64(), Some(1e-3));
    assert!(v["version"].is_string());
    assert!(v["rng_algorithm"].as_str().unwrap().contains("ChaCha8"));
    let rounds = v["result"]["rounds"].as_array().unwrap();
    assert!(!rounds.is_empty());
    assert!(rounds[0]["exit"]["kind"].is_string());
}

#[test]
fn run_is_reproducible_and_mitigation_adds_a_round() {
    let plain = iqae(&["run", "--a", "0.2505", "--seed", "7"]);
    assert_eq!(
        plain.stdout,
        iqae(&["run", "--a", "0.2505", "--seed", "7"]).stdout
    );
    let v = stdout_json(&plain);
    let m = stdout_json(&iqae(&[
        "run",
        "--a",
        "0.2505",
        "--seed",
        "7",
        "--mitigate",
    ]));
    let extra = &m["result"]["reexecuted_round"];
    assert_eq!(extra["shots"], v["result"]["N_fin"]);
    assert_eq!(m["result"]["k_fin"], v["result"]["k_fin"]);
    let total = |d: &Value| d["result"]["total_grover_calls"].as_u64().unwrap();
    assert_eq!(
        total(&m),
        total(&v) + extra["grover_calls"].as_u64().unwrap()
    );
}

#[test]
fn sweep_single_sample_row() {
    let rows = lines(&iqae(&[
        "sweep", "--points", "1", "--runs", "1", "--a-min", "0.3",
    ]));
    assert_eq!(
        rows[0],
        "a,n_run,mean_error,stderr,biased_flag,success_rate,mean_queries,mean_final_round_queries,mitigated"
    );
    assert_eq!(rows.len(), 2);
    let f: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(f[0], "0.3");
    assert_eq!(f[1], "1");
    let mean: f64 = f[2].parse().unwrap();
    let stderr: f64 = f[3].parse().unwrap();
    assert_eq!(stderr, mean.abs());
    assert_eq!(f[8], "false");
}

#[test]
fn sweep_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = iqae(&[
        "sweep",
        "--points",
        "2",
        "--runs",
        "5",
        "--mitigate",
        "--out",
        path_str(&out),
    ]);
    assert!(status.status.success());
    let meta: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sweep.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["runs_per_point"].as_u64(), Some(5));
    assert_eq!(meta["failed_runs"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn cond_bias_marks_cells_without_terminations() {
    let rows = lines(&iqae(&[
        "cond-bias",
        "--a",
        "0.3",
        "--k-list",
        "0",
        "--f-points",
        "3",
        "--runs",
        "50",
    ]));
    assert_eq!(rows[0], "k_fin,f_fin,a_tilde,n_end,b_tilde,reason");
    assert_eq!(rows.len(), 4);
    // k = 0 rounds always move on before reaching ε = 1e-3
    assert!(rows[1..]
        .iter()
        .any(|r| r.ends_with(",0,NaN,insufficient_terminations")));
    // f = 1 at k = 0 would need an angle past π/2
    assert!(rows[3].ends_with(",NaN,out_of_domain"));
}

#[test]
fn ci_profile_rows() {
    let rows = lines(&iqae(&[
        "ci-profile",
        "--k",
        "0",
        "--n",
        "100",
        "--a",
        "0.25",
    ]));
    assert_eq!(rows[0], "a_hat,a_lo,a_hi,delta_a");
    assert_eq!(rows.len(), 102);
    let parsed: Vec<[f64; 4]> = rows[1..]
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    let first = parsed[0];
    assert_eq!(first[0], 0.0);
    assert_eq!(first[1], 0.0);
    assert_eq!(first[3], first[2]);
    for w in parsed.windows(2) {
        assert!(w[0][0] <= w[1][0]);
    }
    for [a, lo, hi, _] in parsed {
        assert!(lo <= a && a <= hi);
    }
}

#[test]
fn scatter_and_render_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let scatter = dir.path().join("scatter.csv");
    let heat = dir.path().join("heat.csv");
    let svg = dir.path().join("heat.svg");
    assert!(iqae(&[
        "scatter",
        "--a",
        "0.2505",
        "--runs",
        "20",
        "--seed",
        "3",
        "--out",
        path_str(&scatter)
    ])
    .status
    .success());
    let text = std::fs::read_to_string(&scatter).unwrap();
    assert!(text
        .starts_with("run_id,a_hat,error,k_fin,f_fin,N_fin,R_fin,total_queries,rounds,success\n"));
    assert_eq!(text.lines().count(), 21);

    std::fs::write(
        &heat,
        "k_fin,f_fin,a_tilde,n_end,b_tilde,reason\n\
         100,0,0.1,10,NaN,insufficient_terminations\n\
         100,1,0.1,10,0.001,\n\
         300,0,0.1,10,-0.001,\n\
         300,1,0.1,10,NaN,insufficient_terminations\n",
    )
    .unwrap();
    let status = iqae(&[
        "render",
        "--input",
        path_str(&heat),
        "--scatter",
        path_str(&scatter),
        "--out",
        path_str(&svg),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let out = std::fs::read_to_string(&svg).unwrap();
    assert!(out.starts_with("<svg"));
    assert_eq!(out.matches(r##"fill="#ffffff""##).count(), 2);
    assert_eq!(out.matches(r##"fill="#ff0000""##).count(), 1);
    assert_eq!(out.matches(r##"fill="#0000ff""##).count(), 1);
    assert!(out.contains(r#"<circle"#));
}

#[test]
fn render_all_nan_grid_is_white() {
    let dir = tempfile::tempdir().unwrap();
    let heat = dir.path().join("heat.csv");
    let svg = dir.path().join("heat.svg");
    std::fs::write(
        &heat,
        "k_fin,f_fin,b_tilde\n1,0,NaN\n1,0.5,NaN\n2,0,NaN\n2,0.5,NaN\n",
    )
    .unwrap();
    assert!(iqae(&[
        "render",
        "--input",
        path_str(&heat),
        "--out",
        path_str(&svg)
    ])
    .status
    .success());
    let out = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(out.matches(r##"fill="#ffffff""##).count(), 4);
    assert!(!out.contains("#ff0000") && !out.contains("#0000ff"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| iqae(args).status.code();
    assert_eq!(code(&["run"]), Some(2));
    assert_eq!(code(&["run", "--a", "1.5"]), Some(2));
    assert_eq!(code(&["run", "--a", "0.3", "--epsilon", "0"]), Some(2));
    assert_eq!(code(&["sweep", "--runs", "0"]), Some(2));
    assert_eq!(code(&["resonance", "--a", "0.3", "--m-max", "1"]), Some(2));
    assert_eq!(code(&["run", "--a", "0.3", "--max-rounds", "1"]), Some(3));
    assert_eq!(
        code(&["render", "--input", "/nonexistent/x.csv", "--out", "x.svg"]),
        Some(4)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "k_fin,f_fin,b_tilde\n1,0.5,0.1\n1,zero,0.2\n").unwrap();
    let out = iqae(&[
        "render",
        "--input",
        path_str(&bad),
        "--out",
        path_str(&dir.path().join("o.svg")),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing_dir = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        code(&[
            "sweep",
            "--points",
            "1",
            "--runs",
            "1",
            "--out",
            path_str(&missing_dir)
        ]),
        Some(4)
    );
}
