use std::path::PathBuf;
use std::process::{Command, Output};

use grovertails::matrix_text::parse_matrix;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grovertails"));
    // keep the caller's environment from leaking into flag defaults
    for (key, _) in std::env::vars() {
        if key.starts_with("GROVERTAILS_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    cli().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn triangle_full_run_passes() {
    let graph = fixture("c3.txt");
    let out = run(&[
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,1",
        "--mode",
        "all",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    assert_eq!(r["passed"], Value::Bool(true));

    let s = &r["scattering"];
    let (t_re, t_im) = pair(&s["t_star"]);
    let (r_re, r_im) = pair(&s["r_star"]);
    assert!((t_re - 1.0).abs() < 1e-10 && t_im.abs() < 1e-10);
    assert!(r_re.abs() < 1e-10 && r_im.abs() < 1e-10);
    assert!((s["internal_mass"].as_f64().unwrap() - 11.0 / 6.0).abs() < 1e-10);
    assert_eq!(s["bound"].as_f64(), Some(1.5));
    assert!(s["checks"]
        .as_object()
        .unwrap()
        .values()
        .all(|c| c["passed"] == Value::Bool(true)));

    let center = r["spectrum"]["center"].as_array().unwrap();
    assert_eq!(center.len(), 1);
    assert_eq!(center[0]["multiplicity"], 1);
    let (re, im) = pair(&center[0]["eigenvalue"]);
    assert!((re - 1.0).abs() < 1e-10 && im.abs() < 1e-10);

    assert_eq!(r["evolve"]["converged"], Value::Bool(true));
    assert!(r["evolve"]["distance_to_solve"].as_f64().unwrap() < 1e-8);
}

#[test]
fn single_vertex_scatters_like_the_grover_coin() {
    let graph = fixture("single_vertex.txt");
    let out = run(&[
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,0,0",
        "--mode",
        "scatter",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let m = &json(&out)["scattering"]["scattering_matrix"];
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
            let (re, im) = pair(&m[i][j]);
            assert!(
                (re - expect).abs() < 1e-12 && im.abs() < 1e-12,
                "entry ({i},{j})"
            );
        }
    }
}

#[test]
fn malformed_graph_is_a_usage_error() {
    let graph = fixture("malformed.txt");
    let out = run(&["--graph", graph.to_str().unwrap(), "--tails", "0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let diag: Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON line");
    assert_eq!(diag["error"], "MalformedLine");
}

#[test]
fn usage_and_io_errors_exit_one() {
    let missing = run(&["--graph", "/nonexistent/graph.txt", "--tails", "0"]);
    assert_eq!(missing.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(diag["error"], "IoError");

    let graph = fixture("c3.txt");
    let g = graph.to_str().unwrap();
    let off_circle = run(&["--graph", g, "--tails", "0,1", "--z", "0.5"]);
    assert_eq!(off_circle.status.code(), Some(1));
    let bad_inflow = run(&["--graph", g, "--tails", "0,1", "--inflow", "1"]);
    assert_eq!(
        serde_json::from_slice::<Value>(&bad_inflow.stderr).unwrap()["error"],
        "InflowLength"
    );
    let no_tails = run(&["--graph", g]);
    assert_eq!(no_tails.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let graph = fixture("c3.txt");
    let args = [
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,1,2",
        "--inflow",
        "1,0.5i,-0.25",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn environment_overrides_flags_defaults() {
    let graph = fixture("c3.txt");
    let out = cli()
        .env("GROVERTAILS_GRAPH", &graph)
        .env("GROVERTAILS_TAILS", "0,1")
        .env("GROVERTAILS_MODE", "spectrum")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["config"]["mode"], "spectrum");
    assert!(r.get("scattering").is_none() && r.get("spectrum").is_some());
}

#[test]
fn csv_tables() {
    let graph = fixture("c3.txt");
    let g = graph.to_str().unwrap();
    let out = run(&[
        "--graph", g, "--tails", "0,1", "--mode", "evolve", "--z", "0.6+0.8i", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,arc,re,im,residual"));
    assert_eq!(lines.next().unwrap().split(',').count(), 5);

    let out = run(&[
        "--graph",
        g,
        "--tails",
        "0,1",
        "--mode",
        "stationary",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("arc,origin,terminus,re,im\n0,0,1,"));

    let all = run(&["--graph", g, "--tails", "0,1", "--format", "csv"]);
    assert_eq!(all.status.code(), Some(1));
}

#[test]
fn operator_dump_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = fixture("c3.txt");
    let out = run(&[
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,1",
        "--mode",
        "spectrum",
        "--dump-operators",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dumped =
        parse_matrix(&std::fs::read_to_string(dir.path().join("e_pon.txt")).unwrap()).unwrap();
    let golden_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/c3_e_pon.txt");
    let golden = parse_matrix(&std::fs::read_to_string(golden_path).unwrap()).unwrap();
    assert_eq!(dumped.shape(), golden.shape());
    let worst = dumped
        .iter()
        .zip(golden.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-15, "max deviation {worst:e}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let graph = fixture("c3.txt");
    let out = run(&[
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,1",
        "--mode",
        "verify",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["passed"], Value::Bool(true));
    assert!(r["scattering"]["scattering_matrix"].is_array());
}

#[test]
fn failed_check_exits_two_with_report() {
    let graph = fixture("c3.txt");
    let out = run(&[
        "--graph",
        graph.to_str().unwrap(),
        "--tails",
        "0,1",
        "--mode",
        "evolve",
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["passed"], Value::Bool(false));
    assert_eq!(r["failures"][0]["kind"], "NotConverged");
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["stage"], "evolve");
}
