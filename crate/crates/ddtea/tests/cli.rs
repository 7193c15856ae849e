use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ddtea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddtea"))
        .args(args)
        .env_remove("DDTEA_THREADS")
        .output()
        .expect("run ddtea")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn trace_reaches_the_limit_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "trace",
        "--alpha",
        "1e8",
        "--beta",
        "-4e8",
        "--n",
        "2",
        "--s0",
        "0.1",
        "--t-end",
        "200e-9",
        "--points",
        "200",
        "--svg",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,s");
    assert_eq!(lines.len(), 201);
    let last: f64 = lines[200].split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 0.5).abs() < 1e-6);
    assert!(dir.path().join("manifest.txt").exists());
    roxmltree::Document::parse(&fs::read_to_string(dir.path().join("trace.svg")).unwrap()).unwrap();
}

#[test]
fn single_point_trace_is_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "trace",
        "--zeta",
        "1.5",
        "--s0",
        "0.3",
        "--t-end",
        "1e-7",
        "--points",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let row: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row, [0.0, 0.3]);
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn trace_manifest_reproduces_the_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "trace",
        "--zeta",
        "1.2",
        "--s0",
        "0.02",
        "--t-end",
        "3e-7",
        "--points",
        "50",
        "--out",
        path(a.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = a.path().join("manifest.txt");
    let o = ddtea(&[
        "trace",
        "--config",
        path(&manifest),
        "--out",
        path(b.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(a.path().join("trace.csv")).unwrap(),
        fs::read(b.path().join("trace.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["trace", "--alpha", "1e8"],
        vec!["trace", "--s0", "0.1", "--t-end", "1e-7"],
        vec![
            "trace", "--alpha", "1", "--beta", "-1", "--n", "-2", "--s0", "0.1", "--t-end", "1",
        ],
        vec!["sweep", "--points", "3"],
        vec!["sweep", "--axis", "voltage"],
        vec!["sweep", "--axis", "current", "--split", "1.5"],
        vec!["bench", "--rk4-step", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = ddtea(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn blow_up_exits_3_and_names_t_star() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "trace",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--n",
        "2",
        "--s0",
        "1",
        "--t-end",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("t* = 3.4657359"), "{}", stderr(&o));
}

#[test]
fn bench_reports_speedup() {
    let o = ddtea(&[
        "bench",
        "--traces",
        "2",
        "--evals",
        "2000",
        "--rk4-step",
        "1e-11",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let speedup: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("speedup="))
        .expect("speedup line")
        .parse()
        .unwrap();
    assert!(speedup > 0.0);
    assert!(out.contains("closed_ns_per_eval=") && out.contains("rk4_ns_per_trace="));
}

#[test]
fn model_check_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    fs::write(
        &good,
        "ddtea-model v1\nzeta_range 0.5 2.5\nalpha -1e8 1e8\nbeta 0 -2e8\nn 2\n",
    )
    .unwrap();
    let o = ddtea(&["model-check", "--model", path(&good)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("zeta,alpha,beta,n,steady_state"));

    let bad = dir.path().join("bad.txt");
    fs::write(
        &bad,
        "ddtea-model v1\nzeta_range 0.5 2.5\nalpha -1e8 1e8\nbeta 1e8\nn 2\n",
    )
    .unwrap();
    let o = ddtea(&["model-check", "--model", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zeta"), "{}", stderr(&o));

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    assert_eq!(
        ddtea(&["model-check", "--model", path(&empty)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trial_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "trial",
        "--noise",
        "20",
        "--seed",
        "3",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("accuracy="));
    let signal = fs::read_to_string(dir.path().join("signal.csv")).unwrap();
    assert_eq!(signal.lines().next(), Some("sample,label"));
    assert_eq!(signal.lines().count(), 1201);
    let states = fs::read_to_string(dir.path().join("states.csv")).unwrap();
    let header: Vec<&str> = states.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 24);
    assert_eq!((header[0], header[23]), ("v0", "v23"));
    let weights = fs::read_to_string(dir.path().join("weights.csv")).unwrap();
    assert_eq!(weights.lines().count(), 1 + 25);
}

#[test]
fn sweep_degradation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddtea(&[
        "sweep",
        "--axis",
        "current",
        "--from",
        "2.2",
        "--to",
        "2.4",
        "--points",
        "3",
        "--reps",
        "1",
        "--zeta-span",
        "0.3",
        "--segments",
        "20",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).filter(|l| l.ends_with(",0")).count() >= 2);
}

#[test]
fn sweep_fit_and_threads_env() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |out: &Path| -> Vec<String> {
        [
            "sweep",
            "--axis",
            "snr",
            "--from",
            "-20",
            "--to",
            "30",
            "--points",
            "8",
            "--reps",
            "3",
            "--segments",
            "40",
            "--fit",
            "--svg",
            "--out",
            path(out),
        ]
        .map(String::from)
        .to_vec()
    };
    let o = Command::new(env!("CARGO_BIN_EXE_ddtea"))
        .args(args(a.path()))
        .env("DDTEA_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_ddtea"))
        .args(args(b.path()))
        .arg("--threads")
        .arg("1")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read(a.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, fs::read(b.path().join("sweep.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert!(text.contains("# A=") && text.contains("# r_squared="));
    let svg = fs::read_to_string(a.path().join("sweep.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(
        doc.descendants()
            .filter(|d| d.has_tag_name("polyline"))
            .count(),
        2
    );

    let o = ddtea(&["fit", "--input", path(&a.path().join("sweep.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# nu="));
}
