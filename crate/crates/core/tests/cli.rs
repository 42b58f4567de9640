use std::path::Path;
use std::process::{Command, Output};

fn nbbd(args: &[&str], envs: &[(&str, &str)], dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nbbd"));
    cmd.args(args).current_dir(dir);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("NBBD_")) {
        cmd.env_remove(k);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run nbbd")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV payload, after the `#` echo and the header.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

fn echo(csv: &str, key: &str) -> Option<String> {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(String::from))
}

fn value(body: &[Vec<String>], quantity: &str) -> f64 {
    body.iter().find(|r| r[0] == quantity).unwrap()[1].parse().unwrap()
}

#[test]
fn constants_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(&["constants"], &[], dir.path()));
    let (header, body) = rows(&text);
    assert_eq!(header, ["quantity", "value"]);
    let c = value(&body, "nbbd_constant");
    assert!((c - 0.0461914).abs() < 1e-7);
    assert!((value(&body, "zero_sum_total") - c).abs() < 1e-3);
    assert_eq!(value(&body, "zero_count"), 10_000.0);

    let bare = stdout(&nbbd(&["constants", "--empty-table"], &[], dir.path()));
    let (_, body) = rows(&bare);
    assert_eq!(body.len(), 3);
    assert!(echo(&bare, "zeros_sha256").is_none());
}

#[test]
fn criterion_rows_for_the_real_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(&["criterion", "--n", "2,10"], &[], dir.path()));
    let (header, body) = rows(&text);
    assert_eq!(header, ["n", "value", "value_log_n", "tail_bound", "quadrature_error"]);
    assert_eq!(body[0][0], "2");
    let v: f64 = body[0][1].parse().unwrap();
    assert!(v > 0.0);
    let scaled: f64 = body[0][2].parse().unwrap();
    assert!((scaled - v * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn criterion_for_the_model_grows() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(
        &["criterion", "--target", "model", "--n", "100,1000,10000", "--tmax", "200"],
        &[],
        dir.path(),
    ));
    let (_, body) = rows(&text);
    let v: Vec<f64> = body.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(v[0] < v[1] && v[1] < v[2], "{v:?}");
    assert_eq!(echo(&text, "sigma0").as_deref(), Some("0.75"));
}

#[test]
fn gram_distances_do_not_increase() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(&["gram", "--n-max", "8"], &[], dir.path()));
    let (header, body) = rows(&text);
    assert_eq!(header, ["n", "d2", "d2_raw", "residual"]);
    assert_eq!(body.len(), 8);
    let d: Vec<f64> = body.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] <= w[0]), "{d:?}");
}

#[test]
fn lemma23_error_falls_with_height() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(
        &["lemma23", "--n", "100", "--t", "10", "--heights", "500,1000,2000"],
        &[],
        dir.path(),
    ));
    let (header, body) = rows(&text);
    let col = header.iter().position(|h| h == "relative_error").unwrap();
    let e: Vec<f64> = body.iter().map(|r| r[col].parse().unwrap()).collect();
    assert_eq!(e.len(), 3);
    assert!(e[0] > e[1] && e[1] > e[2] && e[2] < 1e-2, "{e:?}");
}

#[test]
fn fit_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(&["fit", "--points", "40", "--mode", "pair"], &[], dir.path()));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["params"]["mode"], "pair");
    for key in ["a", "b", "frequency", "rms_relative_residual"] {
        assert!(doc["result"]["fixed"][key].is_number(), "{key}");
        assert!(doc["result"]["free"][key].is_number(), "{key}");
    }
    assert_eq!(doc["result"]["values"].as_array().unwrap().len(), 40);
}

#[test]
fn residues_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&nbbd(&["residues", "--count", "2"], &[], dir.path()));
    let (_, body) = rows(&text);
    let kinds: Vec<&str> = body.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "engineered").count(), 4);
    for k in ["zero", "trivial", "sigma1", "sigma2", "f_series"] {
        assert!(kinds.contains(&k), "{k}");
    }
    let diag = stdout(&nbbd(&["diagnostics", "--lindelof-heights", "100,200"], &[], dir.path()));
    let doc: serde_json::Value = serde_json::from_str(&diag).unwrap();
    assert!(doc["result"]["bcf"]["exponent"].is_number());
    assert_eq!(doc["result"]["lindelof"]["points"].as_array().unwrap().len(), 2);
}

#[test]
fn zeros_ingest_small_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("z.txt"), "# three zeros\n14.1347\n21.0220\n25.0109\n").unwrap();
    let text = stdout(&nbbd(&["zeros-ingest", "--zeros", "z.txt", "--refine"], &[], dir.path()));
    let (_, body) = rows(&text);
    assert_eq!(body.len(), 3);
    let g: f64 = body[0][1].parse().unwrap();
    assert!((g - 14.134_725_141_734_693).abs() < 1e-9);

    std::fs::write(dir.path().join("bad.txt"), "14.1\n12.0\n").unwrap();
    let out = nbbd(&["zeros-ingest", "--zeros", "bad.txt"], &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:2"));
    let missing = nbbd(&["zeros-ingest", "--zeros", "nope.txt"], &[], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn precedence_flags_env_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "tmax = 150\ntol = 1e-9\n").unwrap();
    let args = ["gram", "--n-max", "2", "--config", "run.cfg"];
    let from_file = stdout(&nbbd(&args, &[], dir.path()));
    assert_eq!(echo(&from_file, "tmax").as_deref(), Some("150"));
    assert_eq!(echo(&from_file, "tol").as_deref(), Some("1e-9"));
    let from_env = stdout(&nbbd(&args, &[("NBBD_TMAX", "120")], dir.path()));
    assert_eq!(echo(&from_env, "tmax").as_deref(), Some("120"));
    assert_eq!(echo(&from_env, "tol").as_deref(), Some("1e-9"));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--tmax", "100"]);
    let from_flag = stdout(&nbbd(&with_flag, &[("NBBD_TMAX", "120")], dir.path()));
    assert_eq!(echo(&from_flag, "tmax").as_deref(), Some("100"));

    std::fs::write(dir.path().join("bad.cfg"), "speed = 3\n").unwrap();
    let out = nbbd(&["gram", "--config", "bad.cfg"], &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gram", "--n-max", "3", "--cache-dir", "cache", "--out", "g.csv"];
    let first = nbbd(&args, &[], dir.path());
    assert!(first.status.success());
    assert!(first.stdout.is_empty());
    let a = std::fs::read(dir.path().join("g.csv")).unwrap();
    let records: Vec<_> = std::fs::read_dir(dir.path().join("cache"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(records.iter().any(|n| n.ends_with(".record.json")));
    assert!(records.iter().any(|n| n.ends_with(".csv")));
    let second = nbbd(&args, &[], dir.path());
    assert!(String::from_utf8_lossy(&second.stderr).contains("served from cache"));
    assert_eq!(a, std::fs::read(dir.path().join("g.csv")).unwrap());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["gram", "--n-max", "4"],
        vec!["residues", "--count", "3", "--format", "json"],
        vec!["criterion", "--n", "5,20", "--threads", "3"],
    ] {
        let a = nbbd(&args, &[], dir.path());
        let b = nbbd(&args, &[], dir.path());
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
