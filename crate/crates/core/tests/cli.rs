mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use radialcone::cli::RunConfig;

const BIN: &str = env!("CARGO_BIN_EXE_radialcone");

const SMALL: &str = r#"
[model]
n = 3
alpha = 4.0
profile = "adkins_nappi"

[grid]
radius = 4.0
h = 0.015625

[solver]
t_end = 1.0
snapshot_stride = 1

[data]
center = 1.2
width = 0.8

[diagnostics]
dyadic_levels = 3
dyadic_t_max = 0.5
"#;

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

fn radialcone(cmd: &str, config: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(BIN)
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--jobs", "1"])
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

/// Non-finite values would serialize as `null`; only absent witnesses may be null.
fn assert_finite(v: &serde_json::Value, key: &str) {
    match v {
        serde_json::Value::Null => assert_eq!(key, "witness"),
        serde_json::Value::Array(a) => a.iter().for_each(|x| assert_finite(x, key)),
        serde_json::Value::Object(o) => o.iter().for_each(|(k, x)| assert_finite(x, k)),
        _ => {}
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn check_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _) = radialcone("check", &common::path_to_config("check_linear.toml"), tmp.path());
    assert_eq!(code, 0);
    let (code, out) = radialcone("check", &common::path_to_config("check_adkins_nappi.toml"), tmp.path());
    assert_eq!(code, 2);
    assert!(out.contains("f'(0) != 0: FAILED"), "{out}");
    let cfg = write_config(tmp.path(), "[model]\nn = 3\nalpha = 2.0\nprofile = \"linear\"\n");
    let (code, out) = radialcone("check", &cfg, tmp.path());
    assert_eq!(code, 2);
    assert!(out.contains("= 4: FAILED"), "{out}");
}

#[test]
fn run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let (code, _) = radialcone("run", &cfg, &out);
    assert_eq!(code, 0);

    let series = fs::read_to_string(out.join("series.ndjson")).unwrap();
    let mut steps = 0;
    for line in series.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object() && v["t"].is_number() && v["energy"].is_number());
        steps += 1;
    }
    assert!(steps > 1);

    let slices = fs::read_to_string(out.join("slices.csv")).unwrap();
    assert_eq!(slices.lines().next().unwrap(), "t,r,u,ut,ur,e_plus,m");

    let report = fs::read_to_string(out.join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_finite(&v, "");
    assert_eq!(v["acceptance"]["passed"], true);
    assert_eq!(v["run"]["steps"].as_u64().unwrap() as usize + 1, steps);
    assert!(out.join("summary.txt").exists());
}

#[test]
fn zero_data_gives_zero_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n").replace("center = 1.2", "family = \"zero\"\ncenter = 1.2"));
    let out = tmp.path().join("out");
    assert_eq!(radialcone("run", &cfg, &out).0, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(v["run"]["final_energy"], 0.0);
    assert_eq!(v["energy"]["regions"][0]["residual"], 0.0);
    assert_eq!(v["bogomolny"]["max_violation"], 0.0);
    for e in v["dyadic"]["scan"]["tip_energy"].as_array().unwrap() {
        assert_eq!(*e, 0.0);
    }
}

#[test]
fn blow_up_exits_3_with_last_good_state() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("snapshot_stride = 1", "snapshot_stride = 1\nblowup_threshold = 0.0"));
    let out = tmp.path().join("out");
    assert_eq!(radialcone("run", &cfg, &out).0, 3);
    let last: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("last_good.json")).unwrap()).unwrap();
    assert_eq!(last["t"], 0.0);
}

#[test]
fn configuration_errors_exit_64() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &SMALL.replace("t_end = 1.0", "t_end = 1.0\ncfl = 1.8"));
    assert_eq!(radialcone("run", &cfg, &out).0, 64);
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n[grid.extra]\nx = 1\n"));
    assert_eq!(radialcone("run", &cfg, &out).0, 64);
    let cfg = write_config(tmp.path(), "[mms]\nlevels = [0.01]\n");
    assert_eq!(radialcone("mms", &cfg, &out).0, 64);
    assert_eq!(radialcone("run", &tmp.path().join("missing.toml"), &out).0, 64);
    let o = Command::new(BIN).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn mms_regression_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let base = "[mms]\nlevels = [0.015625, 0.0078125, 0.00390625]\n";
    let cfg = write_config(tmp.path(), base);
    assert_eq!(radialcone("mms", &cfg, &out).0, 0);
    assert!(out.join("mms.json").exists() && out.join("convergence.csv").exists());
    let cfg = write_config(tmp.path(), &format!("{base}origin_closure = \"even\"\n"));
    let (code, stdout) = radialcone("mms", &cfg, &out);
    assert_eq!(code, 1);
    assert!(stdout.contains("REGRESSION"), "{stdout}");
}

#[test]
fn one_point_sweep_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let run_cfg = write_config(tmp.path(), SMALL);
    let run_out = tmp.path().join("run");
    assert_eq!(radialcone("run", &run_cfg, &run_out).0, 0);
    let sweep_dir = tmp.path().join("sweep");
    fs::create_dir(&sweep_dir).unwrap();
    let sweep_cfg = write_config(&sweep_dir, &format!("{SMALL}\n[sweep]\namplitude = [1e-3]\n"));
    let sweep_out = tmp.path().join("sweep_out");
    assert_eq!(radialcone("sweep", &sweep_cfg, &sweep_out).0, 0);
    for f in ["report.json", "series.ndjson", "slices.csv", "summary.txt"] {
        let a = fs::read(run_out.join(f)).unwrap();
        let b = fs::read(sweep_out.join("run_000").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn sweep_records_failed_points() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}\n[sweep]\nalpha = [4.0, -1.0]\n"));
    let out = tmp.path().join("out");
    assert_eq!(radialcone("sweep", &cfg, &out).0, 0);
    let mut rd = csv::Reader::from_path(out.join("aggregate.csv")).unwrap();
    let headers = rd.headers().unwrap().clone();
    let status = headers.iter().position(|h| h == "status").unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][status], "completed");
    assert_eq!(&rows[1][status], "failed");
}

#[test]
fn reports_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(radialcone("run", &cfg, &a).0, 0);
    assert_eq!(radialcone("run", &cfg, &b).0, 0);
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
}
