use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qring_cli::config::{build, RawConfig};
use qring_cli::Overrides;
use qring_core::{special_switch_node, RingSystem};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn qring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qring"))
        .args(args)
        .env_remove("QRING_CONFIG")
        .output()
        .expect("qring runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header plus rows split on commas.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn switch_fixture_reproduces_junction() {
    let text = std::fs::read_to_string(fixture("switch.ini")).unwrap();
    let raw = RawConfig::parse(&text).unwrap();
    let (ring, sweep) = build(&raw, &Overrides::default()).unwrap();
    let node = special_switch_node(1.0, 0.0).unwrap();
    let want = RingSystem::symmetric(node, 1.0, 0.0).unwrap();
    assert_eq!(ring, want);
    assert_eq!(sweep.k, Some(PI));
}

#[test]
fn sweep_k_header_and_resonance() {
    let cfg = fixture("generic.ini");
    let out = qring(&[
        "sweep-k",
        "--config",
        cfg.to_str().unwrap(),
        "--symmetric",
        "--d",
        "1.25",
        "--k-min",
        "0.5*pi",
        "--k-max",
        "1.5*pi",
        "--points",
        "3",
    ]);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header.join(","),
        "k,kd_over_pi,re_R,im_R,re_T,im_T,prob_R,prob_T,unitarity_residual,status"
    );
    assert_eq!(rows.len(), 3);
    // middle row sits at k = π, not on a resonance of d = 1.25; rerun on one
    let out = qring(&[
        "sweep-k",
        "--config",
        cfg.to_str().unwrap(),
        "--symmetric",
        "--d",
        "1",
        "--k-min",
        "0.5*pi",
        "--k-max",
        "1.5*pi",
        "--points",
        "3",
    ]);
    let (header, rows) = parse_csv(&stdout(&out));
    let mid = &rows[1];
    assert_eq!(num(&mid[col(&header, "k")]), PI);
    assert!((num(&mid[col(&header, "prob_T")]) - 1.0).abs() < 1e-10);
    for row in &rows {
        assert!(num(&row[col(&header, "unitarity_residual")]).abs() < 1e-10);
    }
}

#[test]
fn sweep_k_verify_column_within_tolerance() {
    let cfg = fixture("generic.ini");
    let out = qring(&[
        "sweep-k",
        "--config",
        cfg.to_str().unwrap(),
        "--verify",
        "--symmetric",
    ]);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header.last().unwrap(), "oracle_deviation");
    assert_eq!(rows.len(), 41);
    let k = col(&header, "k");
    assert!(rows.windows(2).all(|w| num(&w[1][k]) > num(&w[0][k])));
    for row in &rows {
        assert!(num(row.last().unwrap()) <= 1e-10, "{row:?}");
    }
}

#[test]
fn singular_rows_are_marked() {
    // decoupled Neumann junction: assembly is singular at k = nπ/d
    let out = qring(&[
        "sweep-k",
        "--symmetric",
        "--d",
        "1",
        "--set",
        "node_I.theta1=0",
        "--set",
        "node_I.theta2=0",
        "--set",
        "node_I.theta3=0",
        "--set",
        "node_I.alpha=0",
        "--set",
        "node_I.beta=0",
        "--set",
        "node_I.gamma=0",
        "--set",
        "node_I.delta=0",
        "--set",
        "node_I.a=0",
        "--set",
        "node_I.b=0",
        "--set",
        "node_I.L0=1",
        "--k-min",
        "0.5*pi",
        "--k-max",
        "1.5*pi",
        "--points",
        "3",
    ]);
    let text = stdout(&out);
    let mid = text.lines().nth(2).unwrap();
    assert!(mid.ends_with(",,,,,,,,singular"), "{mid}");
}

#[test]
fn zero_k_min_is_rejected() {
    let cfg = fixture("generic.ini");
    let out = qring(&["sweep-k", "--config", cfg.to_str().unwrap(), "--k-min", "0"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k must be positive"), "{err}");
}

#[test]
fn missing_key_and_bad_number_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    let text = std::fs::read_to_string(fixture("generic.ini")).unwrap();
    std::fs::write(&path, text.replace("gamma = -0.2\n", "")).unwrap();
    let out = qring(&["smatrix", "--config", path.to_str().unwrap(), "--k", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("'gamma'"));

    std::fs::write(&path, text.replace("delta = 0.8", "delta = eight")).unwrap();
    let out = qring(&["smatrix", "--config", path.to_str().unwrap(), "--k", "1"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 8") && err.contains("delta"), "{err}");
}

#[test]
fn config_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qring"))
        .args(["smatrix", "--k", "1.0", "--symmetric"])
        .env("QRING_CONFIG", fixture("generic.ini"))
        .output()
        .unwrap();
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header.join(","), "matrix,row,col,re,im,abs");
    assert_eq!(rows.len(), 9 + 9 + 4);
    assert_eq!(rows[0][..3], ["S_I", "x2", "x2"]);
    assert_eq!(rows[18][..3], ["S_R", "x1", "x1"]);
}

#[test]
fn flux_switch_fixture() {
    let cfg = fixture("switch.ini");
    let out = qring(&["sweep-flux", "--config", cfg.to_str().unwrap()]);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(
        header.join(","),
        "theta_B,re_R,im_R,re_T,im_T,prob_R,prob_T,status"
    );
    assert_eq!(rows.len(), 9);
    let (tb, pr, pt) = (
        col(&header, "theta_B"),
        col(&header, "prob_R"),
        col(&header, "prob_T"),
    );
    assert_eq!(num(&rows[4][tb]), PI);
    assert!(num(&rows[0][pt]) > 1.0 - 1e-10);
    assert!(num(&rows[4][pt]) < 1e-10);
    assert!(num(&rows[8][pt]) > 1.0 - 1e-10);
    for row in &rows {
        assert!((num(&row[pr]) + num(&row[pt]) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn flux_sweep_refuses_asymmetric_ring() {
    let cfg = fixture("generic.ini");
    let text = std::fs::read_to_string(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("asym.ini");
    let node_ii = text
        .split("[node_II]")
        .next()
        .unwrap()
        .replace("[node_I]", "[node_II]")
        .replace("theta1 = 0.7", "theta1 = 0.9")
        .replace("xi = 1.5", "xi = 0.25");
    let body = text.replace("[node_II]\nxi = 0.25\n", &node_ii);
    std::fs::write(&path, body).unwrap();
    let out = qring(&[
        "sweep-flux",
        "--config",
        path.to_str().unwrap(),
        "--k",
        "1",
        "--flux-min",
        "0",
        "--flux-max",
        "pi",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetric"));
}

#[test]
fn localized_rows_and_wavefunction() {
    let cfg = fixture("generic.ini");
    let dir = tempfile::tempdir().unwrap();
    let wf = dir.path().join("wf.csv");
    let d = 1.25;
    let out = qring(&[
        "localized",
        "--config",
        cfg.to_str().unwrap(),
        "--symmetric",
        "--d",
        "1.25",
        "--k-min",
        &format!("{}", 0.5 * PI / d),
        "--k-max",
        &format!("{}", 2.5 * PI / d),
        "--points",
        "2000",
        "--wavefunction",
        wf.to_str().unwrap(),
        "--state",
        "2",
    ]);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(
        header.join(","),
        "k,n_estimate,rank,re_C2,im_C2,re_D2,im_D2,re_C3,im_C3,re_D3,im_D3,N"
    );
    assert_eq!(rows.len(), 2);
    for (row, n) in rows.iter().zip(1..) {
        assert_eq!(row[1], n.to_string());
        assert_eq!(row[2], "3");
        assert!((num(&row[0]) - n as f64 * PI / d).abs() < 1e-9);
    }

    let (wh, samples) = parse_csv(&std::fs::read_to_string(&wf).unwrap());
    assert_eq!(wh.join(","), "x,re_phi2,im_phi2,re_phi3,im_phi3");
    assert_eq!(samples.len(), 513);
    // Simpson on the 512 panels between samples
    let vals: Vec<(f64, f64)> = samples
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.iter().map(|s| num(s)).collect();
            (v[0], v[1] * v[1] + v[2] * v[2] + v[3] * v[3] + v[4] * v[4])
        })
        .collect();
    let h = (vals[512].0 - vals[0].0) / 512.0;
    let mut sum = vals[0].1 + vals[512].1;
    for (j, (_, f)) in vals.iter().enumerate().take(512).skip(1) {
        sum += if j % 2 == 1 { 4.0 } else { 2.0 } * f;
    }
    assert!((sum * h / 3.0 - 1.0).abs() < 1e-8);
}

#[test]
fn localized_perturbed_ring_has_no_rows() {
    let cfg = fixture("generic.ini");
    let d = 1.25;
    let out = qring(&[
        "localized",
        "--config",
        cfg.to_str().unwrap(),
        "--d",
        "1.25",
        "--k-min",
        &format!("{}", 0.5 * PI / d),
        "--k-max",
        &format!("{}", 2.5 * PI / d),
        "--points",
        "2000",
        "--set",
        "node_II.theta1=0.8",
        "--set",
        "node_II.theta2=2.2",
        "--set",
        "node_II.theta3=-1.4",
        "--set",
        "node_II.alpha=0.4",
        "--set",
        "node_II.beta=1.3",
        "--set",
        "node_II.gamma=-0.2",
        "--set",
        "node_II.delta=0.8",
        "--set",
        "node_II.a=2.1",
        "--set",
        "node_II.b=-0.6",
        "--set",
        "node_II.L0=1.1",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1, "{text}");
}

#[test]
fn json_rows_carry_csv_fields() {
    let cfg = fixture("switch.ini");
    let csv = stdout(&qring(&["sweep-flux", "--config", cfg.to_str().unwrap()]));
    let json = stdout(&qring(&[
        "sweep-flux",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]));
    let (header, rows) = parse_csv(&csv);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), rows.len());
    for (obj, row) in arr.iter().zip(&rows) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        assert_eq!(
            obj["prob_T"].as_f64().unwrap(),
            num(&row[col(&header, "prob_T")])
        );
    }
}

#[test]
fn output_is_deterministic() {
    let cfg = fixture("generic.ini");
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        stdout(&qring(&[
            "sweep-k",
            "--config",
            cfg.to_str().unwrap(),
            "--points",
            "400",
            "--verify",
            "--symmetric",
            "--output",
            p.to_str().unwrap(),
        ]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let v1 = stdout(&qring(&["verify", "--seed", "5", "--draws", "30"]));
    let v2 = stdout(&qring(&["verify", "--seed", "5", "--draws", "30"]));
    assert_eq!(v1, v2);
}

#[test]
fn verify_passes_and_reports_seed() {
    let cfg = fixture("switch.ini");
    let text = stdout(&qring(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "17",
    ]));
    assert!(text.starts_with("qring verify: seed 17"));
    assert!(text.contains("result: all checks passed"), "{text}");
    assert!(text.contains("INFO switch fixture: printed-form T residual"));
    assert!(text.contains("configured ring vs direct solve"));
}

#[test]
fn verify_fails_on_injected_fault() {
    let out = qring(&["verify", "--draws", "10", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL node S-matrix unitarity"), "{text}");
}
