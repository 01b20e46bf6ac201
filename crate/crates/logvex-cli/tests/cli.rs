//! End-to-end tests of the binary: exit codes, output schemas, byte-level
//! determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::{Deserialize, Serialize};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logvex"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gauss3(dir: &Path) -> PathBuf {
    write(
        dir,
        "gauss3.json",
        r#"{ "schema": 1, "phi": { "type": "gaussian", "dim": 3 },
             "L": { "type": "euclidean_ball", "dim": 3, "radius": 1.0 } }"#,
    )
}

fn ball3(dir: &Path) -> PathBuf {
    write(
        dir,
        "ball3.json",
        r#"{ "schema": 1, "body": { "type": "euclidean_ball", "dim": 3, "radius": 1.0 } }"#,
    )
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn rectangle_demo_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo.csv");
    let res = run(bin().args([
        "rectangle-demo",
        "--tmin",
        "0.01",
        "--tmax",
        "10",
        "--points",
        "200",
        "--out",
    ])
    .arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,area_ball,area_omega,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert!(stderr(&res).contains("all_pass: true"));
}

#[test]
fn ldp_scan_csv_columns_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let body = ball3(dir.path());
    let out = dir.path().join("scan.csv");
    let res = run(bin()
        .args(["ldp-scan", "--grid", "4:12:5", "--measure"])
        .arg(&measure)
        .arg("--body")
        .arg(&body)
        .arg("--out")
        .arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("t,rho,rho_lo,rho_hi,window_sup"));
    assert_eq!(text.lines().count(), 6);
    assert!(stderr(&res).contains("verdict: consistent"));
}

#[test]
fn pathological_phi_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.json");
    let res = run(bin().args(["pathological-phi", "--kmax", "10", "--out"]).arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "pathological_phi");
    let knots = v["report"]["knots"].as_array().unwrap();
    assert_eq!(knots.len(), 11);
    // alpha_0 = 32 under the doubling rule.
    assert_eq!(knots[0]["log2_alpha"], 5);
    assert!(knots.iter().all(|k| k["sharp"] == true && k["t_k_interior"] == true));
}

#[derive(Serialize, Deserialize)]
struct Envelope<R> {
    schema: u32,
    kind: String,
    report: R,
}

#[test]
fn witness_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let body = write(
        dir.path(),
        "box08.json",
        r#"{ "schema": 1, "body": { "type": "box", "half_widths": [0.8, 0.8, 0.8] } }"#,
    );
    let out = dir.path().join("wit.json");
    let res = run(bin()
        .args(["witness", "--measure"])
        .arg(&measure)
        .arg("--body")
        .arg(&body)
        .arg("--out")
        .arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let parsed: Envelope<logvex::WitnessOutcome<f64>> = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.schema, 1);
    assert!(matches!(parsed.report, logvex::WitnessOutcome::Witness { t, .. } if t <= 4.0));
    let mut again = serde_json::to_string_pretty(&parsed).unwrap();
    again.push('\n');
    assert_eq!(text, again, "schema round-trip must be lossless");
}

#[test]
fn exceptional_set_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write(
        dir.path(),
        "sq.json",
        r#"{ "schema": 1, "phi": { "type": "power", "p": 2.0 },
             "L": { "type": "box", "half_widths": [1.0, 1.0] } }"#,
    );
    let out = dir.path().join("exc.json");
    let res = run(bin()
        .args(["exceptional-set", "--alpha", "1.1", "--tmax", "10", "--step", "0.01", "--measure"])
        .arg(&measure)
        .arg("--out")
        .arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let parsed: Envelope<logvex::ExceptionalSet<f64>> = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.report.points_in, 574);
    assert!((parsed.report.measure - 5.74).abs() < 1e-12);
    assert_eq!(parsed.report.first_in, Some(0.31));
    assert_eq!(parsed.report.last_in, Some(6.04));
    let mut again = serde_json::to_string_pretty(&parsed).unwrap();
    again.push('\n');
    assert_eq!(text, again);
}

#[test]
fn misplaced_field_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let body = write(
        dir.path(),
        "bad.json",
        r#"{ "schema": 1, "body": { "type": "box", "half_widths": [1.0, 1.0], "radius": 2.0 } }"#,
    );
    let res = run(bin()
        .args(["mass", "--grid", "1:2:2", "--measure"])
        .arg(&measure)
        .arg("--body")
        .arg(&body));
    assert_eq!(res.status.code(), Some(2));
    let err = stderr(&res);
    assert!(err.contains("does not take field `radius`"), "{err}");
}

#[test]
fn unknown_field_and_schema_version_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{ "schema": 1, "body": { "type": "box", "half_widths": [1.0] }, "extra": 5 }"#,
    );
    let res = run(bin()
        .args(["mass", "--grid", "1:2:2", "--measure"])
        .arg(&measure)
        .arg("--body")
        .arg(&unknown));
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("unknown field `extra`"));

    let vers = write(
        dir.path(),
        "vers.json",
        r#"{ "schema": 9, "body": { "type": "box", "half_widths": [1.0] } }"#,
    );
    let res = run(bin()
        .args(["mass", "--grid", "1:2:2", "--measure"])
        .arg(&measure)
        .arg("--body")
        .arg(&vers));
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("unsupported schema version 9"));
}

#[test]
fn strict_inconclusive_exits_three() {
    // Two balls differing by 1e-12 in radius: the closed radial forms are
    // certified only to ~1e-11 so every comparison overlaps.
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let k = ball3(dir.path());
    let l = write(
        dir.path(),
        "ball_eps.json",
        r#"{ "schema": 1, "body": { "type": "euclidean_ball", "dim": 3, "radius": 1.000000000001 } }"#,
    );
    let out = dir.path().join("bp.json");
    let mut cmd = bin();
    cmd.args(["bp-experiment", "--grid", "1:2:2", "--net", "4", "--strict", "--measure"])
        .arg(&measure)
        .arg("--body-k")
        .arg(&k)
        .arg("--body-l")
        .arg(&l)
        .arg("--out")
        .arg(&out);
    let res = run(&mut cmd);
    assert_eq!(res.status.code(), Some(3), "{}", stderr(&res));
    assert!(stderr(&res).contains("inconclusive"));
    // Without --strict the same run exits 0.
    let mut cmd = bin();
    cmd.args(["bp-experiment", "--grid", "1:2:2", "--net", "4", "--measure"])
        .arg(&measure)
        .arg("--body-k")
        .arg(&k)
        .arg("--body-l")
        .arg(&l)
        .arg("--out")
        .arg(&out);
    assert_eq!(run(&mut cmd).status.code(), Some(0));
}

#[test]
fn bad_grid_spec_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let body = ball3(dir.path());
    for grid in ["1:2", "1:2:0", "1:2:3:cubic", "a:2:3"] {
        let res = run(bin()
            .args(["mass", "--grid", grid, "--measure"])
            .arg(&measure)
            .arg("--body")
            .arg(&body));
        assert_eq!(res.status.code(), Some(2), "grid `{grid}` should be rejected");
    }
}

#[test]
fn uniform_measure_paths() {
    let dir = tempfile::tempdir().unwrap();
    let uni = write(
        dir.path(),
        "uni.json",
        r#"{ "schema": 1, "uniform_on": { "type": "box", "half_widths": [1.0, 1.0] } }"#,
    );
    let disc = write(
        dir.path(),
        "disc.json",
        r#"{ "schema": 1, "body": { "type": "euclidean_ball", "dim": 2, "radius": 1.0 } }"#,
    );
    // mass works on a uniform measure (exact circle-box path).
    let out = dir.path().join("m.csv");
    let res = run(bin()
        .args(["mass", "--grid", "0.5:1:2", "--measure"])
        .arg(&uni)
        .arg("--body")
        .arg(&disc)
        .arg("--out")
        .arg(&out));
    assert!(res.status.success(), "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("exact"));
    // tail needs a phi; uniform configs are rejected with a diagnostic.
    let res = run(bin()
        .args(["tail", "--grid", "1:2:2", "--measure"])
        .arg(&uni)
        .arg("--body")
        .arg(&disc));
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("phi-based measure"));
}

#[test]
fn identical_config_and_seed_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let lp = write(
        dir.path(),
        "lp.json",
        r#"{ "schema": 1, "body": { "type": "lp_ball", "p": 3.0, "semi_axes": [1.0, 0.8, 1.2] } }"#,
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let mut cmd = bin();
        cmd.args(["mass", "--grid", "0.5:2:3", "--budget", "60000", "--seed", "7", "--measure"])
            .arg(&measure)
            .arg("--body")
            .arg(&lp)
            .arg("--out")
            .arg(out)
            .env("LOGVEX_THREADS", threads);
        let res = run(&mut cmd);
        assert!(res.status.success(), "{}", stderr(&res));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb, "MC output must not depend on the thread count");
    assert!(String::from_utf8(ta).unwrap().contains("monte_carlo"));
}

#[test]
fn lp_exponent_accepts_inf() {
    let dir = tempfile::tempdir().unwrap();
    let measure = gauss3(dir.path());
    let inf_ball = write(
        dir.path(),
        "linf.json",
        r#"{ "schema": 1, "body": { "type": "lp_ball", "p": "inf", "semi_axes": [0.8, 0.8, 0.8] } }"#,
    );
    let box08 = write(
        dir.path(),
        "box08.json",
        r#"{ "schema": 1, "body": { "type": "box", "half_widths": [0.8, 0.8, 0.8] } }"#,
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (body, out) in [(&inf_ball, &a), (&box08, &b)] {
        let res = run(bin()
            .args(["mass", "--grid", "1:2:2", "--measure"])
            .arg(&measure)
            .arg("--body")
            .arg(body)
            .arg("--out")
            .arg(out));
        assert!(res.status.success(), "{}", stderr(&res));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
