use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_viscowave");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn medium(dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    let o = run(&["medium", name, "--output", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    p
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = medium(dir.path(), "a");
    let o = run(&["validate", "--medium", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| !l.contains("FAIL")));

    let neg = medium(dir.path(), "negative-weight");
    let o = run(&["validate", "--medium", neg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("cpd_time             FAIL"));
    assert!(out.contains("cpd_freq             FAIL"));
    assert!(out.contains("witness:"));

    let text = std::fs::read_to_string(&a).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replace("\"density\": 1.0,", "")).unwrap();
    let o = run(&["validate", "--medium", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing field `density`"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["sweep"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["flux", "--medium", "x.json", "--angles", "0,abc"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let a = medium(dir.path(), "a");
    let a = a.to_str().unwrap();
    assert_eq!(run(&["sweep", "--medium", a, "--omega-count", "1"]).status.code(), Some(2));
    assert_eq!(run(&["flux", "--medium", a, "--angles", "0,95"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--medium", a, "--directions", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn sweep_limits_and_shape() {
    let dir = TempDir::new().unwrap();
    let a = medium(dir.path(), "a");
    let o = run(&[
        "sweep",
        "--medium",
        a.to_str().unwrap(),
        "--directions",
        "1,0,0",
        "--omega-min",
        "0.01",
        "--omega-max",
        "10000",
        "--omega-count",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(
        "omega,nx,ny,nz,mode,re_kappa,im_kappa,phase_speed,attenuation,a0,c_eigs_1,c_eigs_2,c_eigs_3,a_eigs_1,a_eigs_2,a_eigs_3,status\n"
    ));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    let speeds: Vec<f64> = rows.iter().map(|r| num(&r[7])).collect();
    // shear channel in [1, sqrt 1.5], longitudinal in [sqrt 3, 2]
    for (i, &c) in speeds.iter().enumerate() {
        let (lo, hi) = if i % 3 < 2 { (1.0, 1.5f64.sqrt()) } else { (3f64.sqrt(), 2.0) };
        assert!(c >= lo - 1e-3 && c <= hi + 1e-3, "{c}");
    }
    assert!(speeds[0] < 1.001 && speeds[3] > 1.5f64.sqrt() - 1e-3);
    assert!(rows.iter().all(|r| r[16] == "ok"));
    assert!(rows[0][0] == "1.000000000000e-02" && rows[3][0] == "1.000000000000e+04");

    let el = medium(dir.path(), "elastic");
    let o = run(&["sweep", "--medium", el.to_str().unwrap(), "--icosphere-level", "1", "--omega-count", "3"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3 * 42 * 3);
    assert!(rows.iter().all(|r| num(&r[8]) == 0.0));
}

#[test]
fn sweep_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let b = medium(dir.path(), "b");
    let out: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("s{i}.csv"));
            let o = run(&[
                "sweep",
                "--medium",
                b.to_str().unwrap(),
                "--icosphere-level",
                "1",
                "--output",
                p.to_str().unwrap(),
                "--seed",
                "7",
            ]);
            assert_eq!(o.status.code(), Some(0));
            std::fs::read(p).unwrap()
        })
        .collect();
    assert!(!out[0].is_empty());
    assert_eq!(out[0], out[1]);
}

#[test]
fn flux_sweep() {
    let dir = TempDir::new().unwrap();
    let el = medium(dir.path(), "elastic");
    let o = run(&["flux", "--medium", el.to_str().unwrap(), "--omega-count", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("worst dot_kI"));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3 * 12 * 3 * 5);
    assert!(rows.iter().all(|r| num(&r[13]) == 0.0));

    let a = medium(dir.path(), "a");
    let fpath = dir.path().join("flux.csv");
    let o = run(&[
        "flux",
        "--medium",
        a.to_str().unwrap(),
        "--directions",
        "1,0,0;0,0.6,0.8",
        "--omega-min",
        "0.1",
        "--omega-max",
        "10",
        "--omega-count",
        "3",
        "--output",
        fpath.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("acute_angle          PASS"));
    let flux = csv_rows(&std::fs::read_to_string(&fpath).unwrap());
    assert!(flux.iter().all(|r| r[17] == "ok" && num(&r[13]) >= -1e-10));

    // angle 0 reproduces the sweep attenuation
    let o = run(&[
        "sweep",
        "--medium",
        a.to_str().unwrap(),
        "--directions",
        "1,0,0;0,0.6,0.8",
        "--omega-min",
        "0.1",
        "--omega-max",
        "10",
        "--omega-count",
        "3",
    ]);
    let sweep = csv_rows(&stdout(&o));
    let zero: Vec<&Vec<String>> = flux.iter().filter(|r| num(&r[16]) == 0.0).collect();
    assert_eq!(zero.len(), sweep.len());
    for (f, s) in zero.iter().zip(&sweep) {
        assert_eq!(f[7], s[4]);
        let (beta, att) = (num(&f[9]), num(&s[8]));
        assert!((beta - att).abs() <= 1e-12 * att.abs().max(1e-300), "{beta} {att}");
    }
}

#[test]
fn recover_channels() {
    let dir = TempDir::new().unwrap();
    let a = medium(dir.path(), "a");
    let o = run(&["recover", "--medium", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    let mass: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("recovered mass: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(mass > 0.13 && mass < 0.14, "{mass}");

    // an interval below the support carries no mass
    let o = run(&["recover", "--medium", a.to_str().unwrap(), "--interval", "0.1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let mass: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("recovered mass: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(mass.abs() < 1e-6, "{mass}");

    let el = medium(dir.path(), "elastic");
    let o = run(&["recover", "--medium", el.to_str().unwrap(), "--channel", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recovered mass: 0.000000000000e+00"));

    let b = medium(dir.path(), "b");
    let o = run(&["recover", "--medium", b.to_str().unwrap(), "--direction", "0.3,0.5,0.8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no frequency-independent eigenvector"));

    let o = run(&["recover", "--medium", a.to_str().unwrap(), "--channel", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    medium(dir.path(), "a");
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{
  "medium": "a.json",
  "frequencies": {"min": 0.1, "max": 10.0, "count": 4, "scale": "log"},
  "directions": [[0, 0, 2]],
  "seed": 3
}"#,
    )
    .unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4 * 3);
    assert_eq!(rows[0][3], "1.000000000000e+00");

    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--omega-count", "2"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 2 * 3);

    std::fs::write(&cfg, r#"{"medium": "a.json", "unknown": 1}"#).unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
