use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lorentz-corrugate"));
    c.env_remove("LORENTZ_CORRUGATE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.json");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn info_lists_scenarios() {
    let o = run(&["info"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for id in ["flat-shrink", "aniso-shrink", "strip-primitive"] {
        assert!(s.contains(id), "{s}");
    }
}

#[test]
fn bounds_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let o = run(&["bounds", "--alpha-max", "1", "--k", "3", "--scenario", "flat-shrink", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let k_row = text.lines().find(|l| l.starts_with("K,")).unwrap();
    let k: f64 = k_row[2..].parse().unwrap();
    assert!((k - (2.0 * 1f64.cosh() + 1.0)).abs() < 1e-12);
    assert!(text.lines().any(|l| l.starts_with("T,")));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["bounds", "--alpha-max", "1", "--scenario", "bogus"])), 2);
    assert_eq!(code(&run(&["bounds"])), 2);
    assert_eq!(code(&run(&["bounds", "--alpha-max=-1"])), 1);
    assert_eq!(code(&run(&["verify", "--level", "medium"])), 2);
    assert_eq!(code(&run(&["decompose", "--input", "/nonexistent.csv", "--outdir", "/tmp"])), 2);
    assert_eq!(code(&run(&["corrugate"])), 2);
    assert_eq!(code(&run(&["corrugate", "--N", "8", "--ell", "1"])), 2);
    let o = bin().env("LORENTZ_CORRUGATE_THREADS", "zero").arg("info").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn decompose_writes_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    let mut text = String::from("x_idx,y_idx,E,F,G\n");
    for j in 0..5 {
        for i in 0..5 {
            text.push_str(&format!("{i},{j},0.5,0.1,0.7\n"));
        }
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&["decompose", "--input", input.to_str().unwrap(), "--k", "4", "--outdir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let forms = fs::read_to_string(out.join("forms.csv")).unwrap();
    assert_eq!(forms.lines().count(), 5);
    let eta = fs::read_to_string(out.join("eta_0.csv")).unwrap();
    assert_eq!(eta.lines().count(), 26);

    fs::write(&input, "x_idx,y_idx,E,F,G\n0,0,1,0\n").unwrap();
    let o = run(&["decompose", "--input", input.to_str().unwrap(), "--outdir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn corrugate_fixed_and_selected() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("f.obj");
    let rec = dir.path().join("step.csv");
    let o = run(&[
        "corrugate",
        "--grid",
        "17",
        "--N",
        "20",
        "--out",
        mesh.to_str().unwrap(),
        "--record",
        rec.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let obj = fs::read_to_string(&mesh).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 17 * 17);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 16 * 16);
    let record = fs::read_to_string(&rec).unwrap();
    assert_eq!(record.lines().count(), 2);
    assert!(record.lines().nth(1).unwrap().ends_with("true"));

    let o = run(&["corrugate", "--grid", "17", "--eps", "0.01", "--ell", "0.6,0.8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("tried N=16"));
}

#[test]
fn corrugate_rejects_non_riemannian_eta() {
    let dir = tempfile::tempdir().unwrap();
    let eta = dir.path().join("eta.csv");
    let mut text = String::from("x_idx,y_idx,eta\n");
    for j in 0..5 {
        for i in 0..5 {
            text.push_str(&format!("{i},{j},1.5\n"));
        }
    }
    fs::write(&eta, text).unwrap();
    let o = run(&["corrugate", "--eta-file", eta.to_str().unwrap(), "--N", "10"]);
    assert_eq!(code(&o), 1);
    let o = run(&["corrugate", "--eta-file", eta.to_str().unwrap(), "--N", "10", "--grid", "9"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn run_is_deterministic_across_pool_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": 33, "stages": 2, "scenario": "flat-shrink", "epsilon": 0.05}"#);
    let mut ledgers = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let o = bin()
            .env("LORENTZ_CORRUGATE_THREADS", threads)
            .args(["run", "--config", &cfg, "--outdir", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        for name in ["stage_001.obj", "stage_002.obj", "constants.csv", "config.resolved.json", "summary.json"] {
            assert!(out.join(name).exists(), "{name}");
        }
        ledgers.push((fs::read(out.join("ledger.csv")).unwrap(), fs::read(out.join("steps.csv")).unwrap()));
    }
    assert!(ledgers[0] == ledgers[1]);
}

#[test]
fn run_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": 33, "stagez": 2}"#);
    assert_eq!(code(&run(&["run", "--config", &cfg])), 2);
    let cfg = write_config(dir.path(), r#"{"grid": 33, "scenario": "strip-primitive"}"#);
    assert_eq!(code(&run(&["run", "--config", &cfg])), 1);
    assert_eq!(code(&run(&["run", "--config", "/nonexistent.json"])), 2);
}
