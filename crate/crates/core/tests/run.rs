use std::fs;

use lorentz_corrugate::config::RunConfig;
use lorentz_corrugate::fields::{isometric_default, pullback_metric, Grid};
use lorentz_corrugate::scenario::Scenario;
use lorentz_corrugate::scheduler::{run_nash_kuiper, ScheduleMode};
use lorentz_corrugate::Error;

fn small(scenario: &str, stages: usize) -> RunConfig {
    RunConfig { grid: 33, stages, scenario: scenario.into(), ..RunConfig::default() }
}

#[test]
fn flat_shrink_small_grid() {
    let out = run_nash_kuiper(&small("flat-shrink", 4)).unwrap();
    assert_eq!(out.ledger.rows.len(), 4);
    for row in &out.ledger.rows {
        assert!(row.sup_default <= row.next_gap, "stage {}: {} > {}", row.stage, row.sup_default, row.next_gap);
        assert!(row.long_next, "stage {} not long for the next metric", row.stage);
        assert!(row.c0_pass && row.audits_pass, "stage {}", row.stage);
    }
    let drift: f64 = out.ledger.rows.iter().map(|r| r.c0_increment).sum();
    assert!(drift <= out.summary.c0_budget && out.summary.c0_budget < 0.05);
    assert!(out.summary.c0_drift <= drift + 1e-15);
    assert!(out.summary.monotone);
}

#[test]
fn aniso_shrink_runs() {
    let out = run_nash_kuiper(&small("aniso-shrink", 3)).unwrap();
    assert!(out.summary.stages_passed);
    let g = Scenario::AnisoShrink.target(Grid::square(33).unwrap());
    // The final surface is still long for the target.
    isometric_default(&pullback_metric(&out.jet), &g).unwrap();
}

#[test]
fn theoretical_mode_outruns_the_cap() {
    // The first stage gap is ρ‖Δ‖ with ρ = (0.9 / 2K̃)², far below what any
    // N up to the cap reaches; the run stops cleanly with its plan on disk.
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        mode: ScheduleMode::Theoretical,
        outdir: Some(dir.path().to_string_lossy().into_owned()),
        ..small("flat-shrink", 2)
    };
    let e = run_nash_kuiper(&cfg).unwrap_err();
    assert!(matches!(e, Error::BudgetExceeded { .. }), "{e}");
    let schedule = fs::read_to_string(dir.path().join("schedule.csv")).unwrap();
    assert_eq!(schedule.lines().count(), 3);
    assert!(dir.path().join("constants.csv").exists());
    assert!(dir.path().join("ledger.csv").exists());
}

#[test]
fn rank_deficient_default_is_rejected() {
    let e = run_nash_kuiper(&small("strip-primitive", 2)).unwrap_err();
    assert!(matches!(e, Error::Domain(_)), "{e}");
}

#[test]
fn artifacts_are_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let cfg = RunConfig { outdir: Some(d.path().to_string_lossy().into_owned()), ..small("flat-shrink", 2) };
        run_nash_kuiper(&cfg).unwrap();
    }
    for name in ["ledger.csv", "steps.csv", "constants.csv", "schedule.csv", "stage_001.obj", "stage_002.obj"] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        assert!(!a.is_empty() && a == b, "{name} differs");
    }
    let resolved = fs::read_to_string(dirs[0].path().join("config.resolved.json")).unwrap();
    let cfg = RunConfig::from_json(&resolved).unwrap();
    assert_eq!(cfg.grid, 33);
    assert_eq!(cfg.n_cap, RunConfig::default().n_cap);
    assert!(dirs[0].path().join("summary.json").exists());
}
