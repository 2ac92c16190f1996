//! The stage iteration: stage metrics `g_n = g + δ_n Δ`, one successive
//! corrugation per stage, and the per-stage ledger.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{form_constant_c, m_constant, t_constant, BoundConstants, M_INFLATION, M_SAMPLES};
use crate::config::RunConfig;
use crate::corrugation::{amplitude_from_default, successive_cp, CorrugationStepRecord, Quadrature, SelectOptions};
use crate::decomp::{build_dictionary, decompose, FormDictionary, PrimitiveDecomposition};
use crate::error::{Error, Result};
use crate::fields::io::{fmt_f64, write_obj};
use crate::fields::{
    c0_distance, c1_increment, c1_increment_coordinate, corrugation_frame, isometric_default, pullback_metric,
    sup_operator_norm_form, EmbeddingJet, MetricField, PSD_TOL,
};

/// Largest fraction of `‖g_{n+1} - g_n‖` a stage may leave as error.
pub const STAGE_THETA_MAX: f64 = 0.25;
/// Times a stage is repeated with a halved tolerance when its checks fail.
pub const STAGE_RETRIES: u32 = 4;
/// Target ratio of consecutive summability terms in theoretical mode.
pub const THEORETICAL_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// `δ_n = ρ^n` with `√ρ · 2K̃ ≤ 0.9`.
    Theoretical,
    /// `δ_n = 2^{-n}`.
    #[default]
    Practical,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMode::Theoretical => "theoretical",
            ScheduleMode::Practical => "practical",
        })
    }
}

impl FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(ScheduleMode::Theoretical),
            "practical" => Ok(ScheduleMode::Practical),
            _ => Err(Error::Config(format!("unknown schedule mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub mode: ScheduleMode,
    pub k_tilde: f64,
    /// Ratio `δ_n / δ_{n-1}`.
    pub rho: f64,
    /// `δ_0 = 1, δ_1, …, δ_T`.
    pub deltas: Vec<f64>,
    /// C⁰ budgets `a_1, …, a_T`.
    pub a: Vec<f64>,
    // ln(δ_{n-1} - δ_n), exact even where δ_n underflows.
    log_gaps: Vec<f64>,
}

pub fn make_schedule(k_tilde: f64, stages: usize, mode: ScheduleMode, epsilon: f64) -> Result<Schedule> {
    if stages == 0 {
        return Err(Error::Config("stages must be at least 1".into()));
    }
    if !(k_tilde >= 1.0 && k_tilde.is_finite()) {
        return Err(Error::Domain(format!("K_tilde must be finite and >= 1, got {k_tilde}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let rho = match mode {
        ScheduleMode::Practical => 0.5,
        ScheduleMode::Theoretical => {
            // Ratios are evaluated in log space; the margin keeps their
            // rounding below the target.
            let mut rho = (THEORETICAL_RATIO * (1.0 - 1e-12) / (2.0 * k_tilde)).powi(2);
            while rho.sqrt() * 2.0 * k_tilde > THEORETICAL_RATIO {
                rho *= 1.0 - 1e-15;
            }
            rho
        }
    };
    let deltas = (0..=stages).map(|n| rho.powi(n as i32)).collect();
    let log_gaps = (1..=stages).map(|n| (n - 1) as f64 * rho.ln() + (-rho).ln_1p()).collect();
    let a = (1..=stages).map(|n| epsilon * 0.5f64.powi(n as i32 + 1)).collect();
    Ok(Schedule { mode, k_tilde, rho, deltas, a, log_gaps })
}

impl Schedule {
    pub fn stages(&self) -> usize {
        self.deltas.len() - 1
    }

    /// `δ_n`, zero past the last stage.
    pub fn delta(&self, n: usize) -> f64 {
        self.deltas.get(n).copied().unwrap_or(0.0)
    }

    /// `√(δ_{n-1} - δ_n) (2K̃)^n` for `n = 1..=T`.
    pub fn terms(&self) -> Vec<f64> {
        let l2k = (2.0 * self.k_tilde).ln();
        self.log_gaps.iter().enumerate().map(|(i, lg)| (0.5 * lg + (i + 1) as f64 * l2k).exp()).collect()
    }

    /// Ratios of consecutive terms, computed in log space.
    pub fn term_ratios(&self) -> Vec<f64> {
        let l2k = (2.0 * self.k_tilde).ln();
        self.log_gaps.windows(2).map(|w| (0.5 * (w[1] - w[0]) + l2k).exp()).collect()
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        self.terms()
            .into_iter()
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect()
    }

    pub fn budget_total(&self) -> f64 {
        self.a.iter().sum()
    }
}

/// `g_n = g + δ_n Δ` for `n = 0..=T`.
pub fn stage_metrics(g: &MetricField, delta: &MetricField, schedule: &Schedule) -> Result<Vec<MetricField>> {
    schedule.deltas.iter().map(|&d| g.combine(1.0, delta, d)).collect()
}

/// What a stage needs besides the two metrics.
#[derive(Debug, Clone, Copy)]
pub struct StageContext<'a> {
    pub stage: usize,
    /// The run's target; every norm is taken relative to it.
    pub g: &'a MetricField,
    /// `g_{n-1}`.
    pub g_prev: &'a MetricField,
    /// Fraction of `‖g_{n+1} - g_n‖` allowed as stage error.
    pub theta: f64,
    pub quadrature: Quadrature,
    pub n0: u64,
    pub n_cap: u64,
    pub mode: ScheduleMode,
}

/// One ledger row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub delta: f64,
    pub n_list: Vec<u64>,
    pub alpha_max: f64,
    pub eta_max: f64,
    pub step_eps: f64,
    pub retries: u32,
    /// `‖f_n*h - g_n‖`.
    pub sup_default: f64,
    /// `‖g_{n+1} - g_n‖`.
    pub next_gap: f64,
    pub error_pass: bool,
    /// `f_n*h - g_{n+1}` positive semi-definite.
    pub long_next: bool,
    /// `‖f_n*h - g‖`.
    pub sup_default_g: f64,
    pub c0_increment: f64,
    pub a_n: f64,
    pub c0_pass: bool,
    pub c1_increment: f64,
    /// C¹ increment with the coordinate metric on the source.
    pub c1_increment_coord: f64,
    /// `a_n + T ‖g_n - g_{n-1}‖^{1/2} (2K̃)^n`.
    pub c1_bound: f64,
    pub c1_ratio: f64,
    pub c1_ratio_coord: f64,
    pub c1_pass: bool,
    /// `‖f_{n-1}*h - g_n‖^{1/2}`.
    pub triangle_lhs: f64,
    /// `2 ‖g_n - g_{n-1}‖^{1/2}`.
    pub triangle_rhs: f64,
    pub triangle_pass: bool,
    pub audits_pass: bool,
}

impl StageRow {
    pub const CSV_HEADER: &'static str = "stage,delta,n_list,alpha_max,eta_max,step_eps,retries,sup_default,\
next_gap,error_pass,long_next,sup_default_g,c0_increment,a_n,c0_pass,c1_increment,c1_increment_coord,\
c1_bound,c1_ratio,c1_ratio_coord,c1_pass,triangle_lhs,triangle_rhs,triangle_pass,audits_pass";

    /// Every check that must hold regardless of the schedule mode.
    pub fn passed(&self) -> bool {
        self.error_pass && self.long_next && self.c0_pass && self.triangle_pass && self.audits_pass
    }

    pub fn csv_line(&self) -> String {
        let ns: Vec<String> = self.n_list.iter().map(u64::to_string).collect();
        let f = fmt_f64;
        [
            self.stage.to_string(),
            f(self.delta),
            ns.join(";"),
            f(self.alpha_max),
            f(self.eta_max),
            f(self.step_eps),
            self.retries.to_string(),
            f(self.sup_default),
            f(self.next_gap),
            self.error_pass.to_string(),
            self.long_next.to_string(),
            f(self.sup_default_g),
            f(self.c0_increment),
            f(self.a_n),
            self.c0_pass.to_string(),
            f(self.c1_increment),
            f(self.c1_increment_coord),
            f(self.c1_bound),
            f(self.c1_ratio),
            f(self.c1_ratio_coord),
            self.c1_pass.to_string(),
            f(self.triangle_lhs),
            f(self.triangle_rhs),
            self.triangle_pass.to_string(),
            self.audits_pass.to_string(),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLedger {
    pub rows: Vec<StageRow>,
    /// `(stage, record)` for every corrugation step, in order.
    pub steps: Vec<(usize, CorrugationStepRecord)>,
}

impl RunLedger {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", StageRow::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(w, "{}", r.csv_line())?;
        }
        Ok(())
    }

    pub fn write_steps_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "stage,step,ell_angle,n,eta_max,alpha_max,measured_sup_default,c0_shift,c1_shift,identity_residual,\
average_residual,fd_constant,M,K,increment_ratio,increment_operator_ratio,growth_differential_ratio,\
growth_normal_ratio,normal_norm_residual,normal_orthogonality,target_normal_residual,\
target_normal_orthogonality,audit_pass"
        )?;
        let mut step = 0;
        let mut last_stage = 0;
        for (stage, r) in &self.steps {
            if *stage != last_stage {
                step = 0;
                last_stage = *stage;
            }
            step += 1;
            let a = &r.bound_audit;
            let vals = [
                r.ell_angle,
                r.eta_max,
                r.alpha_max,
                r.measured_sup_default,
                r.c0_shift,
                r.c1_shift,
                r.identity_residual,
                r.average_residual,
                r.fd_constant,
                a.m,
                a.k,
                a.increment_ratio,
                a.increment_operator_ratio,
                a.growth_differential_ratio,
                a.growth_normal_ratio,
                a.normal_norm_residual,
                a.normal_orthogonality,
                a.target_normal_residual,
                a.target_normal_orthogonality,
            ];
            let mut cols: Vec<String> = vals.iter().map(|&v| fmt_f64(v)).collect();
            cols.insert(1, r.n.to_string());
            writeln!(w, "{stage},{step},{},{}", cols.join(","), a.passed())?;
        }
        Ok(())
    }
}

/// Build `f_n` from `f_{n-1}` for the stage metric `g_n`.
pub fn run_stage(
    f_prev: &EmbeddingJet,
    g_n: &MetricField,
    g_next: &MetricField,
    a_n: f64,
    dict: &FormDictionary,
    constants: &BoundConstants,
    ctx: &StageContext,
) -> Result<(EmbeddingJet, StageRow, Vec<CorrugationStepRecord>)> {
    let g = ctx.g;
    let induced = pullback_metric(f_prev);
    let d_n = isometric_default(&induced, g_n)?;
    let decomp = decompose(&d_n, dict)?;
    let next_gap = sup_operator_norm_form(&g_next.sub(g_n)?, g)?;
    let k = decomp.len().max(1) as f64;
    let mut step_eps = (ctx.theta * next_gap / k).max(f64::MIN_POSITIVE);
    let mut retries = 0;
    let (jet, records, sup_default, long_next) = loop {
        let opts = SelectOptions {
            epsilon: step_eps,
            n0: ctx.n0,
            n_cap: ctx.n_cap,
            quadrature: ctx.quadrature,
            norm_metric: Some(g),
            next_metric: Some(g_next),
            c0_budget: Some(a_n / k),
        };
        let (jet, records) = successive_cp(f_prev, &decomp, step_eps, &opts)?;
        let out = pullback_metric(&jet);
        let sup_default = sup_operator_norm_form(&out.sub(g_n)?, g)?;
        let long_next = is_long_for(&out, g_next)?;
        if (sup_default <= next_gap && long_next) || retries == STAGE_RETRIES {
            break (jet, records, sup_default, long_next);
        }
        retries += 1;
        step_eps *= 0.5;
    };

    let out = pullback_metric(&jet);
    let gap_prev = sup_operator_norm_form(&g_n.sub(ctx.g_prev)?, g)?;
    let prev_default = sup_operator_norm_form(&induced.sub(g_n)?, g)?;
    let c0_increment = c0_distance(f_prev, &jet)?;
    let c1 = c1_increment(f_prev, &jet, g)?;
    let c1_coord = c1_increment_coordinate(f_prev, &jet)?;
    let c1_bound = a_n + constants.t * gap_prev.sqrt() * (2.0 * constants.k_tilde).powi(ctx.stage as i32);
    let ratio = |x: f64| if x == 0.0 { 0.0 } else { x / c1_bound };
    let triangle_lhs = prev_default.sqrt();
    let triangle_rhs = 2.0 * gap_prev.sqrt();
    let row = StageRow {
        stage: ctx.stage,
        delta: 0.0,
        n_list: records.iter().map(|r| r.n).collect(),
        alpha_max: records.iter().fold(0.0, |a, r| a.max(r.alpha_max)),
        eta_max: decomp.eta_max(),
        step_eps,
        retries,
        sup_default,
        next_gap,
        error_pass: sup_default <= next_gap,
        long_next,
        sup_default_g: sup_operator_norm_form(&out.sub(g)?, g)?,
        c0_increment,
        a_n,
        c0_pass: c0_increment <= a_n,
        c1_increment: c1,
        c1_increment_coord: c1_coord,
        c1_bound,
        c1_ratio: ratio(c1),
        c1_ratio_coord: ratio(c1_coord),
        c1_pass: ratio(c1) <= 1.0,
        triangle_lhs,
        triangle_rhs,
        triangle_pass: triangle_lhs <= triangle_rhs * (1.0 + 1e-12),
        audits_pass: records.iter().all(|r| r.bound_audit.passed()),
    };
    Ok((jet, row, records))
}

fn is_long_for(induced: &MetricField, target: &MetricField) -> Result<bool> {
    induced.grid().ensure_same(target.grid())?;
    Ok(induced.data.iter().zip(&target.data).all(|(a, b)| (*a - *b).eigenvalues().0 >= -PSD_TOL))
}

/// Largest amplitude over a decomposition taken at `f`.
pub fn decomposition_alpha_max(f: &EmbeddingJet, decomp: &PrimitiveDecomposition) -> Result<f64> {
    let mut amax = 0.0f64;
    for (ell, eta) in decomp.forms.iter().zip(&decomp.coefficients) {
        let frame = corrugation_frame(f, ell)?;
        for (idx, (fr, &e)) in frame.iter().zip(eta).enumerate() {
            let a = amplitude_from_default(e, fr.dlu).map_err(|err| match err {
                Error::NotRiemannian { value, .. } => Error::NotRiemannian { node: idx, value },
                other => other,
            })?;
            amax = amax.max(a);
        }
    }
    Ok(amax)
}

/// Run-level numbers reported next to the ledger.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// `‖Δ‖` relative to `g`.
    pub initial_default: f64,
    /// `‖f_T*h - g‖`.
    pub final_default: f64,
    /// `‖f_T - f_0‖_{C⁰}`.
    pub c0_drift: f64,
    /// `Σ a_n`.
    pub c0_budget: f64,
    pub epsilon: f64,
    /// Smallest over largest generalised eigenvalue of `Δ`.
    pub kappa: f64,
    pub theta: f64,
    /// `‖Δ‖^{1/2} Σ √(δ_{n-1} - δ_n)(2K̃)^n` for the run's schedule.
    pub partial_sum: f64,
    /// The same sum for the theoretical schedule with the same `K̃`.
    pub theoretical_partial_sum: f64,
    pub monotone: bool,
    pub stages_passed: bool,
}

impl RunSummary {
    /// Every run-level requirement of a practical run.
    pub fn converged(&self) -> bool {
        self.stages_passed
            && self.monotone
            && self.final_default <= 0.05 * self.initial_default
            && self.c0_drift <= self.epsilon
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub jet: EmbeddingJet,
    pub ledger: RunLedger,
    pub constants: BoundConstants,
    pub schedule: Schedule,
    pub summary: RunSummary,
}

struct Artifacts {
    dir: Option<PathBuf>,
}

impl Artifacts {
    fn file(&self, name: &str) -> Result<Option<BufWriter<fs::File>>> {
        match &self.dir {
            None => Ok(None),
            Some(d) => Ok(Some(BufWriter::new(fs::File::create(d.join(name))?))),
        }
    }

    fn write_with(&self, name: &str, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
        if let Some(mut w) = self.file(name)? {
            f(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }
}

fn write_constants<W: Write>(
    mut w: W,
    c: &BoundConstants,
    kappa: f64,
    theta: f64,
    schedule: &Schedule,
) -> Result<()> {
    writeln!(w, "name,value")?;
    for (name, v) in c.rows() {
        writeln!(w, "{name},{}", fmt_f64(v))?;
    }
    writeln!(w, "M_samples,{}", 2 * M_SAMPLES)?;
    writeln!(w, "M_inflation,{}", fmt_f64(M_INFLATION))?;
    writeln!(w, "kappa,{}", fmt_f64(kappa))?;
    writeln!(w, "theta,{}", fmt_f64(theta))?;
    writeln!(w, "rho,{}", fmt_f64(schedule.rho))?;
    writeln!(w, "sum_a,{}", fmt_f64(schedule.budget_total()))?;
    Ok(())
}

fn write_schedule<W: Write>(mut w: W, run: &Schedule, theory: &Schedule, norm_delta: f64) -> Result<()> {
    writeln!(w, "n,delta,a_n,term,partial_sum,theoretical_delta,theoretical_term,theoretical_partial_sum")?;
    let s = norm_delta.sqrt();
    let (rt, rp) = (run.terms(), run.partial_sums());
    let (tt, tp) = (theory.terms(), theory.partial_sums());
    for n in 1..=run.stages() {
        writeln!(
            w,
            "{n},{},{},{},{},{},{},{}",
            fmt_f64(run.deltas[n]),
            fmt_f64(run.a[n - 1]),
            fmt_f64(s * rt[n - 1]),
            fmt_f64(s * rp[n - 1]),
            fmt_f64(theory.deltas[n]),
            fmt_f64(s * tt[n - 1]),
            fmt_f64(s * tp[n - 1]),
        )?;
    }
    Ok(())
}

/// Execute every stage of `cfg`. When `cfg.outdir` is set, the resolved
/// config, constants, schedule, per-stage meshes and ledgers are written
/// there; ledgers are rewritten after each stage so a failed run leaves
/// everything up to the failure on disk.
pub fn run_nash_kuiper(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let art = Artifacts { dir: cfg.outdir.as_ref().map(PathBuf::from) };
    if let Some(d) = &art.dir {
        fs::create_dir_all(d)?;
    }
    art.write_with("config.resolved.json", |w| {
        writeln!(w, "{}", cfg.to_json())?;
        Ok(())
    })?;

    let grid = crate::fields::Grid::square(cfg.grid)?;
    let f0 = scenario.initial(grid);
    f0.validate_spacelike()?;
    let g = scenario.target(grid);
    let induced0 = pullback_metric(&f0);
    let delta = isometric_default(&induced0, &g)?;
    let dict = build_dictionary(cfg.k)?;

    let initial_default = sup_operator_norm_form(&delta, &g)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (d, gm) in delta.data.iter().zip(&g.data) {
        let (a, b) = d.eigenvalues_relative_to(gm)?;
        lo = lo.min(a.max(0.0));
        hi = hi.max(b);
    }
    let kappa = if hi > 0.0 { lo / hi } else { 1.0 };
    if hi > 0.0 && kappa == 0.0 {
        return Err(Error::Domain(format!(
            "scenario `{}` has a rank-deficient default; stage tolerances would vanish (use `corrugate` for single primitives)",
            scenario.id()
        )));
    }
    let theta = STAGE_THETA_MAX.min(0.5 * kappa);

    let decomp0 = decompose(&delta, &dict)?;
    let alpha_max = decomposition_alpha_max(&f0, &decomp0)?;
    let c = form_constant_c(&decomp0, &g)?;
    let t = t_constant(m_constant(alpha_max), c, &f0, &g)?;
    let constants = BoundConstants::new(alpha_max, dict.len(), c, t);
    let schedule = make_schedule(constants.k_tilde, cfg.stages, cfg.mode, cfg.epsilon)?;
    let theory = make_schedule(constants.k_tilde, cfg.stages, ScheduleMode::Theoretical, cfg.epsilon)?;
    art.write_with("constants.csv", |w| write_constants(w, &constants, kappa, theta, &schedule))?;
    art.write_with("schedule.csv", |w| write_schedule(w, &schedule, &theory, initial_default))?;

    let metrics = stage_metrics(&g, &delta, &schedule)?;
    let mut ledger = RunLedger::default();
    let mut cur = f0.clone();
    for n in 1..=schedule.stages() {
        let g_next = metrics.get(n + 1).unwrap_or(&g);
        let ctx = StageContext {
            stage: n,
            g: &g,
            g_prev: &metrics[n - 1],
            theta,
            quadrature: cfg.quadrature,
            n0: cfg.n0,
            n_cap: cfg.n_cap,
            mode: cfg.mode,
        };
        let res = run_stage(&cur, &metrics[n], g_next, schedule.a[n - 1], &dict, &constants, &ctx);
        let (jet, mut row, records) = match res {
            Ok(v) => v,
            Err(e) => {
                flush_ledger(&art, &ledger)?;
                return Err(e);
            }
        };
        row.delta = schedule.deltas[n];
        ledger.rows.push(row);
        ledger.steps.extend(records.into_iter().map(|r| (n, r)));
        art.write_with(&format!("stage_{n:03}.obj"), |w| write_obj(&jet, w))?;
        flush_ledger(&art, &ledger)?;
        cur = jet;
    }

    let final_default = sup_operator_norm_form(&pullback_metric(&cur).sub(&g)?, &g)?;
    let sqrt_delta = initial_default.sqrt();
    let mut prev = initial_default;
    let mut monotone = true;
    for r in &ledger.rows {
        monotone &= r.sup_default_g < prev || (prev == 0.0 && r.sup_default_g == 0.0);
        prev = r.sup_default_g;
    }
    let summary = RunSummary {
        initial_default,
        final_default,
        c0_drift: c0_distance(&f0, &cur)?,
        c0_budget: schedule.budget_total(),
        epsilon: cfg.epsilon,
        kappa,
        theta,
        partial_sum: sqrt_delta * schedule.partial_sums().last().copied().unwrap_or(0.0),
        theoretical_partial_sum: sqrt_delta * theory.partial_sums().last().copied().unwrap_or(0.0),
        monotone,
        stages_passed: ledger.rows.iter().all(StageRow::passed)
            && (cfg.mode == ScheduleMode::Practical || ledger.rows.iter().all(|r| r.c1_pass)),
    };
    art.write_with("summary.json", |w| {
        writeln!(w, "{}", serde_json::to_string_pretty(&summary).expect("summary serialises"))?;
        Ok(())
    })?;
    Ok(RunOutcome { jet: cur, ledger, constants, schedule, summary })
}

fn flush_ledger(art: &Artifacts, ledger: &RunLedger) -> Result<()> {
    art.write_with("ledger.csv", |w| ledger.write_csv(w))?;
    art.write_with("steps.csv", |w| ledger.write_steps_csv(w))
}

/// Write a single mesh, creating parent directories.
pub fn write_mesh(path: &Path, jet: &EmbeddingJet) -> Result<()> {
    if let Some(p) = path.parent() {
        fs::create_dir_all(p)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_obj(jet, &mut w)?;
    w.flush()?;
    Ok(())
}
