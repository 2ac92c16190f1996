//! Self-check suite behind the `verify` subcommand.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{k_tilde, psi, psi1, psi2};
use crate::config::RunConfig;
use crate::corrugation::quadrature::periodic_trapezoid;
use crate::corrugation::{cp_step, phi, phi_inverse, Quadrature};
use crate::decomp::{build_dictionary, closed_form_k3, decompose, reconstruct};
use crate::error::{Error, Result};
use crate::fields::{EmbeddingJet, Grid, LinearForm, MetricField, Sym2};
use crate::lorentz::Vec3M;
use crate::scenario::{collar_primitive, strip_primitive};
use crate::scheduler::{make_schedule, run_nash_kuiper, ScheduleMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// 65² grids, no decay sweep.
    Quick,
    /// 257² grids and the `O(1/N)` decay sweep.
    Full,
}

impl Level {
    pub fn grid(&self) -> usize {
        match self {
            Level::Quick => 65,
            Level::Full => 257,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::Config(format!("unknown verify level `{s}`"))),
        }
    }
}

/// One audited inequality: `measured ≤ limit` unless stated otherwise in
/// `detail`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn le(name: &'static str, measured: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check { name, passed: measured <= limit, measured, limit, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} measured {:<12.4e} limit {:<12.4e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.limit,
            self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed, {:.1} s", self.checks.len(), failed, self.seconds)
    }
}

/// Run every check of `level`. Failures are report content; an `Err` means a
/// check could not be evaluated at all.
pub fn verify(level: Level) -> Result<VerifyReport> {
    let start = Instant::now();
    let n = level.grid();
    let mut checks = Vec::new();
    checks.extend(phi_checks());
    checks.extend(psi_checks());
    checks.extend(step_checks(n)?);
    if level == Level::Full {
        checks.push(decay_check(n)?);
    }
    checks.push(gluing_check(n)?);
    checks.extend(decomposition_checks()?);
    checks.push(schedule_check()?);
    checks.extend(run_checks(n)?);
    Ok(VerifyReport { level, checks, seconds: start.elapsed().as_secs_f64() })
}

fn phi_checks() -> Vec<Check> {
    let mut dev = 0.0f64;
    for i in 0..100 {
        let a = 5.0 * i as f64 / 99.0;
        let oracle = periodic_trapezoid(128, |s| (a * (2.0 * std::f64::consts::PI * s).cos()).cosh());
        dev = dev.max((phi(a) - oracle).abs());
    }
    let mut trip = 0.0f64;
    for i in 0..100 {
        let a = 1e-3 + 5.0 * i as f64 / 99.0;
        let back = phi_inverse(phi(a)).map(|r| r.alpha).unwrap_or(f64::NAN);
        trip = trip.max((back - a).abs());
    }
    vec![
        Check::le("phi vs trapezoid oracle", dev, 1e-10, "100 values in [0, 5]"),
        Check {
            name: "phi(0) = 1",
            passed: phi(0.0) == 1.0,
            measured: phi(0.0),
            limit: 1.0,
            detail: "exact".into(),
        },
        Check::le("phi_inverse round trip", trip, 1e-9, "100 values in [1e-3, 5]"),
    ]
}

fn psi_checks() -> Vec<Check> {
    let ident = [0.5, 1.0, 2.0]
        .iter()
        .map(|&a| (psi(a) - ((2.0 * psi1(a)).sqrt() + psi2(a).sqrt())).abs())
        .fold(0.0, f64::max);
    vec![
        Check::le("psi2 limit", (psi2(1e-3) - 2.0).abs(), 1e-3, format!("psi2(1e-3) = {:.9}", psi2(1e-3))),
        Check::le("psi1 limit", (psi1(1e-3) - 1.5).abs(), 5e-3, format!("psi1(1e-3) = {:.9}", psi1(1e-3))),
        Check::le("psi = sqrt(2 psi1) + sqrt(psi2)", ident, 1e-10, "alpha in {0.5, 1, 2}"),
    ]
}

fn step_checks(n: usize) -> Result<Vec<Check>> {
    let grid = Grid::square(n)?;
    let f = EmbeddingJet::flat_inclusion(grid);
    let mu = strip_primitive(grid);
    let (_, rec) = cp_step(&f, &mu, 20, Quadrature::Series, None)?;
    Ok(vec![
        Check::le("pullback identity L*h = mu", rec.identity_residual, 1e-9, format!("strip-primitive {n}x{n}, N=20")),
        Check::le("average condition r phi = 1/dl(u)", rec.average_residual, 1e-10, "every node"),
    ])
}

/// Metric error at `N ∈ {20, 40, 80, 160}` on the strip primitive.
pub fn decay_errors(n: usize) -> Result<[f64; 4]> {
    let grid = Grid::square(n)?;
    let f = EmbeddingJet::flat_inclusion(grid);
    let mu = strip_primitive(grid);
    let mut out = [0.0; 4];
    for (o, nn) in out.iter_mut().zip([20, 40, 80, 160]) {
        *o = cp_step(&f, &mu, nn, Quadrature::Series, None)?.1.measured_sup_default;
    }
    Ok(out)
}

fn decay_check(n: usize) -> Result<Check> {
    let e = decay_errors(n)?;
    let ratios: Vec<f64> = e.windows(2).map(|w| w[0] / w[1]).collect();
    let worst = ratios.iter().map(|r| (r - 2.0).abs()).fold(0.0, f64::max);
    let passed = ratios.iter().all(|r| (1.5..=2.5).contains(r)) && e[3] <= e[0] / 4.0;
    Ok(Check {
        name: "O(1/N) decay",
        passed,
        measured: worst,
        limit: 0.5,
        detail: format!("|ratio - 2|; e = [{}], ratios = {ratios:.3?}", e.map(|v| format!("{v:.3e}")).join(", ")),
    })
}

/// A curved spacelike patch and a collar-supported primitive on it.
pub fn gluing_fixture(n: usize) -> Result<(EmbeddingJet, crate::corrugation::Primitive)> {
    let grid = Grid::square(n)?;
    let f = EmbeddingJet::from_fn(grid, |x, y| {
        (
            Vec3M::new(x, y, 0.2 * x * y),
            Vec3M::new(1.0, 0.0, 0.2 * y),
            Vec3M::new(0.0, 1.0, 0.2 * x),
        )
    });
    Ok((f, collar_primitive(grid, LinearForm::from_angle(0.3), 0.4, 0.1)))
}

fn gluing_check(n: usize) -> Result<Check> {
    let (f, mu) = gluing_fixture(n)?;
    let (out, _) = cp_step(&f, &mu, 37, Quadrature::Series, None)?;
    let mut moved = 0usize;
    let mut collar = 0usize;
    for idx in 0..f.grid().len() {
        if mu.eta[idx] == 0.0 {
            collar += 1;
            if out.pos[idx].to_array().map(f64::to_bits) != f.pos[idx].to_array().map(f64::to_bits) {
                moved += 1;
            }
        }
    }
    Ok(Check {
        name: "gluing on zero collar",
        passed: moved == 0 && collar > 0,
        measured: moved as f64,
        limit: 0.0,
        detail: format!("{collar} collar nodes compared bitwise"),
    })
}

fn decomposition_checks() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dict5 = build_dictionary(5)?;
    let grid = Grid::square(9)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let data = (0..grid.len())
            .map(|_| {
                dict5.forms.iter().fold(Sym2::ZERO, |acc, l| {
                    let w: f64 = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) };
                    acc + l.square() * w
                })
            })
            .collect();
        let field = MetricField::new(grid, data)?;
        let d = decompose(&field, &dict5)?;
        worst = worst.max(reconstruct(&d).sub(&field)?.sup_frobenius());
    }
    let dict3 = build_dictionary(3)?;
    let mut k3 = 0.0f64;
    for _ in 0..1000 {
        let (e, g): (f64, f64) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
        let f = rng.random_range(-0.5..0.5f64) * (e * g).sqrt();
        let m = Sym2::new(e, f, g);
        let Some(c) = closed_form_k3(&m) else { continue };
        let oracle = solve3(
            [0, 1, 2].map(|j| {
                let l = dict3.forms[j];
                [l.a() * l.a(), l.a() * l.b(), l.b() * l.b()]
            }),
            [e, f, g],
        );
        for (x, y) in c.iter().zip(oracle) {
            if y >= 0.0 {
                k3 = k3.max((x - y).abs());
            }
        }
    }
    Ok(vec![
        Check::le("decomposition round trip k=5", worst, 1e-9, "100 random fields in the cone, sup Frobenius"),
        Check::le("k=3 closed form vs linear solve", k3, 1e-12, "1000 random PSD nodes"),
    ])
}

// Solve Σ_j c_j col_j = rhs by Cramer's rule.
fn solve3(cols: [[f64; 3]; 3], rhs: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[2][1] * m[1][2]) - m[1][0] * (m[0][1] * m[2][2] - m[2][1] * m[0][2])
            + m[2][0] * (m[0][1] * m[1][2] - m[1][1] * m[0][2])
    };
    let d = det(cols);
    [0, 1, 2].map(|j| {
        let mut m = cols;
        m[j] = rhs;
        det(m) / d
    })
}

fn schedule_check() -> Result<Check> {
    let s = make_schedule(k_tilde(0.0, 3), 20, ScheduleMode::Theoretical, 0.05)?;
    let worst = s.term_ratios().into_iter().fold(0.0, f64::max);
    let sums = s.partial_sums();
    let increasing = sums.windows(2).all(|w| w[1] > w[0]);
    Ok(Check {
        name: "theoretical schedule summability",
        passed: worst <= 0.9 && increasing,
        measured: worst,
        limit: 0.9,
        detail: format!("20 stages, K_tilde = 216, partial sum {:.6e}", sums[sums.len() - 1]),
    })
}

fn run_checks(n: usize) -> Result<Vec<Check>> {
    let cfg = RunConfig { grid: n, ..RunConfig::default() };
    let out = run_nash_kuiper(&cfg)?;
    let steps = &out.ledger.steps;
    let inc = steps
        .iter()
        .map(|(_, r)| r.bound_audit.increment_ratio.max(r.bound_audit.increment_operator_ratio))
        .fold(0.0, f64::max);
    let grow = steps
        .iter()
        .map(|(_, r)| r.bound_audit.growth_differential_ratio.max(r.bound_audit.growth_normal_ratio))
        .fold(0.0, f64::max);
    let nn = steps.iter().map(|(_, r)| r.bound_audit.normal_norm_residual).fold(0.0, f64::max);
    let north = steps.iter().map(|(_, r)| r.bound_audit.normal_orthogonality).fold(0.0, f64::max);
    let s = &out.summary;
    let rows = &out.ledger.rows;
    let err_ratio = rows.iter().map(|r| r.sup_default / r.next_gap).fold(0.0, f64::max);
    Ok(vec![
        Check::le("increment bound (M)", inc, 1.0 + 1e-12, format!("{} steps, lhs/rhs", steps.len())),
        Check::le("growth bounds (K)", grow, 1.0 + 1e-12, "lhs/rhs"),
        Check::le("normal norm |h(nF,nF)+1|", nn, 1e-8, ""),
        Check::le("normal orthogonality N|h(nF,dF)|", north, 10.0, ""),
        Check {
            name: "stage error below next gap",
            passed: rows.iter().all(|r| r.error_pass && r.long_next),
            measured: err_ratio,
            limit: 1.0,
            detail: "max ||f_n*h - g_n|| / ||g_{n+1} - g_n||, with longness".into(),
        },
        Check::le(
            "final default",
            s.final_default,
            0.05 * s.initial_default,
            format!("flat-shrink {n}x{n}, {} stages", rows.len()),
        ),
        Check::le("cumulative C0 drift", s.c0_drift, s.epsilon, ""),
        Check {
            name: "monotone default",
            passed: s.monotone,
            measured: rows.last().map_or(f64::NAN, |r| r.sup_default_g),
            limit: s.initial_default,
            detail: "||f_n*h - g|| strictly decreasing".into(),
        },
    ])
}
