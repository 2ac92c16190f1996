use crate::corrugation::loops::Quadrature;
use crate::corrugation::step::{apply_step, audit_step, metric_error, CorrugationStepRecord, Primitive, StepParams};
use crate::decomp::PrimitiveDecomposition;
use crate::error::{Error, Result};
use crate::fields::{pullback_metric, EmbeddingJet, MetricField, PSD_TOL};

pub const DEFAULT_N0: u64 = 16;
pub const DEFAULT_N_CAP: u64 = 1 << 20;

/// Acceptance rule for corrugation numbers.
#[derive(Debug, Clone, Copy)]
pub struct SelectOptions<'a> {
    pub epsilon: f64,
    pub n0: u64,
    pub n_cap: u64,
    pub quadrature: Quadrature,
    /// Metric the error is measured against; `μ` itself when `None`.
    pub norm_metric: Option<&'a MetricField>,
    /// When given, the output must be long for this metric.
    pub next_metric: Option<&'a MetricField>,
    /// When given, the largest allowed C⁰ displacement.
    pub c0_budget: Option<f64>,
}

impl<'a> SelectOptions<'a> {
    pub fn new(epsilon: f64) -> Self {
        SelectOptions {
            epsilon,
            n0: DEFAULT_N0,
            n_cap: DEFAULT_N_CAP,
            quadrature: Quadrature::Series,
            norm_metric: None,
            next_metric: None,
            c0_budget: None,
        }
    }
}

/// A step accepted by [`select_step`].
#[derive(Debug, Clone)]
pub struct Selected {
    pub jet: EmbeddingJet,
    pub record: CorrugationStepRecord,
    /// `(N, error)` for every candidate tried; the error is infinite when the
    /// candidate lost spacelikeness.
    pub attempts: Vec<(u64, f64)>,
}

fn is_long(jet: &EmbeddingJet, metric: &MetricField) -> bool {
    let induced = pullback_metric(jet);
    induced.data.iter().zip(&metric.data).all(|(a, b)| (*a - *b).eigenvalues().0 >= -PSD_TOL)
}

/// Smallest `N = n0·2^i ≤ n_cap` whose step meets every requirement of
/// `opts`, together with the step it produced.
pub fn select_step(f: &EmbeddingJet, mu: &Primitive, opts: &SelectOptions) -> Result<Selected> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.epsilon)));
    }
    if opts.n0 == 0 || opts.n0 > opts.n_cap {
        return Err(Error::Config(format!("need 1 <= n0 <= n_cap, got n0={} n_cap={}", opts.n0, opts.n_cap)));
    }
    let params = StepParams::new(f, mu, opts.quadrature)?;
    let mu_metric = mu.metric(f)?;
    let norm = opts.norm_metric.unwrap_or(&mu_metric);
    let mut attempts = Vec::new();
    let mut best = f64::INFINITY;
    let mut n = opts.n0;
    while n <= opts.n_cap {
        match apply_step(f, &params, n) {
            Ok(out) => {
                let err = metric_error(&out, &mu_metric, norm)?;
                attempts.push((n, err));
                best = best.min(err);
                let ok = err <= opts.epsilon
                    && opts.c0_budget.is_none_or(|b| crate::fields::c0_distance(f, &out.jet).is_ok_and(|d| d <= b))
                    && opts.next_metric.is_none_or(|m| is_long(&out.jet, m));
                if ok {
                    let record = audit_step(f, &params, &out, &mu_metric, norm)?;
                    return Ok(Selected { jet: out.jet, record, attempts });
                }
            }
            Err(Error::LostSpacelike { .. }) => attempts.push((n, f64::INFINITY)),
            Err(e) => return Err(e),
        }
        n = match n.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    Err(Error::BudgetExceeded { cap: opts.n_cap, best })
}

pub fn select_corrugation_number(f: &EmbeddingJet, mu: &Primitive, opts: &SelectOptions) -> Result<u64> {
    Ok(select_step(f, mu, opts)?.record.n)
}

/// Corrugate once per primitive, in order: `F_j = CP(F_{j-1}, μ_j, N_j)` with
/// `μ_j = F_{j-1}*h - η_j dℓ_j²`. `opts.next_metric` and `opts.c0_budget`
/// apply to the last step and to every step respectively.
pub fn successive_cp(
    f: &EmbeddingJet,
    decomp: &PrimitiveDecomposition,
    per_step_eps: f64,
    opts: &SelectOptions,
) -> Result<(EmbeddingJet, Vec<CorrugationStepRecord>)> {
    f.grid().ensure_same(&decomp.grid)?;
    let mut cur = f.clone();
    let mut records = Vec::with_capacity(decomp.len());
    let last = decomp.len().saturating_sub(1);
    for (j, (ell, eta)) in decomp.forms.iter().zip(&decomp.coefficients).enumerate() {
        let mu = Primitive::new(*ell, eta.clone());
        let step_opts = SelectOptions {
            epsilon: per_step_eps,
            next_metric: if j == last { opts.next_metric } else { None },
            ..*opts
        };
        let sel = select_step(&cur, &mu, &step_opts)?;
        records.push(sel.record);
        cur = sel.jet;
    }
    Ok((cur, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{build_dictionary, decompose, reconstruct};
    use crate::fields::{Grid, LinearForm, Sym2};

    fn wavy_strip(n: usize) -> (EmbeddingJet, Primitive) {
        let grid = Grid::square(n).unwrap();
        let f = EmbeddingJet::flat_inclusion(grid);
        let eta = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.coords(idx);
                0.35 + 0.15 * (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).cos()
            })
            .collect();
        (f, Primitive::new(LinearForm::new(1.0, 0.0).unwrap(), eta))
    }

    #[test]
    fn zero_default_accepts_n0() {
        let grid = Grid::square(9).unwrap();
        let f = EmbeddingJet::flat_inclusion(grid);
        let mu = Primitive::new(LinearForm::from_angle(0.3), vec![0.0; grid.len()]);
        assert_eq!(select_corrugation_number(&f, &mu, &SelectOptions::new(1e-12)).unwrap(), 16);
    }

    #[test]
    fn tighter_tolerance_needs_larger_n() {
        let (f, mu) = wavy_strip(65);
        let n1 = select_corrugation_number(&f, &mu, &SelectOptions::new(0.01)).unwrap();
        let n2 = select_corrugation_number(&f, &mu, &SelectOptions::new(0.005)).unwrap();
        assert!(n2 >= n1, "{n1} {n2}");
    }

    #[test]
    fn impossible_tolerance() {
        let (f, mu) = wavy_strip(17);
        let opts = SelectOptions { n_cap: 1 << 12, ..SelectOptions::new(1e-15) };
        assert!(matches!(select_step(&f, &mu, &opts), Err(Error::BudgetExceeded { cap: 4096, .. })));
    }

    #[test]
    fn successive_zero_is_identity() {
        let grid = Grid::square(9).unwrap();
        let f = EmbeddingJet::flat_inclusion(grid);
        let d = decompose(&MetricField::zeros(grid), &build_dictionary(3).unwrap()).unwrap();
        let (out, recs) = successive_cp(&f, &d, 1e-9, &SelectOptions::new(1e-9)).unwrap();
        assert_eq!(out, f);
        assert_eq!(recs.len(), 3);
    }

    #[test]
    fn successive_flat_square() {
        let grid = Grid::square(33).unwrap();
        let f = EmbeddingJet::flat_inclusion(grid);
        let delta = MetricField::constant(grid, Sym2::diag(0.5, 0.5));
        let d = decompose(&delta, &build_dictionary(3).unwrap()).unwrap();
        let eps = 0.02;
        let (out, recs) = successive_cp(&f, &d, eps, &SelectOptions::new(eps)).unwrap();
        let target = pullback_metric(&f).sub(&reconstruct(&d)).unwrap();
        let err = pullback_metric(&out).sub(&target).unwrap();
        let sup = err
            .data
            .iter()
            .zip(&target.data)
            .map(|(e, g)| crate::fields::operator_norm_form(e, g).unwrap())
            .fold(0.0, f64::max);
        assert!(sup <= 3.0 * eps * 1.5, "sup={sup}");
        let amax = recs.iter().fold(0.0, |a: f64, r| a.max(r.alpha_max));
        assert!(amax > 0.0 && amax < 2.0);
    }
}
