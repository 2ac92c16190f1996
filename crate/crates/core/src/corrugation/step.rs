use serde::Serialize;

use crate::bounds::{k_constant, m_constant};
use crate::corrugation::amplitude::{amplitude_from_default, phi, phi_minus_one, radial_factor};
use crate::corrugation::loops::{LoopTable, PhaseBasis, Quadrature};
use crate::error::{Error, Result};
use crate::fields::{
    c0_distance, c1_increment, corrugation_frame, covector_norm, operator_norm_form, operator_norm_map,
    pullback_metric, EmbeddingJet, FrameNode, LinearForm, MetricField, Sym2,
};
use crate::lorentz::{exp_point, minkowski_inner, spacelike_margin, timelike_unit_normal, Vec3M, SPACELIKE_EIG_MIN};
use crate::par;

/// Data of a primitive metric `μ = f*h - η dℓ⊗dℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub ell: LinearForm,
    pub eta: Vec<f64>,
}

impl Primitive {
    pub fn new(ell: LinearForm, eta: Vec<f64>) -> Self {
        Primitive { ell, eta }
    }

    pub fn is_zero(&self) -> bool {
        self.eta.iter().all(|&e| e == 0.0)
    }

    fn check(&self, f: &EmbeddingJet) -> Result<()> {
        if self.eta.len() != f.grid().len() {
            return Err(Error::Parse(format!(
                "coefficient field has {} nodes, grid has {}",
                self.eta.len(),
                f.grid().len()
            )));
        }
        if let Some(idx) = self.eta.iter().position(|&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::Domain(format!("coefficient {} at node {idx} is not a finite nonnegative number", self.eta[idx])));
        }
        Ok(())
    }

    /// `f*h - η dℓ⊗dℓ`.
    pub fn metric(&self, f: &EmbeddingJet) -> Result<MetricField> {
        self.check(f)?;
        let induced = pullback_metric(f);
        let sq = self.ell.square();
        Ok(MetricField::from_indexed(*f.grid(), |idx| induced.at(idx) - sq * self.eta[idx]))
    }
}

/// N-independent per-node data of a corrugation step.
#[derive(Debug, Clone)]
pub struct StepParams {
    pub ell: LinearForm,
    pub eta: Vec<f64>,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub phi: Vec<f64>,
    pub frame: Vec<FrameNode>,
    table: LoopTable,
}

impl StepParams {
    pub fn new(f: &EmbeddingJet, mu: &Primitive, quad: Quadrature) -> Result<Self> {
        mu.check(f)?;
        let frame = corrugation_frame(f, &mu.ell)?;
        let ra = par::try_map_indexed(frame.len(), |idx| {
            let (eta, dlu) = (mu.eta[idx], frame[idx].dlu);
            let with_node = |e: Error| match e {
                Error::NotRiemannian { value, .. } => Error::NotRiemannian { node: idx, value },
                other => other,
            };
            let r = radial_factor(eta, dlu).map_err(with_node)?;
            let a = amplitude_from_default(eta, dlu).map_err(with_node)?;
            Ok::<_, Error>((r, a))
        })?;
        let (r, alpha): (Vec<f64>, Vec<f64>) = ra.into_iter().unzip();
        let phi = alpha.iter().map(|&a| phi(a)).collect();
        let table = LoopTable::new(&alpha, quad)?;
        Ok(StepParams { ell: mu.ell, eta: mu.eta.clone(), r, alpha, phi, frame, table })
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn eta_max(&self) -> f64 {
        self.eta.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// `γ(p, s) = r (cosh θ t + sinh θ n)`, `θ = α cos 2πs`.
    pub fn loop_gamma(&self, idx: usize, s: f64) -> Vec3M {
        let th = self.alpha[idx] * (2.0 * std::f64::consts::PI * s).cos();
        let fr = &self.frame[idx];
        (fr.t * th.cosh() + fr.n * th.sinh()) * self.r[idx]
    }

    /// `γ̄(p) = r φ(α) t`.
    pub fn loop_average(&self, idx: usize) -> Vec3M {
        self.frame[idx].t * (self.r[idx] * self.phi[idx])
    }

    /// `|r φ(α) - 1/dℓ(u)|`.
    pub fn average_residual(&self, idx: usize) -> f64 {
        (self.r[idx] * self.phi[idx] - 1.0 / self.frame[idx].dlu).abs()
    }

    /// `Γ(p, σ) = ∫₀^σ (γ(p, s) - γ̄(p)) ds`.
    pub fn remainder(&self, idx: usize, sigma: f64) -> Vec3M {
        self.remainder_with(idx, &self.table.basis(sigma))
    }

    fn remainder_with(&self, idx: usize, b: &PhaseBasis) -> Vec3M {
        let (c, s) = self.table.integrals(idx, b);
        let fr = &self.frame[idx];
        (fr.t * c + fr.n * s) * self.r[idx]
    }

    /// `L = df + (γ - γ̄) ⊗ dℓ` at phase `sigma`, as columns `(L e_x, L e_y)`.
    pub fn target_differential(&self, f: &EmbeddingJet, idx: usize, sigma: f64) -> [Vec3M; 2] {
        let th = self.alpha[idx] * (2.0 * std::f64::consts::PI * sigma).cos();
        let sh = (0.5 * th).sinh();
        // cosh θ - φ without cancellation; exactly zero when α = 0.
        let c = 2.0 * sh * sh - phi_minus_one(self.alpha[idx]);
        let fr = &self.frame[idx];
        let w = (fr.t * c + fr.n * th.sinh()) * self.r[idx];
        [f.dx[idx] + w * self.ell.a(), f.dy[idx] + w * self.ell.b()]
    }

    /// `n_L = sinh θ t + cosh θ n`, the future unit normal to the image of `L`.
    pub fn target_normal(&self, idx: usize, sigma: f64) -> Vec3M {
        let th = self.alpha[idx] * (2.0 * std::f64::consts::PI * sigma).cos();
        let fr = &self.frame[idx];
        fr.n * th.cosh() + fr.t * th.sinh()
    }
}

/// `frac(N ℓ(p))`, the reduced corrugation phase.
pub fn phase(ell: &LinearForm, x: f64, y: f64, n: u64) -> f64 {
    let s = n as f64 * ell.eval(x, y);
    s - s.floor()
}

/// The corrugated jet together with the pieces of its differential.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub jet: EmbeddingJet,
    pub n: u64,
    pub sigma: Vec<f64>,
    /// Target differential columns.
    pub l: Vec<[Vec3M; 2]>,
    /// Parameter derivative of the remainder at frozen phase; `dF = L + D/N`.
    pub d: Vec<[Vec3M; 2]>,
}

/// `F(p) = f(p) + Γ(p, frac(N ℓ(p))) / N` with `dF = L + D/N`.
pub fn apply_step(f: &EmbeddingJet, params: &StepParams, n: u64) -> Result<StepOutput> {
    if n == 0 {
        return Err(Error::Domain("corrugation number must be at least 1".into()));
    }
    let grid = *f.grid();
    let nf = n as f64;
    let nodes = par::map_indexed(grid.len(), |idx| {
        let (x, y) = grid.coords(idx);
        let sigma = phase(&params.ell, x, y, n);
        let basis = params.table.basis(sigma);
        let rem = params.remainder_with(idx, &basis);
        let l = params.target_differential(f, idx, sigma);
        let dx = grid.diff_x(idx, |q| params.remainder_with(q, &basis));
        let dy = grid.diff_y(idx, |q| params.remainder_with(q, &basis));
        let pos = exp_point(f.pos[idx], rem / nf);
        (sigma, pos, l, [dx, dy])
    });
    let mut sigma = Vec::with_capacity(nodes.len());
    let mut pos = Vec::with_capacity(nodes.len());
    let mut fx = Vec::with_capacity(nodes.len());
    let mut fy = Vec::with_capacity(nodes.len());
    let mut l = Vec::with_capacity(nodes.len());
    let mut d = Vec::with_capacity(nodes.len());
    for (idx, (s, p, li, di)) in nodes.into_iter().enumerate() {
        let cx = li[0] + di[0] / nf;
        let cy = li[1] + di[1] / nf;
        if !(p.is_finite() && spacelike_margin(cx, cy) >= SPACELIKE_EIG_MIN) {
            return Err(Error::LostSpacelike { node: idx, n });
        }
        sigma.push(s);
        pos.push(p);
        fx.push(cx);
        fy.push(cy);
        l.push(li);
        d.push(di);
    }
    Ok(StepOutput { jet: EmbeddingJet::new(grid, pos, fx, fy)?, n, sigma, l, d })
}

/// `sup_p ‖F*h - μ‖` relative to `norm`.
pub fn metric_error(out: &StepOutput, mu: &MetricField, norm: &MetricField) -> Result<f64> {
    let induced = pullback_metric(&out.jet);
    let vals = par::try_map_indexed(induced.grid().len(), |idx| {
        operator_norm_form(&(induced.at(idx) - mu.at(idx)), &norm.at(idx)).map_err(|e| e.at_node(idx))
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Inequality audits of one step. Ratios are `lhs / rhs`; a bound holds when
/// its ratio is at most one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundAudit {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// `‖(dF - df)u‖ ≤ ‖Du‖/N + M √η dℓ(u) (‖t‖ + ‖n‖)` per node.
    pub increment_ratio: f64,
    /// Operator form: `‖dF - df‖_g ≤ ‖D‖_g/N + M √η ‖dℓ‖_g (‖t‖ + ‖n‖)`.
    pub increment_operator_ratio: f64,
    /// `‖dF‖_g ≤ K (‖df‖_g + ‖n‖) + ‖D‖_g/N`.
    pub growth_differential_ratio: f64,
    /// `‖n_F‖ ≤ K (‖df‖_g + ‖n‖)`.
    pub growth_normal_ratio: f64,
    /// `max |h(n_F, n_F) + 1|`.
    pub normal_norm_residual: f64,
    /// `max N |h(n_F, dF(w))|` over `w ∈ {u, v}`.
    pub normal_orthogonality: f64,
    /// `max |h(n_L, n_L) + 1|`, `|h(n_L, L(u))|`, `|h(n_L, L(v))|`.
    pub target_normal_residual: f64,
    /// `max N |h(n_L, dF(w))|` over `w ∈ {u, v}`.
    pub target_normal_orthogonality: f64,
}

impl BoundAudit {
    pub const NORMAL_NORM_TOL: f64 = 1e-8;
    pub const NORMAL_ORTHO_TOL: f64 = 10.0;
    const SLACK: f64 = 1.0 + 1e-12;

    pub fn increment_bound_holds(&self) -> bool {
        self.increment_ratio <= Self::SLACK && self.increment_operator_ratio <= Self::SLACK
    }

    pub fn growth_bound_holds(&self) -> bool {
        self.growth_differential_ratio <= Self::SLACK && self.growth_normal_ratio <= Self::SLACK
    }

    pub fn normal_holds(&self) -> bool {
        self.normal_norm_residual <= Self::NORMAL_NORM_TOL && self.normal_orthogonality <= Self::NORMAL_ORTHO_TOL
    }

    pub fn passed(&self) -> bool {
        self.increment_bound_holds() && self.growth_bound_holds() && self.normal_holds()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrugationStepRecord {
    pub ell_angle: f64,
    pub n: u64,
    pub eta_max: f64,
    pub alpha_max: f64,
    /// `sup ‖F*h - μ‖`.
    pub measured_sup_default: f64,
    pub c0_shift: f64,
    pub c1_shift: f64,
    /// `sup |L*h - μ|` over entries.
    pub identity_residual: f64,
    /// `sup |r φ(α) - 1/dℓ(u)|`.
    pub average_residual: f64,
    /// Finite-difference consistency constant of the output jet.
    pub fd_constant: f64,
    pub bound_audit: BoundAudit,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs / rhs
    } else {
        f64::INFINITY
    }
}

#[derive(Default, Clone, Copy)]
struct NodeAudit {
    err: f64,
    ident: f64,
    avg: f64,
    inc: f64,
    inc_op: f64,
    grow_d: f64,
    grow_n: f64,
    nn: f64,
    north: f64,
    nl: f64,
    nlorth: f64,
}

// The increment `dF - df` is formed by subtraction; its rounding error is
// credited to the right-hand side of the increment bounds.
const ROUNDING: f64 = 8.0 * f64::EPSILON;

/// Measure and audit a computed step.
pub fn audit_step(
    f: &EmbeddingJet,
    params: &StepParams,
    out: &StepOutput,
    mu: &MetricField,
    norm: &MetricField,
) -> Result<CorrugationStepRecord> {
    let alpha_max = params.alpha_max();
    let m = m_constant(alpha_max);
    let k = k_constant(alpha_max);
    let nf = out.n as f64;
    let f_normals = f.normals()?;
    let g_ = &out.jet;
    let per_node = par::try_map_indexed(f.grid().len(), |idx| -> Result<NodeAudit> {
        let g = norm.at(idx);
        let fr = &params.frame[idx];
        let (fx, fy) = (g_.dx[idx], g_.dy[idx]);
        let induced = Sym2::new(minkowski_inner(fx, fx), minkowski_inner(fx, fy), minkowski_inner(fy, fy));
        let err = operator_norm_form(&(induced - mu.at(idx)), &g)?;
        let [lx, ly] = out.l[idx];
        let lh = Sym2::new(minkowski_inner(lx, lx), minkowski_inner(lx, ly), minkowski_inner(ly, ly));
        let ident = (lh - mu.at(idx)).max_abs_entry();
        let [dx, dy] = out.d[idx];
        let apply = |a: Vec3M, b: Vec3M, w: [f64; 2]| a * w[0] + b * w[1];

        let sqrt_eta = params.eta[idx].sqrt();
        let tn = fr.t.norm() + fr.n.norm();
        let du = apply(dx, dy, fr.u);
        let (new_u, old_u) = (apply(fx, fy, fr.u), f.push_forward(idx, fr.u));
        let lhs_inc = (new_u - old_u).norm();
        let rhs_inc = du.norm() / nf + m * sqrt_eta * fr.dlu * tn + ROUNDING * (new_u.norm() + old_u.norm());
        let d_op = operator_norm_map(dx, dy, &g)?;
        let df_old = operator_norm_map(f.dx[idx], f.dy[idx], &g)?;
        let df_new = operator_norm_map(fx, fy, &g)?;
        let lhs_inc_op = operator_norm_map(fx - f.dx[idx], fy - f.dy[idx], &g)?;
        let rhs_inc_op = d_op / nf
            + m * sqrt_eta * covector_norm(params.ell.a(), params.ell.b(), &g)? * tn
            + ROUNDING * (df_new + df_old);

        let base = df_old + f_normals[idx].norm();
        let n_new = timelike_unit_normal(fx, fy).map_err(|_| Error::LostSpacelike { node: idx, n: out.n })?;

        let dfu = apply(fx, fy, fr.u);
        let dfv = apply(fx, fy, fr.v);
        let nn = (minkowski_inner(n_new, n_new) + 1.0).abs();
        let north = nf * minkowski_inner(n_new, dfu).abs().max(minkowski_inner(n_new, dfv).abs());

        let n_l = params.target_normal(idx, out.sigma[idx]);
        let lu = apply(lx, ly, fr.u);
        let lv = apply(lx, ly, fr.v);
        let nl = (minkowski_inner(n_l, n_l) + 1.0)
            .abs()
            .max(minkowski_inner(n_l, lu).abs())
            .max(minkowski_inner(n_l, lv).abs());
        let nlorth = nf * minkowski_inner(n_l, dfu).abs().max(minkowski_inner(n_l, dfv).abs());

        Ok(NodeAudit {
            err,
            ident,
            avg: params.average_residual(idx),
            inc: ratio(lhs_inc, rhs_inc),
            inc_op: ratio(lhs_inc_op, rhs_inc_op),
            grow_d: ratio(df_new, k * base + d_op / nf),
            grow_n: ratio(n_new.norm(), k * base),
            nn,
            north,
            nl,
            nlorth,
        })
    })?;
    let mut a = NodeAudit::default();
    for v in per_node {
        a.err = a.err.max(v.err);
        a.ident = a.ident.max(v.ident);
        a.avg = a.avg.max(v.avg);
        a.inc = a.inc.max(v.inc);
        a.inc_op = a.inc_op.max(v.inc_op);
        a.grow_d = a.grow_d.max(v.grow_d);
        a.grow_n = a.grow_n.max(v.grow_n);
        a.nn = a.nn.max(v.nn);
        a.north = a.north.max(v.north);
        a.nl = a.nl.max(v.nl);
        a.nlorth = a.nlorth.max(v.nlorth);
    }
    Ok(CorrugationStepRecord {
        ell_angle: params.ell.angle(),
        n: out.n,
        eta_max: params.eta_max(),
        alpha_max,
        measured_sup_default: a.err,
        c0_shift: c0_distance(f, &out.jet)?,
        c1_shift: c1_increment(f, &out.jet, norm)?,
        identity_residual: a.ident,
        average_residual: a.avg,
        fd_constant: out.jet.fd_consistency().constant,
        bound_audit: BoundAudit {
            m,
            k,
            increment_ratio: a.inc,
            increment_operator_ratio: a.inc_op,
            growth_differential_ratio: a.grow_d,
            growth_normal_ratio: a.grow_n,
            normal_norm_residual: a.nn,
            normal_orthogonality: a.north,
            target_normal_residual: a.nl,
            target_normal_orthogonality: a.nlorth,
        },
    })
}

/// One corrugation step with a fixed corrugation number. Norms are taken
/// relative to `norm`, or to `μ` itself when `None`.
pub fn cp_step(
    f: &EmbeddingJet,
    mu: &Primitive,
    n: u64,
    quad: Quadrature,
    norm: Option<&MetricField>,
) -> Result<(EmbeddingJet, CorrugationStepRecord)> {
    let params = StepParams::new(f, mu, quad)?;
    let out = apply_step(f, &params, n)?;
    let mu_metric = mu.metric(f)?;
    let record = audit_step(f, &params, &out, &mu_metric, norm.unwrap_or(&mu_metric))?;
    Ok((out.jet, record))
}
