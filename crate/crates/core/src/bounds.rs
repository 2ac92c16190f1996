//! Constants of the quantitative estimates: `ψ`, `ψ₁`, `ψ₂`, `M(α_max)`,
//! `K(α_max)`, `K̃(α_max, k)`, the form constant `c` and `T`.

use serde::Serialize;

use crate::corrugation::{phi, phi_minus_one};
use crate::decomp::PrimitiveDecomposition;
use crate::error::Result;
use crate::fields::{covector_norm, operator_norm_form, sup_differential_norm, EmbeddingJet, MetricField, Sym2};
use crate::par;

/// Below this amplitude `psi` returns its limit at zero.
pub const PSI_SMALL: f64 = 1e-4;
/// Samples per family (log-spaced and uniform) used for `M`.
pub const M_SAMPLES: usize = 2048;
/// Safety inflation applied to the sampled supremum.
pub const M_INFLATION: f64 = 1.01;

pub const PSI1_LIMIT: f64 = 1.5;
pub const PSI2_LIMIT: f64 = 2.0;

/// `lim_{α→0} ψ(α) = √3 + √2`.
pub fn psi_limit() -> f64 {
    3f64.sqrt() + 2f64.sqrt()
}

// cosh² - φ = sinh² - (φ - 1) and φ² - 1 = (φ - 1)(φ + 1), which keep full
// relative accuracy for small α.
fn parts(alpha: f64) -> (f64, f64, f64) {
    let sh = alpha.sinh();
    let pm1 = phi_minus_one(alpha);
    (sh, sh * sh - pm1, pm1 * (pm1 + 2.0))
}

/// `ψ₁(α) = (cosh²α - φ(α)) / (φ(α)² - 1)`.
pub fn psi1(alpha: f64) -> f64 {
    let (_, num, den) = parts(alpha);
    num / den
}

/// `ψ₂(α) = sinh²α / (φ(α)² - 1)`.
pub fn psi2(alpha: f64) -> f64 {
    let (sh, _, den) = parts(alpha);
    sh * sh / den
}

/// `ψ(α) = (√(2cosh²α - 2φ(α)) + sinh α) / √(φ(α)² - 1)`.
pub fn psi(alpha: f64) -> f64 {
    if alpha < PSI_SMALL {
        return psi_limit();
    }
    let (sh, num, den) = parts(alpha);
    ((2.0 * num).max(0.0).sqrt() + sh) / den.sqrt()
}

/// Sampled `sup_{0<α≤α_max} ψ(α)`, inflated by one percent.
pub fn m_constant(alpha_max: f64) -> f64 {
    let mut sup = psi_limit();
    if alpha_max > PSI_SMALL {
        let lo = PSI_SMALL.ln();
        let hi = alpha_max.ln();
        let log_sup = par::max_indexed(M_SAMPLES, |i| {
            psi((lo + (hi - lo) * i as f64 / (M_SAMPLES - 1) as f64).exp())
        });
        let lin_sup = par::max_indexed(M_SAMPLES, |i| psi(alpha_max * (i + 1) as f64 / M_SAMPLES as f64));
        sup = sup.max(log_sup).max(lin_sup);
    }
    sup * M_INFLATION
}

/// `K(α) = 2 cosh α + 1`.
pub fn k_constant(alpha_max: f64) -> f64 {
    2.0 * alpha_max.cosh() + 1.0
}

/// `K̃(α, k) = 2^k K(α)^k`.
pub fn k_tilde(alpha_max: f64, k: usize) -> f64 {
    (2.0 * k_constant(alpha_max)).powi(k as i32)
}

/// Smallest `c` with `Σ_j √η_j ‖dℓ_j‖ ≤ c ‖Σ_j η_j dℓ_j²‖^{1/2}` at every
/// node, norms relative to `g`. Nodes with zero default are skipped.
pub fn form_constant_c(decomp: &PrimitiveDecomposition, g: &MetricField) -> Result<f64> {
    decomp.grid.ensure_same(g.grid())?;
    let vals = par::try_map_indexed(decomp.grid.len(), |idx| {
        let gm = g.at(idx);
        let mut total = Sym2::ZERO;
        let mut num = 0.0;
        for (l, eta) in decomp.forms.iter().zip(&decomp.coefficients) {
            let e = eta[idx];
            if e > 0.0 {
                num += e.sqrt() * covector_norm(l.a(), l.b(), &gm).map_err(|e| e.at_node(idx))?;
                total = total + l.square() * e;
            }
        }
        let den = operator_norm_form(&total, &gm).map_err(|e| e.at_node(idx))?.sqrt();
        Ok::<_, crate::Error>(if den > 0.0 { num / den } else { 0.0 })
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `T = 2 M c (‖df₀‖_g + ‖n₀‖)` with sup-node norms.
pub fn t_constant(m: f64, c: f64, f0: &EmbeddingJet, g: &MetricField) -> Result<f64> {
    if m == 0.0 || c == 0.0 {
        return Ok(0.0);
    }
    let df = sup_differential_norm(f0, g)?;
    let n = f0.normals()?.iter().fold(0.0, |a: f64, v| a.max(v.norm()));
    Ok(2.0 * m * c * (df + n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub alpha_max: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "K")]
    pub k_const: f64,
    pub k: usize,
    #[serde(rename = "K_tilde")]
    pub k_tilde: f64,
    pub c: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

impl BoundConstants {
    /// `M`, `K`, `K̃` from `α_max` and `k`; `c` and `T` supplied by the caller.
    pub fn new(alpha_max: f64, k: usize, c: f64, t: f64) -> Self {
        BoundConstants {
            alpha_max,
            m: m_constant(alpha_max),
            k_const: k_constant(alpha_max),
            k,
            k_tilde: k_tilde(alpha_max, k),
            c,
            t,
        }
    }

    /// Rows `(name, value)` in display order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("alpha_max", self.alpha_max),
            ("M", self.m),
            ("K", self.k_const),
            ("k", self.k as f64),
            ("K_tilde", self.k_tilde),
            ("c", self.c),
            ("T", self.t),
        ]
    }
}

/// `φ(α) ≤ cosh α`, used by the `M` estimate.
pub fn phi_below_cosh(alpha: f64) -> bool {
    phi(alpha) <= alpha.cosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{build_dictionary, decompose};
    use crate::fields::{Grid, LinearForm};

    #[test]
    fn psi_values() {
        // Oracle from the unsimplified expression.
        let a: f64 = 1.0;
        let p = phi(a);
        let raw = ((2.0 * a.cosh().powi(2) - 2.0 * p).sqrt() + a.sinh()) / p / (1.0 - 1.0 / (p * p)).sqrt();
        assert!((psi(1.0) - raw).abs() < 1e-12);
        assert!((psi(1.0) - 3.4368).abs() < 1e-3);
        assert!((psi(1e-3) - psi_limit()).abs() < 1e-2);
        for i in 1..=100 {
            let v = psi(i as f64 * 0.1);
            assert!(v.is_finite() && v > 0.0);
        }
    }

    #[test]
    fn limits_and_identity() {
        assert!((psi2(1e-3) - 2.0).abs() < 1e-3);
        assert!((psi1(1e-3) - 1.5).abs() < 5e-3);
        for a in [0.5, 1.0, 2.0] {
            assert!((psi(a) - ((2.0 * psi1(a)).sqrt() + psi2(a).sqrt())).abs() < 1e-10);
        }
    }

    #[test]
    fn m_values() {
        let m1 = m_constant(1.0);
        assert!((m1 - psi(1.0) * 1.01).abs() < 1e-9);
        assert!((m_constant(0.1) / psi_limit() - 1.0).abs() < 0.02);
        assert!(m_constant(2.0) >= m1);
        for i in 0..4096 {
            let a = 1e-4 + (1.0 - 1e-4) * i as f64 / 4095.0;
            let p = phi(a);
            let lhs = ((2.0 * a.cosh().powi(2) - 2.0 * p).max(0.0).sqrt() + a.sinh()) / p;
            assert!(lhs <= m1 * (1.0 - 1.0 / (p * p)).sqrt());
            assert!(phi_below_cosh(a));
        }
    }

    #[test]
    fn k_values() {
        assert_eq!(k_constant(0.0), 3.0);
        assert_eq!(k_tilde(0.0, 3), 216.0);
        assert!((k_constant(1.0) - 4.08616).abs() < 1e-5);
        assert_eq!(k_tilde(0.7, 4), (2.0 * k_constant(0.7)).powi(4));
    }

    #[test]
    fn form_constant_examples() {
        let grid = Grid::square(5).unwrap();
        let id = MetricField::constant(grid, Sym2::IDENTITY);
        let single = PrimitiveDecomposition {
            grid,
            forms: vec![LinearForm::new(1.0, 0.0).unwrap()],
            coefficients: vec![vec![0.3; grid.len()]],
            residual: 0.0,
        };
        assert!((form_constant_c(&single, &id).unwrap() - 1.0).abs() < 1e-15);
        let zero = decompose(&MetricField::zeros(grid), &build_dictionary(3).unwrap()).unwrap();
        assert_eq!(form_constant_c(&zero, &id).unwrap(), 0.0);
        // Three equal coefficients 2/3: Σ√η = 3√(2/3) = √6.
        let iso = decompose(&id, &build_dictionary(3).unwrap()).unwrap();
        let c = form_constant_c(&iso, &id).unwrap();
        assert!((c - 6f64.sqrt()).abs() < 1e-12);
        assert!(c <= (2.0 * 3.0f64).sqrt() + 1e-12);
    }

    #[test]
    fn t_examples() {
        let grid = Grid::square(5).unwrap();
        let f0 = EmbeddingJet::flat_inclusion(grid);
        let id = MetricField::constant(grid, Sym2::IDENTITY);
        assert!((t_constant(3.0, 2.0, &f0, &id).unwrap() - 24.0).abs() < 1e-14);
        assert_eq!(t_constant(0.0, 2.0, &f0, &id).unwrap(), 0.0);
        let quarter = MetricField::constant(grid, Sym2::diag(0.25, 0.25));
        // ‖df₀‖ doubles: 2Mc(2 + 1).
        assert!((t_constant(3.0, 2.0, &f0, &quarter).unwrap() - 36.0).abs() < 1e-13);
    }
}
