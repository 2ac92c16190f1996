//! Partial-period loop integrals
//! `C(σ) = ∫₀^σ (cosh θ(s) - φ(α)) ds` and `S(σ) = ∫₀^σ sinh θ(s) ds`
//! with `θ(s) = α cos 2πs`.
//!
//! The default evaluator uses the Fourier expansions
//! `cosh(α cos x) = I₀(α) + 2 Σ I₂ₖ(α) cos 2kx` and
//! `sinh(α cos x) = 2 Σ I₂ₖ₊₁(α) cos (2k+1)x`, which integrate to
//! `Σ_m I_m(α) sin(2πmσ) / (πm)` (even `m` for `C`, odd `m` for `S`).
//! Both integrals vanish identically when `α = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::corrugation::amplitude::phi_minus_one;
use crate::corrugation::quadrature::GaussLegendre;
use crate::error::{Error, Result};

pub const MAX_HARMONICS: usize = 128;
pub const MAX_POINTS: usize = 128;

/// How the partial-period integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// Truncated Bessel–Fourier series, accurate to round-off.
    #[default]
    Series,
    /// Gauss–Legendre on `[0, σ]`.
    GaussLegendre { points: usize },
}

impl Quadrature {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Quadrature::Series => Ok(()),
            Quadrature::GaussLegendre { points } if (1..=MAX_POINTS).contains(&points) => Ok(()),
            Quadrature::GaussLegendre { points } => Err(Error::Config(format!(
                "gauss-legendre needs 1..={MAX_POINTS} points, got {points}"
            ))),
        }
    }
}

/// `I_m(α)` for `m = 0..=m_max` by their power series.
pub fn bessel_i_all(alpha: f64, m_max: usize) -> Vec<f64> {
    let q = 0.25 * alpha * alpha;
    let mut lead = 1.0; // (α/2)^m / m!
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            lead *= 0.5 * alpha / m as f64;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..400 {
            let kf = k as f64;
            term *= q / (kf * (kf + m as f64));
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        out.push(lead * sum);
    }
    out
}

/// Number of harmonics after which `I_m(α)/(πm)` is below round-off for
/// every `α ≤ alpha_max`.
pub fn harmonics_for(alpha_max: f64) -> usize {
    if alpha_max == 0.0 {
        return 1;
    }
    let i = bessel_i_all(alpha_max, MAX_HARMONICS);
    let floor = 1e-18 * i[0];
    (1..=MAX_HARMONICS).find(|&m| i[m] / (PI * m as f64) < floor).unwrap_or(MAX_HARMONICS)
}

/// Per-node data the evaluator needs, independent of the phase.
#[derive(Debug, Clone)]
pub(crate) enum LoopTable {
    Series { harmonics: usize, coeffs: Vec<f64> },
    Gauss { rule: GaussLegendre, alpha: Vec<f64>, phi_m1: Vec<f64> },
}

/// Phase-dependent data shared by every node evaluated at the same `σ`.
pub(crate) struct PhaseBasis {
    sigma: f64,
    vals: [f64; MAX_HARMONICS],
}

impl LoopTable {
    pub(crate) fn new(alpha: &[f64], quad: Quadrature) -> Result<Self> {
        quad.validate()?;
        match quad {
            Quadrature::Series => {
                let amax = alpha.iter().fold(0.0, |a: f64, &b| a.max(b));
                let harmonics = harmonics_for(amax);
                let per_node = crate::par::map_indexed(alpha.len(), |idx| {
                    let a = alpha[idx];
                    let mut c = vec![0.0; harmonics];
                    if a > 0.0 {
                        let i = bessel_i_all(a, harmonics);
                        for m in 1..=harmonics {
                            c[m - 1] = i[m] / (PI * m as f64);
                        }
                    }
                    c
                });
                Ok(LoopTable::Series { harmonics, coeffs: per_node.concat() })
            }
            Quadrature::GaussLegendre { points } => Ok(LoopTable::Gauss {
                rule: GaussLegendre::new(points),
                alpha: alpha.to_vec(),
                phi_m1: alpha.iter().map(|&a| phi_minus_one(a)).collect(),
            }),
        }
    }

    pub(crate) fn basis(&self, sigma: f64) -> PhaseBasis {
        let mut vals = [0.0; MAX_HARMONICS];
        match self {
            LoopTable::Series { harmonics, .. } => {
                // sin(2πmσ) by repeated rotation.
                let (s1, c1) = (2.0 * PI * sigma).sin_cos();
                let (mut s, mut c) = (s1, c1);
                for v in vals.iter_mut().take(*harmonics) {
                    *v = s;
                    let next_s = s * c1 + c * s1;
                    c = c * c1 - s * s1;
                    s = next_s;
                }
            }
            LoopTable::Gauss { rule, .. } => {
                for (v, &x) in vals.iter_mut().zip(&rule.nodes) {
                    *v = (2.0 * PI * sigma * x).cos();
                }
            }
        }
        PhaseBasis { sigma, vals }
    }

    /// `(C(σ), S(σ))` at node `idx`.
    pub(crate) fn integrals(&self, idx: usize, b: &PhaseBasis) -> (f64, f64) {
        match self {
            LoopTable::Series { harmonics, coeffs } => {
                let c = &coeffs[idx * harmonics..(idx + 1) * harmonics];
                let mut even = 0.0;
                let mut odd = 0.0;
                for (m0, (&cm, &sm)) in c.iter().zip(&b.vals[..*harmonics]).enumerate() {
                    if m0 % 2 == 0 {
                        odd += cm * sm;
                    } else {
                        even += cm * sm;
                    }
                }
                (even, odd)
            }
            LoopTable::Gauss { rule, alpha, phi_m1 } => {
                let a = alpha[idx];
                if a == 0.0 {
                    return (0.0, 0.0);
                }
                let mut c = 0.0;
                let mut s = 0.0;
                for (&w, &cs) in rule.weights.iter().zip(&b.vals[..rule.len()]) {
                    let th = a * cs;
                    let sh = (0.5 * th).sinh();
                    c += w * (2.0 * sh * sh - phi_m1[idx]);
                    s += w * th.sinh();
                }
                (c * b.sigma, s * b.sigma)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrugation::amplitude::{phi, phi_prime};

    // Composite rule, eight panels of 32 points.
    fn direct(alpha: f64, sigma: f64) -> (f64, f64) {
        let q = GaussLegendre::new(32);
        let p = phi(alpha);
        let (mut c, mut s) = (0.0, 0.0);
        for k in 0..8 {
            let (a, b) = (sigma * k as f64 / 8.0, sigma * (k + 1) as f64 / 8.0);
            c += q.integrate(a, b, |s| (alpha * (2.0 * PI * s).cos()).cosh() - p);
            s += q.integrate(a, b, |s| (alpha * (2.0 * PI * s).cos()).sinh());
        }
        (c, s)
    }

    #[test]
    fn bessel_low_orders() {
        let i = bessel_i_all(1.3, 3);
        assert!((i[0] - phi(1.3)).abs() < 1e-15);
        assert!((i[1] - phi_prime(1.3)).abs() < 1e-15);
        // I₂ = I₀ - (2/α) I₁
        assert!((i[2] - (i[0] - 2.0 / 1.3 * i[1])).abs() < 1e-14);
    }

    #[test]
    fn series_matches_direct_quadrature() {
        let alphas = [0.0, 0.2, 1.2332, 2.5, 4.0];
        for quad in [Quadrature::Series, Quadrature::GaussLegendre { points: 48 }] {
            let table = LoopTable::new(&alphas, quad).unwrap();
            for &sigma in &[0.0, 0.1, 0.25, 0.5, 0.77, 0.999] {
                let b = table.basis(sigma);
                for (idx, &a) in alphas.iter().enumerate() {
                    let (c, s) = table.integrals(idx, &b);
                    let (c0, s0) = direct(a, sigma);
                    assert!((c - c0).abs() < 1e-12 && (s - s0).abs() < 1e-12, "{quad:?} a={a} s={sigma}");
                }
            }
        }
    }

    #[test]
    fn zero_amplitude_is_exactly_zero() {
        for quad in [Quadrature::Series, Quadrature::GaussLegendre { points: 8 }] {
            let table = LoopTable::new(&[0.0, 0.7], quad).unwrap();
            assert_eq!(table.integrals(0, &table.basis(0.37)), (0.0, 0.0));
        }
    }

    #[test]
    fn full_period_vanishes() {
        let table = LoopTable::new(&[1.7], Quadrature::Series).unwrap();
        let (c, s) = table.integrals(0, &table.basis(1.0));
        assert!(c.abs() < 1e-14 && s.abs() < 1e-14);
        let (c, s) = direct(1.7, 1.0);
        assert!(c.abs() < 1e-13 && s.abs() < 1e-13);
    }

    #[test]
    fn bad_point_count() {
        assert!(LoopTable::new(&[0.1], Quadrature::GaussLegendre { points: 0 }).is_err());
    }
}
