//! The amplitude transcendental `φ(α) = ∫₀¹ cosh(α cos 2πs) ds` and the
//! per-node amplitude equation.
//!
//! `φ` is the modified Bessel function `I₀`, evaluated here by its power
//! series, which has only positive terms and so no cancellation.

use crate::error::{Error, Result};

const SERIES_MAX_TERMS: usize = 500;
const PHI_INVERSE_MAX_ITER: usize = 200;

/// Result of solving `φ(α) = y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSolveResult {
    pub alpha: f64,
    pub phi_value: f64,
    pub iterations: usize,
}

/// `φ(α) - 1 = Σ_{m≥1} (α/2)^{2m} / (m!)²`, accurate for small `α`.
pub fn phi_minus_one(alpha: f64) -> f64 {
    let q = 0.25 * alpha * alpha;
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 1..SERIES_MAX_TERMS {
        let mf = m as f64;
        term *= q / (mf * mf);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// `φ(α) = I₀(α)`.
pub fn phi(alpha: f64) -> f64 {
    1.0 + phi_minus_one(alpha)
}

/// `φ'(α) = I₁(α) = Σ (α/2)^{2m+1} / (m! (m+1)!)`.
pub fn phi_prime(alpha: f64) -> f64 {
    let half = 0.5 * alpha;
    let q = half * half;
    let mut term = half;
    let mut sum = half;
    for m in 1..SERIES_MAX_TERMS {
        let mf = m as f64;
        term *= q / (mf * (mf + 1.0));
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// Unique `α ≥ 0` with `φ(α) = y` for `y ≥ 1`.
///
/// Bisection on a doubling bracket, then Newton polish with `φ' = I₁`.
pub fn phi_inverse(y: f64) -> Result<AmplitudeSolveResult> {
    if !(y >= 1.0) || !y.is_finite() {
        return Err(Error::Domain(format!("phi_inverse needs y >= 1, got {y}")));
    }
    if y == 1.0 {
        return Ok(AmplitudeSolveResult { alpha: 0.0, phi_value: 1.0, iterations: 0 });
    }
    let target = y - 1.0;
    let tol = 1e-12 * y.max(1.0);
    let mut iterations = 0;

    // Near 0, φ - 1 ≈ α²/4; start the bracket just above that guess.
    let mut hi = (2.0 * target.sqrt()).max(1e-300) * 2.0;
    while phi_minus_one(hi) < target {
        hi *= 2.0;
        iterations += 1;
    }
    let mut lo = 0.0;
    let mut alpha = 0.5 * (lo + hi);
    // Bisect until Newton is safely inside its basin.
    while iterations < PHI_INVERSE_MAX_ITER && (hi - lo) > 1e-3 * hi {
        alpha = 0.5 * (lo + hi);
        if phi_minus_one(alpha) < target {
            lo = alpha;
        } else {
            hi = alpha;
        }
        iterations += 1;
    }
    while iterations < PHI_INVERSE_MAX_ITER {
        iterations += 1;
        let r = phi_minus_one(alpha) - target;
        if r.abs() <= 0.25 * tol {
            break;
        }
        if r < 0.0 {
            lo = alpha;
        } else {
            hi = alpha;
        }
        let mut next = alpha - r / phi_prime(alpha);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == alpha {
            break;
        }
        alpha = next;
    }
    Ok(AmplitudeSolveResult { alpha, phi_value: phi(alpha), iterations })
}

/// `r = sqrt(1/dℓ(u)² - η)`, the radius making the target differential
/// isometric for the primitive metric.
pub fn radial_factor(eta: f64, dlu: f64) -> Result<f64> {
    if !(eta >= 0.0) || !(dlu > 0.0) {
        return Err(Error::Domain(format!("radial_factor needs eta >= 0, dl(u) > 0 (got {eta}, {dlu})")));
    }
    let s = eta * dlu * dlu;
    if s >= 1.0 {
        return Err(Error::NotRiemannian { node: 0, value: s });
    }
    Ok((1.0 / (dlu * dlu) - eta).sqrt())
}

/// `α = φ⁻¹(1 / (r dℓ(u)))`.
///
/// Products exceeding one by no more than round-off are treated as one.
pub fn amplitude(r: f64, dlu: f64) -> Result<f64> {
    let p = r * dlu;
    if !(p > 0.0) || p > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("amplitude needs 0 < r*dl(u) <= 1, got {p}")));
    }
    if p >= 1.0 {
        return Ok(0.0);
    }
    Ok(phi_inverse(1.0 / p)?.alpha)
}

/// `α` straight from the default: `φ(α) = 1/sqrt(1 - η dℓ(u)²)`.
///
/// Same value as [`amplitude`] but exactly zero when `η = 0`.
pub fn amplitude_from_default(eta: f64, dlu: f64) -> Result<f64> {
    let s = eta * dlu * dlu;
    if !(s < 1.0) || !(eta >= 0.0) {
        return Err(Error::NotRiemannian { node: 0, value: s });
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(phi_inverse(1.0 / (1.0 - s).sqrt())?.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: periodic trapezoid on the defining integral.
    fn phi_quadrature(alpha: f64, n: usize) -> f64 {
        (0..n)
            .map(|i| (alpha * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).cosh())
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0), 1.0);
        assert!((phi(1.0) - 1.2660658777520082).abs() < 1e-15);
        assert!((phi(2.0) - 2.2795853023360673).abs() < 1e-14);
        for &a in &[0.1, 0.5, 1.0, 2.5, 5.0, 9.0] {
            assert!((phi(a) - phi_quadrature(a, 128)).abs() < 1e-12 * phi(a), "alpha={a}");
        }
    }

    #[test]
    fn phi_prime_by_differences() {
        for &a in &[0.01, 0.3, 1.0, 3.0] {
            let h = 1e-5;
            let fd = (phi(a + h) - phi(a - h)) / (2.0 * h);
            assert!((phi_prime(a) - fd).abs() < 1e-8, "alpha={a}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(phi_inverse(1.0).unwrap().alpha, 0.0);
        let r = phi_inverse(1.2660658778).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-9);
        assert!(matches!(phi_inverse(0.9), Err(Error::Domain(_))));
        for &y in &[1.0 + 1e-14, 1.0 + 1e-8, 1.001, 1.5, 3.0, 40.0, 1e4] {
            let r = phi_inverse(y).unwrap();
            assert!((phi(r.alpha) - y).abs() <= 1e-12 * y, "y={y}");
            assert!(r.iterations <= PHI_INVERSE_MAX_ITER);
        }
    }

    #[test]
    fn radial_factor_examples() {
        assert_eq!(radial_factor(0.0, 1.0).unwrap(), 1.0);
        assert!((radial_factor(0.5, 1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!(matches!(radial_factor(1.2, 1.0), Err(Error::NotRiemannian { .. })));
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(amplitude(1.0, 1.0).unwrap(), 0.0);
        let r = radial_factor(0.5, 1.0).unwrap();
        let a = amplitude(r, 1.0).unwrap();
        // Oracle: bisection on the series for φ(α) = √2.
        let (mut lo, mut hi) = (0.0f64, 4.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let mut s = 0.0;
            let mut term = 1.0;
            for m in 0..60 {
                if m > 0 {
                    term *= (0.5 * mid) * (0.5 * mid) / (m * m) as f64;
                }
                s += term;
            }
            if s < std::f64::consts::SQRT_2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((a - lo).abs() < 1e-10);
        assert!((a - 1.2282198518).abs() < 1e-9);
        assert!((a - amplitude_from_default(0.5, 1.0).unwrap()).abs() < 1e-12);
        // Smaller default, smaller amplitude.
        let a_small = amplitude(radial_factor(0.25, 1.0).unwrap(), 1.0).unwrap();
        assert!(a_small < a);
        assert!(amplitude(2.0, 1.0).is_err());
        assert_eq!(amplitude_from_default(0.0, 1.3).unwrap(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn inverse_is_monotone(y1 in 1.0..50.0f64, dy in 0.0..10.0f64) {
                let a1 = phi_inverse(y1).unwrap().alpha;
                let a2 = phi_inverse(y1 + dy).unwrap().alpha;
                prop_assert!(a2 >= a1);
            }

            #[test]
            fn amplitude_monotone_in_default(e1 in 0.0..0.9f64, frac in 0.0..1.0f64, dlu in 0.5..1.0f64) {
                let e0 = e1 * frac;
                let a0 = amplitude_from_default(e0, dlu).unwrap();
                let a1 = amplitude_from_default(e1, dlu).unwrap();
                prop_assert!(a0 <= a1);
            }

            #[test]
            fn average_condition(eta in 0.0..0.95f64, dlu in 0.3..1.0f64) {
                let r = radial_factor(eta, dlu).unwrap();
                let a = amplitude(r, dlu).unwrap();
                prop_assert!((r * phi(a) - 1.0 / dlu).abs() <= 1e-10);
            }
        }
    }
}
