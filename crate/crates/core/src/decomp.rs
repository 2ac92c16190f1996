//! Splitting an isometric default into primitive metrics
//! `Δ = Σ_j η_j dℓ_j ⊗ dℓ_j` over a fixed dictionary of linear forms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{Grid, LinearForm, MetricField, Sym2, PSD_TOL};
use crate::par;

/// Largest accepted sup-node Frobenius reconstruction error.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Unit forms at angles `(i - 1)π/k`, `i = 1..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormDictionary {
    pub forms: Vec<LinearForm>,
}

impl FormDictionary {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

pub fn build_dictionary(k: usize) -> Result<FormDictionary> {
    if k < 3 {
        return Err(Error::InvalidDictionary(k));
    }
    let forms = (0..k).map(|i| LinearForm::from_angle(i as f64 * PI / k as f64)).collect();
    Ok(FormDictionary { forms })
}

/// Ordered `(ℓ_j, η_j)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveDecomposition {
    pub grid: Grid,
    pub forms: Vec<LinearForm>,
    pub coefficients: Vec<Vec<f64>>,
    /// Sup-node Frobenius error of the reconstruction.
    pub residual: f64,
}

impl PrimitiveDecomposition {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn eta_max(&self) -> f64 {
        self.coefficients.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// Largest jump of any coefficient between grid neighbours.
    pub fn max_neighbour_jump(&self) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for eta in &self.coefficients {
            for j in 0..g.ny() {
                for i in 0..g.nx() {
                    let here = eta[g.index(i, j)];
                    if i + 1 < g.nx() {
                        worst = worst.max((eta[g.index(i + 1, j)] - here).abs());
                    }
                    if j + 1 < g.ny() {
                        worst = worst.max((eta[g.index(i, j + 1)] - here).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn reconstruct(d: &PrimitiveDecomposition) -> MetricField {
    let squares: Vec<Sym2> = d.forms.iter().map(LinearForm::square).collect();
    MetricField::from_indexed(d.grid, |idx| {
        squares
            .iter()
            .zip(&d.coefficients)
            .fold(Sym2::ZERO, |acc, (&s, eta)| acc + s * eta[idx])
    })
}

pub fn decompose(delta: &MetricField, dict: &FormDictionary) -> Result<PrimitiveDecomposition> {
    if dict.len() < 3 {
        return Err(Error::InvalidDictionary(dict.len()));
    }
    delta.ensure_psd(PSD_TOL)?;
    let grid = *delta.grid();
    let closed_form = dict.len() == 3 && is_standard_triple(dict);
    let solver = Nnls::new(dict);
    let per_node = par::try_map_indexed(grid.len(), |idx| {
        let m = delta.at(idx);
        let c = if closed_form { closed_form_k3(&m) } else { solver.solve(&m) };
        let c = c.ok_or(Error::ConeViolation { node: idx, e: m.e, f: m.f, g: m.g, residual: f64::NAN })?;
        let rec = dict.forms.iter().zip(&c).fold(Sym2::ZERO, |acc, (l, &x)| acc + l.square() * x);
        let residual = (rec - m).frobenius();
        let scale = m.frobenius().max(1.0);
        if !(residual <= RESIDUAL_TOL * scale) {
            return Err(Error::ConeViolation { node: idx, e: m.e, f: m.f, g: m.g, residual });
        }
        Ok((c, residual))
    })?;
    let mut coefficients = vec![vec![0.0; grid.len()]; dict.len()];
    let mut residual = 0.0f64;
    for (idx, (c, res)) in per_node.into_iter().enumerate() {
        for (j, x) in c.into_iter().enumerate() {
            coefficients[j][idx] = x;
        }
        residual = residual.max(res);
    }
    Ok(PrimitiveDecomposition { grid, forms: dict.forms.clone(), coefficients, residual })
}

fn is_standard_triple(dict: &FormDictionary) -> bool {
    dict.forms
        .iter()
        .enumerate()
        .all(|(i, l)| (l.angle() - i as f64 * PI / 3.0).abs() < 1e-15)
}

/// Coefficients for the 0°, 60°, 120° dictionary:
/// `c1 = E - G/3`, `c2 + c3 = 4G/3`, `c2 - c3 = 4F/√3`.
pub fn closed_form_k3(m: &Sym2) -> Option<Vec<f64>> {
    let c1 = m.e - m.g / 3.0;
    let sum = 4.0 * m.g / 3.0;
    let diff = 4.0 * m.f / 3f64.sqrt();
    let mut c = vec![c1, 0.5 * (sum + diff), 0.5 * (sum - diff)];
    for x in c.iter_mut() {
        if *x < 0.0 {
            if *x < -PSD_TOL {
                return None;
            }
            *x = 0.0;
        }
    }
    Some(c)
}

// Lawson–Hanson active-set NNLS in the three-dimensional space of symmetric
// matrices, with F weighted by √2 so the least-squares norm is Frobenius.
struct Nnls {
    cols: Vec<[f64; 3]>,
}

impl Nnls {
    fn new(dict: &FormDictionary) -> Self {
        let cols = dict
            .forms
            .iter()
            .map(|l| [l.a() * l.a(), 2f64.sqrt() * l.a() * l.b(), l.b() * l.b()])
            .collect();
        Nnls { cols }
    }

    fn solve(&self, m: &Sym2) -> Option<Vec<f64>> {
        let d = [m.e, 2f64.sqrt() * m.f, m.g];
        let k = self.cols.len();
        let scale = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Some(vec![0.0; k]);
        }
        let tol = 1e-14 * scale;
        let mut x = vec![0.0; k];
        let mut passive = vec![false; k];
        for _outer in 0..3 * k + 10 {
            let w = self.gradient(&d, &x);
            // Entering column: largest gradient, ties to the lowest index.
            let mut enter = None;
            let mut best = tol;
            for j in 0..k {
                if !passive[j] && w[j] > best {
                    best = w[j];
                    enter = Some(j);
                }
            }
            let Some(j) = enter else { break };
            passive[j] = true;
            for _inner in 0..3 * k + 10 {
                let z = self.passive_solve(&d, &passive)?;
                if passive.iter().zip(&z).all(|(&p, &zi)| !p || zi > 0.0) {
                    x = z;
                    break;
                }
                let mut step = 1.0f64;
                for i in 0..k {
                    if passive[i] && z[i] <= 0.0 {
                        step = step.min(x[i] / (x[i] - z[i]));
                    }
                }
                for i in 0..k {
                    if passive[i] {
                        x[i] += step * (z[i] - x[i]);
                        if x[i] <= 1e-15 * scale {
                            x[i] = 0.0;
                            passive[i] = false;
                        }
                    }
                }
            }
        }
        Some(x)
    }

    fn gradient(&self, d: &[f64; 3], x: &[f64]) -> Vec<f64> {
        let mut r = *d;
        for (c, &xi) in self.cols.iter().zip(x) {
            for a in 0..3 {
                r[a] -= c[a] * xi;
            }
        }
        self.cols.iter().map(|c| c[0] * r[0] + c[1] * r[1] + c[2] * r[2]).collect()
    }

    // Unconstrained least squares on the passive columns via the normal
    // equations (at most three independent columns in R³).
    fn passive_solve(&self, d: &[f64; 3], passive: &[bool]) -> Option<Vec<f64>> {
        let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
        let p = idx.len();
        let mut ata = vec![0.0; p * p];
        let mut atb = vec![0.0; p];
        for (r, &i) in idx.iter().enumerate() {
            let ci = self.cols[i];
            atb[r] = ci[0] * d[0] + ci[1] * d[1] + ci[2] * d[2];
            for (s, &j) in idx.iter().enumerate() {
                let cj = self.cols[j];
                ata[r * p + s] = ci[0] * cj[0] + ci[1] * cj[1] + ci[2] * cj[2];
            }
        }
        let sol = solve_spd(&mut ata, &mut atb, p)?;
        let mut z = vec![0.0; passive.len()];
        for (r, &i) in idx.iter().enumerate() {
            z[i] = sol[r];
        }
        Some(z)
    }
}

// Gaussian elimination with partial pivoting on a small dense system.
fn solve_spd(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-14 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(l: &LinearForm) -> f64 {
        l.angle().to_degrees()
    }

    #[test]
    fn dictionaries() {
        let d3 = build_dictionary(3).unwrap();
        let a: Vec<f64> = d3.forms.iter().map(deg).collect();
        assert!((a[0]).abs() < 1e-12 && (a[1] - 60.0).abs() < 1e-12 && (a[2] - 120.0).abs() < 1e-12);
        let d4 = build_dictionary(4).unwrap();
        let a: Vec<f64> = d4.forms.iter().map(deg).collect();
        for (x, y) in a.iter().zip([0.0, 45.0, 90.0, 135.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(matches!(build_dictionary(2), Err(Error::InvalidDictionary(2))));
    }

    fn single(m: Sym2, k: usize) -> Result<Vec<f64>> {
        let field = MetricField::constant(Grid::square(3).unwrap(), m);
        let d = decompose(&field, &build_dictionary(k).unwrap())?;
        Ok(d.coefficients.iter().map(|c| c[4]).collect())
    }

    #[test]
    fn k3_examples() {
        let c = single(Sym2::IDENTITY, 3).unwrap();
        for x in c {
            assert!((x - 2.0 / 3.0).abs() < 1e-15);
        }
        let c = single(Sym2::diag(2.0, 0.0), 3).unwrap();
        assert_eq!(c, vec![2.0, 0.0, 0.0]);
        let c = single(Sym2::new(1.0, 0.2, 1.0), 3).unwrap();
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c[1] - 0.8976).abs() < 1e-4 && (c[2] - 0.4357).abs() < 1e-4);
    }

    #[test]
    fn k3_cone_violation() {
        // E < G/3: the 0° coefficient would be negative.
        let err = single(Sym2::new(0.5, 0.0, 2.0), 3).unwrap_err();
        assert!(matches!(err, Error::ConeViolation { node: 0, .. }));
        let err = single(Sym2::new(0.5, 0.9, 2.0), 3).unwrap_err();
        assert!(matches!(err, Error::ConeViolation { .. }));
    }

    #[test]
    fn not_psd_rejected() {
        assert!(matches!(single(Sym2::diag(1.0, -0.1), 5), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn nnls_matches_closed_form_on_k3() {
        let dict = build_dictionary(3).unwrap();
        let nnls = Nnls::new(&dict);
        for m in [Sym2::IDENTITY, Sym2::new(1.0, 0.2, 1.0), Sym2::new(0.7, -0.1, 0.9)] {
            let a = closed_form_k3(&m).unwrap();
            let b = nnls.solve(&m).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_and_single_reconstruct() {
        let grid = Grid::square(3).unwrap();
        let empty = PrimitiveDecomposition { grid, forms: vec![], coefficients: vec![], residual: 0.0 };
        assert!(reconstruct(&empty).data.iter().all(|&m| m == Sym2::ZERO));
        let one = PrimitiveDecomposition {
            grid,
            forms: vec![LinearForm::new(1.0, 0.0).unwrap()],
            coefficients: vec![vec![1.0; 9]],
            residual: 0.0,
        };
        assert!(reconstruct(&one).data.iter().all(|&m| m == Sym2::diag(1.0, 0.0)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        // PSD matrices with eigenvalue ratio at least 0.2, inside the k = 5 cone.
        fn inside_k5() -> impl Strategy<Value = Sym2> {
            (0.01..2.0f64, 0.2..1.0f64, 0.0..PI).prop_map(|(l1, ratio, th)| {
                let (s, c) = th.sin_cos();
                let l2 = l1 * ratio;
                Sym2::new(l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c)
            })
        }

        proptest! {
            #[test]
            fn roundtrip_k5(ms in prop::collection::vec(inside_k5(), 9)) {
                let field = MetricField::new(Grid::square(3).unwrap(), ms).unwrap();
                let d = decompose(&field, &build_dictionary(5).unwrap()).unwrap();
                prop_assert!(d.coefficients.iter().flatten().all(|&x| x >= 0.0));
                let back = reconstruct(&d);
                let err = back.sub(&field).unwrap().sup_frobenius();
                prop_assert!(err <= 1e-9);
            }

            #[test]
            fn k3_scaling(m in (0.5..1.0f64, -0.1..0.1f64, 0.5..1.0f64), s in 0.01..100.0f64) {
                let m = Sym2::new(m.0, m.1, m.2);
                let a = closed_form_k3(&m).unwrap();
                let b = closed_form_k3(&(m * s)).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x * s - y).abs() <= 1e-12 * (1.0 + y.abs()));
                }
            }
        }
    }
}
