//! Built-in initial embeddings and target metrics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::corrugation::Primitive;
use crate::error::{Error, Result};
use crate::fields::{pullback_metric, EmbeddingJet, Grid, LinearForm, MetricField, Sym2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Flat square, `g = 0.5 (dx² + dy²)`.
    FlatShrink,
    /// Flat square, `g = 0.6 dx² + 0.8 dy²`.
    AnisoShrink,
    /// Flat square, `g = f*h - η dx²` with a smooth `η` peaking at 0.5.
    StripPrimitive,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::FlatShrink, Scenario::AnisoShrink, Scenario::StripPrimitive];

    pub fn id(&self) -> &'static str {
        match self {
            Scenario::FlatShrink => "flat-shrink",
            Scenario::AnisoShrink => "aniso-shrink",
            Scenario::StripPrimitive => "strip-primitive",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Scenario::FlatShrink => "plane (x, y, 0) shrunk to g = 0.5 I",
            Scenario::AnisoShrink => "plane (x, y, 0) shrunk to g = diag(0.6, 0.8)",
            Scenario::StripPrimitive => "plane (x, y, 0), single primitive mu = f*h - eta dx^2, eta <= 0.5",
        }
    }

    pub fn initial(&self, grid: Grid) -> EmbeddingJet {
        EmbeddingJet::flat_inclusion(grid)
    }

    pub fn target(&self, grid: Grid) -> MetricField {
        match self {
            Scenario::FlatShrink => MetricField::constant(grid, Sym2::diag(0.5, 0.5)),
            Scenario::AnisoShrink => MetricField::constant(grid, Sym2::diag(0.6, 0.8)),
            Scenario::StripPrimitive => {
                let p = strip_primitive(grid);
                let induced = pullback_metric(&self.initial(grid));
                let sq = p.ell.square();
                MetricField::from_indexed(grid, |idx| induced.at(idx) - sq * p.eta[idx])
            }
        }
    }

    /// The scenario's own primitive metric, when it is one.
    pub fn primitive(&self, grid: Grid) -> Option<Primitive> {
        match self {
            Scenario::StripPrimitive => Some(strip_primitive(grid)),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.id() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

pub fn scenario(id: &str) -> Result<Scenario> {
    id.parse()
}

/// `η(x, y) = 0.5 (0.7 + 0.3 cos πx cos πy)` along `ℓ = x`.
pub fn strip_eta(x: f64, y: f64) -> f64 {
    0.5 * (0.7 + 0.3 * (PI * x).cos() * (PI * y).cos())
}

pub fn strip_primitive(grid: Grid) -> Primitive {
    let eta = (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.coords(idx);
            strip_eta(x, y)
        })
        .collect();
    Primitive::new(LinearForm::new(1.0, 0.0).expect("unit form"), eta)
}

/// Smooth bump vanishing outside `[width, 1 - width]`: `sin⁴` ramps up to a
/// plateau of one.
pub fn collar_weight(t: f64, width: f64) -> f64 {
    let ramp = |s: f64| {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            (0.5 * PI * s).sin().powi(4)
        }
    };
    if t <= width || t >= 1.0 - width {
        return 0.0;
    }
    let len = 0.5 - width;
    ramp((t - width) / (0.5 * len)).min(ramp((1.0 - width - t) / (0.5 * len)))
}

/// `η = amp · w(x) w(y)` with a zero collar of the given width.
pub fn collar_primitive(grid: Grid, ell: LinearForm, amp: f64, width: f64) -> Primitive {
    let eta = (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.coords(idx);
            amp * collar_weight(x, width) * collar_weight(y, width)
        })
        .collect();
    Primitive::new(ell, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::isometric_default;

    #[test]
    fn flat_shrink_default() {
        let grid = Grid::square(9).unwrap();
        let s = scenario("flat-shrink").unwrap();
        let d = isometric_default(&pullback_metric(&s.initial(grid)), &s.target(grid)).unwrap();
        assert!(d.data.iter().all(|&m| m == Sym2::diag(0.5, 0.5)));
    }

    #[test]
    fn strip_is_riemannian() {
        let grid = Grid::square(33).unwrap();
        let p = strip_primitive(grid);
        let max = p.eta.iter().fold(0.0f64, |a, &b| a.max(b));
        assert!((max - 0.5).abs() < 1e-15);
        let t = Scenario::StripPrimitive.target(grid);
        assert!(t.data.iter().all(|m| m.eigenvalues().0 >= 0.5 - 1e-15));
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(scenario("bogus"), Err(Error::UnknownScenario(s)) if s == "bogus"));
        for s in Scenario::ALL {
            assert_eq!(scenario(s.id()).unwrap(), s);
        }
    }

    #[test]
    fn collar_vanishes() {
        assert_eq!(collar_weight(0.05, 0.1), 0.0);
        assert_eq!(collar_weight(0.1, 0.1), 0.0);
        assert_eq!(collar_weight(0.95, 0.1), 0.0);
        assert_eq!(collar_weight(0.5, 0.1), 1.0);
        assert!(collar_weight(0.2, 0.1) > 0.0);
    }
}
