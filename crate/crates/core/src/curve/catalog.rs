//! Curve definitions in JSON: `{"real": <expr>, "dual": <expr>}`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{CurveSource, DualCurve};
use crate::error::{Error, Result};
use crate::numeric::{fd_weights, nearest_stencil};
use crate::vector::DualVec3;

/// Samples are interpolated with this many neighbouring nodes.
const SAMPLE_STENCIL: usize = 7;

type Jet = [Vector3<f64>; 4];

/// A real vector-valued function of one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    /// `(R cos t, R sin t, H t)`
    Helix { radius: f64, pitch: f64 },
    Circle { radius: f64 },
    Line { point: [f64; 3], direction: [f64; 3] },
    /// `coeffs[axis][k]` multiplies `t^k`.
    Polynomial { coeffs: Vec<Vec<f64>> },
    Scaled { factor: f64, of: Box<Expr> },
    Samples { t: Vec<f64>, points: Vec<[f64; 3]> },
    /// `point(t) × direction(t)`: the moment part of a line family.
    Moment { point: Box<Expr>, direction: Box<Expr> },
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Polynomial {
            coeffs: vec![vec![0.0]; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match self {
            Expr::Helix { radius, pitch } => {
                if !finite(&[*radius, *pitch]) {
                    return bad("helix parameters must be finite".into());
                }
            }
            Expr::Circle { radius } => {
                if !radius.is_finite() {
                    return bad("circle radius must be finite".into());
                }
            }
            Expr::Line { point, direction } => {
                if !finite(point) || !finite(direction) {
                    return bad("line must have finite coordinates".into());
                }
            }
            Expr::Polynomial { coeffs } => {
                if coeffs.len() != 3 {
                    return bad(format!("polynomial needs 3 coefficient rows, got {}", coeffs.len()));
                }
                if !coeffs.iter().all(|r| finite(r)) {
                    return bad("polynomial coefficients must be finite".into());
                }
            }
            Expr::Scaled { factor, of } => {
                if !factor.is_finite() {
                    return bad("scale factor must be finite".into());
                }
                of.validate()?;
            }
            Expr::Samples { t, points } => {
                if t.len() < 2 || t.len() != points.len() {
                    return bad(format!(
                        "samples need matching t and points with at least 2 entries ({} vs {})",
                        t.len(),
                        points.len()
                    ));
                }
                if !finite(t) || !points.iter().all(|p| finite(p)) {
                    return bad("samples must be finite".into());
                }
                if t.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("sample parameters must be strictly increasing".into());
                }
            }
            Expr::Moment { point, direction } => {
                point.validate()?;
                direction.validate()?;
            }
        }
        Ok(())
    }

    /// Parameter interval implied by sampled data, if any.
    fn sample_range(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Samples { t, .. } => Some((t[0], t[t.len() - 1])),
            Expr::Scaled { of, .. } => of.sample_range(),
            Expr::Moment { point, direction } => {
                match (point.sample_range(), direction.sample_range()) {
                    (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1))),
                    (a, b) => a.or(b),
                }
            }
            _ => None,
        }
    }

    /// Value and derivatives up to `order` (≤ 3) at `t`.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        let mut out = [Vector3::zeros(); 4];
        match self {
            Expr::Helix { radius, pitch } => helix_jet(*radius, *pitch, t, &mut out),
            Expr::Circle { radius } => helix_jet(*radius, 0.0, t, &mut out),
            Expr::Line { point, direction } => {
                let d = Vector3::from(*direction);
                out[0] = Vector3::from(*point) + d * t;
                out[1] = d;
            }
            Expr::Polynomial { coeffs } => {
                for (axis, row) in coeffs.iter().enumerate() {
                    for (k, slot) in out.iter_mut().enumerate().take(order + 1) {
                        slot[axis] = poly_derivative(row, t, k);
                    }
                }
            }
            Expr::Scaled { factor, of } => {
                let j = of.jet(t, order);
                for k in 0..=order {
                    out[k] = j[k] * *factor;
                }
            }
            Expr::Samples { t: nodes, points } => {
                let r = nearest_stencil(nodes, t, SAMPLE_STENCIL);
                let w = fd_weights(t, &nodes[r.clone()], order);
                for (k, slot) in out.iter_mut().enumerate().take(order + 1) {
                    *slot = r
                        .clone()
                        .zip(&w[k])
                        .map(|(j, c)| Vector3::from(points[j]) * *c)
                        .sum();
                }
            }
            Expr::Moment { point, direction } => {
                let p = point.jet(t, order);
                let d = direction.jet(t, order);
                const BINOM: [[f64; 4]; 4] = [
                    [1.0, 0.0, 0.0, 0.0],
                    [1.0, 1.0, 0.0, 0.0],
                    [1.0, 2.0, 1.0, 0.0],
                    [1.0, 3.0, 3.0, 1.0],
                ];
                for k in 0..=order {
                    out[k] = (0..=k).map(|i| p[i].cross(&d[k - i]) * BINOM[k][i]).sum();
                }
            }
        }
        out
    }
}

fn helix_jet(r: f64, h: f64, t: f64, out: &mut Jet) {
    let (s, c) = t.sin_cos();
    out[0] = Vector3::new(r * c, r * s, h * t);
    out[1] = Vector3::new(-r * s, r * c, h);
    out[2] = Vector3::new(-r * c, -r * s, 0.0);
    out[3] = Vector3::new(r * s, -r * c, 0.0);
}

fn poly_derivative(coeffs: &[f64], t: f64, k: usize) -> f64 {
    // Horner on the k-th derivative's coefficients
    let mut acc = 0.0;
    for (i, c) in coeffs.iter().enumerate().skip(k).rev() {
        let falling: f64 = ((i - k + 1)..=i).map(|m| m as f64).product();
        acc = acc * t + c * falling;
    }
    acc
}

/// `{"real": <expr>, "dual": <expr>, "domain": [a, b]}`; `dual` defaults
/// to zero and `domain` to the sample range or `[0, 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub real: Expr,
    #[serde(default = "Expr::zero")]
    pub dual: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug)]
struct CatalogSource {
    real: Expr,
    dual: Expr,
}

impl CatalogSource {
    fn part(&self, t: f64, order: usize) -> Result<DualVec3> {
        let v = DualVec3::new(self.real.jet(t, order)[order], self.dual.jet(t, order)[order]);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericBreakdown { op: "catalog eval" })
        }
    }
}

impl CurveSource for CatalogSource {
    fn eval(&self, t: f64) -> Result<DualVec3> {
        self.part(t, 0)
    }

    fn derivative(&self, t: f64, order: usize) -> Option<Result<DualVec3>> {
        Some(self.part(t, order))
    }

    fn has_derivatives(&self) -> bool {
        true
    }
}

impl CurveSpec {
    pub fn new(real: Expr, dual: Expr) -> Self {
        CurveSpec {
            real,
            dual,
            domain: None,
        }
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = Some([a, b]);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("curve JSON: {e}")))
    }

    pub fn domain(&self) -> (f64, f64) {
        if let Some([a, b]) = self.domain {
            return (a, b);
        }
        match (self.real.sample_range(), self.dual.sample_range()) {
            (Some(a), Some(b)) => (a.0.max(b.0), a.1.min(b.1)),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => (0.0, TAU),
        }
    }

    pub fn build(&self) -> Result<DualCurve> {
        self.real.validate()?;
        self.dual.validate()?;
        let source = CatalogSource {
            real: self.real.clone(),
            dual: self.dual.clone(),
        };
        DualCurve::new(Arc::new(source), self.domain())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let text = r#"{"real":{"kind":"scaled","factor":2,"of":{"kind":"helix","radius":3,"pitch":4}},
                       "dual":{"kind":"moment","point":{"kind":"circle","radius":1},
                               "direction":{"kind":"line","point":[0,0,1],"direction":[0,0,0]}}}"#;
        let spec = CurveSpec::from_json(text).unwrap();
        let c = spec.build().unwrap();
        let v = c.eval(0.0).unwrap();
        assert_eq!(v.re, Vector3::new(6.0, 0.0, 0.0));
        // (1,0,0) × (0,0,1)
        assert_eq!(v.du, Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(c.domain(), (0.0, TAU));
    }

    #[test]
    fn unknown_kind_is_an_error() {
        assert!(CurveSpec::from_json(r#"{"real":{"kind":"spiral"}}"#).is_err());
        assert!(CurveSpec::from_json(r#"{"real":{"kind":"polynomial","coeffs":[[1]]}}"#)
            .unwrap()
            .build()
            .is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let row = [1.0, -2.0, 0.5, 3.0];
        let t = 1.3;
        assert!((poly_derivative(&row, t, 0) - (1.0 - 2.0 * t + 0.5 * t * t + 3.0 * t.powi(3))).abs() < 1e-12);
        assert!((poly_derivative(&row, t, 1) - (-2.0 + t + 9.0 * t * t)).abs() < 1e-12);
        assert!((poly_derivative(&row, t, 2) - (1.0 + 18.0 * t)).abs() < 1e-12);
        assert!((poly_derivative(&row, t, 3) - 18.0).abs() < 1e-12);
        assert_eq!(poly_derivative(&row[..1], t, 2), 0.0);
    }

    #[test]
    fn moment_jet_matches_finite_differences() {
        let e = Expr::Moment {
            point: Box::new(Expr::Helix { radius: 1.0, pitch: 0.5 }),
            direction: Box::new(Expr::Polynomial {
                coeffs: vec![vec![0.0, 1.0], vec![1.0, 0.0, 1.0], vec![0.3]],
            }),
        };
        let t = 0.4;
        let h = 1e-4;
        let j = e.jet(t, 3);
        let f = |x: f64| e.jet(x, 0)[0];
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        assert!((j[1] - d1).norm() < 1e-7);
        assert!((j[2] - d2).norm() < 1e-5);
        let g = |x: f64| e.jet(x, 2)[2];
        assert!((j[3] - (g(t + h) - g(t - h)) / (2.0 * h)).norm() < 1e-6);
    }

    #[test]
    fn samples_reproduce_cubics() {
        let t: Vec<f64> = (0..12).map(|i| i as f64 * 0.25).collect();
        let points = t.iter().map(|&x| [x, x * x, x * x * x]).collect();
        let spec = CurveSpec::new(Expr::Samples { t, points }, Expr::zero());
        let c = spec.build().unwrap();
        assert_eq!(c.domain(), (0.0, 2.75));
        let x = 1.1;
        let d = c.derivative(x, 3).unwrap();
        assert!((d.re - Vector3::new(0.0, 0.0, 6.0)).norm() < 1e-8);
        assert!((c.eval(x).unwrap().re - Vector3::new(x, x * x, x * x * x)).norm() < 1e-12);
    }

    #[test]
    fn unsorted_samples_are_rejected() {
        let spec = CurveSpec::new(
            Expr::Samples {
                t: vec![0.0, 2.0, 1.0],
                points: vec![[0.0; 3]; 3],
            },
            Expr::zero(),
        );
        assert!(spec.build().is_err());
    }
}
