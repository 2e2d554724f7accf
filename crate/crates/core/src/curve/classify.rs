use nalgebra::Vector3;
use serde::Serialize;

use super::frenet::frenet_with;
use super::DualCurve;
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::line::{dual_to_line, Line3};
use crate::tolerance::Tolerances;
use crate::vector::{DualVec3, UnitDualVec3};

/// `α̃(s̃) = x̃ s̃ + ỹ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualLine {
    pub direction: UnitDualVec3,
    pub point: DualVec3,
}

impl DualLine {
    /// The line of real space traced by the real part.
    pub fn real_line(&self) -> Result<Line3> {
        Line3::through(self.point.re, self.direction.re())
    }

    /// The line of real space represented by the direction on the dual sphere.
    pub fn indicatrix_line(&self) -> Result<Line3> {
        dual_to_line(self.direction.vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StraightLineClassification {
    pub is_line: bool,
    /// Largest `‖α̃′ × α̃″‖ / ‖α′‖³` over the samples, real and dual part.
    pub max_curvature: (f64, f64),
    pub samples: usize,
    pub line: Option<DualLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarClassification {
    pub is_planar: bool,
    /// Set when the curve is a straight line and the plane is one of many.
    pub degenerate: bool,
    pub max_torsion: (f64, f64),
    pub max_plane_residual: (f64, f64),
    pub samples: usize,
    pub plane_point: Option<DualVec3>,
    pub plane_normal: Option<UnitDualVec3>,
}

fn curvature_parts(c: &DualCurve, t: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let d1 = c.derivative(t, 1)?;
    let v = d1.re.norm();
    if !(v > tol.zero) {
        return Err(Error::IrregularCurve { t, speed: v });
    }
    let b = d1.cross(&c.derivative(t, 2)?);
    let (re, du) = b.part_norms();
    let v3 = v.powi(3);
    Ok((re / v3, du / v3))
}

pub fn classify_straight_line(c: &DualCurve, tol: &Tolerances) -> Result<StraightLineClassification> {
    let grid = c.grid(tol.classify_samples.max(2));
    let mut worst = (0.0f64, 0.0f64);
    for &t in &grid {
        let (re, du) = curvature_parts(c, t, tol)?;
        worst = (worst.0.max(re), worst.1.max(du));
    }
    let is_line = worst.0 < tol.classify && worst.1 < tol.classify;
    let line = if is_line {
        let t0 = grid[0];
        Some(DualLine {
            direction: c.derivative(t0, 1)?.normalize_with(tol)?,
            point: c.eval(t0)?,
        })
    } else {
        None
    };
    Ok(StraightLineClassification {
        is_line,
        max_curvature: worst,
        samples: grid.len(),
        line,
    })
}

/// A unit dual vector dual-orthogonal to `x`.
pub(crate) fn dual_normal_to(x: &UnitDualVec3) -> UnitDualVec3 {
    let xr = x.re();
    let axis = if xr.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let nr = xr.cross(&axis).normalize();
    let nd = -xr * x.du().dot(&nr);
    UnitDualVec3::new_unchecked(DualVec3::new(nr, nd))
}

fn max_abs(acc: (f64, f64), v: DualScalar) -> (f64, f64) {
    (acc.0.max(v.re.abs()), acc.1.max(v.du.abs()))
}

pub fn classify_planar(c: &DualCurve, tol: &Tolerances) -> Result<PlanarClassification> {
    let line = classify_straight_line(c, tol)?;
    let grid = c.grid(tol.classify_samples.max(2));
    let t0 = grid[0];
    let origin = c.eval(t0)?;
    let plane_residual = |normal: &UnitDualVec3| -> Result<(f64, f64)> {
        let mut worst = (0.0, 0.0);
        for &t in &grid {
            worst = max_abs(worst, (c.eval(t)? - origin).dot(normal.vec()));
        }
        Ok(worst)
    };
    if let Some(l) = line.line {
        let normal = dual_normal_to(&l.direction);
        let residual = plane_residual(&normal)?;
        return Ok(PlanarClassification {
            is_planar: true,
            degenerate: true,
            max_torsion: (0.0, 0.0),
            max_plane_residual: residual,
            samples: grid.len(),
            plane_point: Some(origin),
            plane_normal: Some(normal),
        });
    }
    let mut torsion = (0.0, 0.0);
    for &t in &grid {
        torsion = max_abs(torsion, frenet_with(c, t, tol)?.tau);
    }
    let normal = frenet_with(c, t0, tol)?.b_vec;
    let residual = plane_residual(&normal)?;
    let is_planar = torsion.0 < tol.classify
        && torsion.1 < tol.classify
        && residual.0 < tol.classify
        && residual.1 < tol.classify;
    Ok(PlanarClassification {
        is_planar,
        degenerate: false,
        max_torsion: torsion,
        max_plane_residual: residual,
        samples: grid.len(),
        plane_point: is_planar.then_some(origin),
        plane_normal: is_planar.then_some(normal),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveSpec, Expr};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn dual_line() -> DualCurve {
        CurveSpec::new(
            Expr::Line { point: [0.0; 3], direction: [1.0, 2.0, 3.0] },
            Expr::Line { point: [1.0, 1.0, 1.0], direction: [0.0, 1.0, 0.0] },
        )
        .build()
        .unwrap()
    }

    fn circle(dual: Expr) -> DualCurve {
        CurveSpec::new(Expr::Circle { radius: 2.0 }, dual).build().unwrap()
    }

    fn helix() -> DualCurve {
        CurveSpec::new(Expr::Helix { radius: 3.0, pitch: 4.0 }, Expr::zero())
            .build()
            .unwrap()
    }

    #[test]
    fn straight_lines() {
        let r = classify_straight_line(&dual_line(), &tol()).unwrap();
        assert!(r.is_line);
        let l = r.line.unwrap();
        let d = Vector3::new(1.0, 2.0, 3.0) / 14f64.sqrt();
        assert!((l.direction.re() - d).norm() < 1e-15);
        assert_eq!(l.point, DualVec3::from_arrays([0.0; 3], [1.0; 3]));
        assert!(!classify_straight_line(&helix(), &tol()).unwrap().is_line);
        assert!(!classify_straight_line(&circle(Expr::zero()), &tol()).unwrap().is_line);
    }

    #[test]
    fn planar_curves() {
        let r = classify_planar(&circle(Expr::zero()), &tol()).unwrap();
        assert!(r.is_planar && !r.degenerate);
        let n = r.plane_normal.unwrap().re();
        assert!((n.z.abs() - 1.0).abs() < 1e-14);

        let shifted = Expr::Line { point: [0.3, -1.0, 2.0], direction: [0.0; 3] };
        assert!(classify_planar(&circle(shifted), &tol()).unwrap().is_planar);

        let r = classify_planar(&helix(), &tol()).unwrap();
        assert!(!r.is_planar);
        assert!(r.plane_normal.is_none());
    }

    #[test]
    fn straight_line_is_degenerately_planar() {
        let r = classify_planar(&dual_line(), &tol()).unwrap();
        assert!(r.is_planar && r.degenerate);
        let n = r.plane_normal.unwrap();
        assert!(crate::vector::sphere_residual(n.vec()) < 1e-15);
        assert!(r.max_plane_residual.0 < 1e-12 && r.max_plane_residual.1 < 1e-12);
    }
}
