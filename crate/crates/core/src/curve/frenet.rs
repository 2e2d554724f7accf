use serde::Serialize;

use super::DualCurve;
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::vector::{DualVec3, UnitDualVec3};

/// Dual Frenet apparatus at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetData {
    pub t_vec: UnitDualVec3,
    pub n_vec: UnitDualVec3,
    pub b_vec: UnitDualVec3,
    pub kappa: DualScalar,
    pub tau: DualScalar,
    /// `ds̃/dt`
    pub speed: DualScalar,
}

impl FrenetData {
    /// Largest deviation of the frame from dual orthonormality, and of
    /// `b̃` from `t̃ × ñ`, over both parts.
    pub fn orthonormality_defect(&self) -> f64 {
        let (t, n, b) = (self.t_vec.vec(), self.n_vec.vec(), self.b_vec.vec());
        let one = DualScalar::ONE;
        let zero = DualScalar::ZERO;
        let checks = [
            (t.dot(t), one),
            (n.dot(n), one),
            (b.dot(b), one),
            (t.dot(n), zero),
            (t.dot(b), zero),
            (n.dot(b), zero),
        ];
        let mut worst = checks
            .iter()
            .map(|(a, e)| {
                let (r, d) = a.abs_diff(e);
                r.max(d)
            })
            .fold(0.0, f64::max);
        let (r, d) = (t.cross(n) - *b).part_norms();
        worst = worst.max(r).max(d);
        worst
    }
}

pub fn frenet(c: &DualCurve, t: f64) -> Result<FrenetData> {
    frenet_with(c, t, &Tolerances::default())
}

pub fn frenet_with(c: &DualCurve, t: f64, tol: &Tolerances) -> Result<FrenetData> {
    let d1 = c.derivative(t, 1)?;
    let d2 = c.derivative(t, 2)?;
    let d3 = c.derivative(t, 3)?;
    frenet_from_derivatives(t, &d1, &d2, &d3, tol)
}

pub(crate) fn frenet_from_derivatives(
    t: f64,
    d1: &DualVec3,
    d2: &DualVec3,
    d3: &DualVec3,
    tol: &Tolerances,
) -> Result<FrenetData> {
    let speed = d1.norm_with(tol).map_err(|_| Error::IrregularCurve {
        t,
        speed: d1.re.norm(),
    })?;
    let b = d1.cross(d2);
    let kappa_re = b.re.norm() / speed.re.powi(3);
    if !(kappa_re > tol.kappa) {
        return Err(Error::VanishingCurvature { t, kappa: kappa_re });
    }
    let bn = b.norm_with(tol)?;
    let kappa = bn.div(speed.square() * speed)?;
    let tau = b.dot(d3).div(bn.square())?;
    let t_vec = d1.scale(speed.recip()?);
    let n_raw = b.cross(d1);
    let n_vec = n_raw.scale(n_raw.norm_with(tol)?.recip()?);
    let b_vec = t_vec.cross(&n_vec);
    let data = FrenetData {
        t_vec: UnitDualVec3::new_unchecked(t_vec),
        n_vec: UnitDualVec3::new_unchecked(n_vec),
        b_vec: UnitDualVec3::new_unchecked(b_vec),
        kappa: kappa.ensure_finite("curvature")?,
        tau: tau.ensure_finite("torsion")?,
        speed,
    };
    Ok(data)
}

/// Largest part norms of the three Frenet-equation residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetResidual {
    pub t_eq: (f64, f64),
    pub n_eq: (f64, f64),
    pub b_eq: (f64, f64),
}

impl FrenetResidual {
    pub fn max(&self) -> f64 {
        [self.t_eq, self.n_eq, self.b_eq]
            .iter()
            .map(|(a, b)| a.max(*b))
            .fold(0.0, f64::max)
    }
}

/// Residuals of `t̃′ = κ̃ñ`, `ñ′ = −κ̃t̃ + τ̃b̃`, `b̃′ = −τ̃ñ` (primes are
/// `d/ds̃`) with the frame differentiated numerically in `t` at step `h`.
pub fn frenet_equation_residual(c: &DualCurve, t: f64, h: f64) -> Result<FrenetResidual> {
    let f = frenet(c, t)?;
    let frame = |x: f64| -> Result<[DualVec3; 3]> {
        let g = frenet(c, x)?;
        Ok([*g.t_vec.vec(), *g.n_vec.vec(), *g.b_vec.vec()])
    };
    let frames: Vec<[DualVec3; 3]> = [-2.0, -1.0, 1.0, 2.0]
        .iter()
        .map(|k| frame(t + k * h))
        .collect::<Result<_>>()?;
    let inv_speed = f.speed.recip()?;
    let deriv = |i: usize| -> DualVec3 {
        let d = (frames[0][i] - frames[3][i] + (frames[2][i] - frames[1][i]) * 8.0)
            * (1.0 / (12.0 * h));
        d.scale(inv_speed)
    };
    let (tv, nv, bv) = (*f.t_vec.vec(), *f.n_vec.vec(), *f.b_vec.vec());
    let rt = deriv(0) - nv.scale(f.kappa);
    let rn = deriv(1) + tv.scale(f.kappa) - bv.scale(f.tau);
    let rb = deriv(2) + nv.scale(f.tau);
    Ok(FrenetResidual {
        t_eq: rt.part_norms(),
        n_eq: rn.part_norms(),
        b_eq: rb.part_norms(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveSpec, Expr};
    use nalgebra::Vector3;

    fn helix(dual_scale: f64) -> DualCurve {
        let h = Expr::Helix { radius: 3.0, pitch: 4.0 };
        let dual = if dual_scale == 0.0 {
            Expr::zero()
        } else {
            Expr::Scaled {
                factor: dual_scale,
                of: Box::new(h.clone()),
            }
        };
        CurveSpec::new(h, dual).build().unwrap()
    }

    #[test]
    fn helix_apparatus() {
        let f = frenet(&helix(0.0), 0.0).unwrap();
        assert!(f.kappa.approx_eq(&DualScalar::new(0.12, 0.0), 1e-14, 1e-14));
        assert!(f.tau.approx_eq(&DualScalar::new(0.16, 0.0), 1e-14, 1e-14));
        assert!((f.t_vec.re() - Vector3::new(0.0, 0.6, 0.8)).norm() < 1e-14);
        assert!((f.n_vec.re() - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-14);
        assert!((f.b_vec.re() - Vector3::new(0.0, -0.8, 0.6)).norm() < 1e-14);
        assert!(f.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn scaled_dual_part() {
        let f = frenet(&helix(0.1), 0.3).unwrap();
        assert!(f.kappa.approx_eq(&DualScalar::new(0.12, -0.012), 1e-14, 1e-14));
        assert!(f.tau.approx_eq(&DualScalar::new(0.16, -0.016), 1e-14, 1e-14));
        assert!(f.orthonormality_defect() < 1e-13);
    }

    #[test]
    fn straight_line_has_no_frame() {
        let c = CurveSpec::new(
            Expr::Line { point: [0.0; 3], direction: [1.0, 2.0, 3.0] },
            Expr::Line { point: [1.0; 3], direction: [0.0, 1.0, 0.0] },
        )
        .build()
        .unwrap();
        assert!(matches!(frenet(&c, 0.5), Err(Error::VanishingCurvature { .. })));
    }

    #[test]
    fn pure_dual_speed_is_irregular() {
        let c = CurveSpec::new(
            Expr::Line { point: [1.0; 3], direction: [0.0; 3] },
            Expr::Line { point: [0.0; 3], direction: [1.0, 0.0, 0.0] },
        )
        .build()
        .unwrap();
        assert!(matches!(frenet(&c, 0.5), Err(Error::IrregularCurve { .. })));
    }

    #[test]
    fn frenet_equations_hold() {
        let c = CurveSpec::new(
            Expr::Helix { radius: 2.0, pitch: 0.7 },
            Expr::Polynomial {
                coeffs: vec![vec![0.0, 0.3], vec![1.0, 0.0, 0.2], vec![0.0, 0.0, 0.0, 0.05]],
            },
        )
        .build()
        .unwrap();
        for t in [0.2, 1.0, 2.5] {
            let r = frenet_equation_residual(&c, t, 1e-3).unwrap();
            assert!(r.max() < 1e-6, "{r:?}");
            let r = frenet_equation_residual(&c.with_finite_differences(), t, 1e-3).unwrap();
            assert!(r.max() < 1e-4, "{r:?}");
        }
    }
}
