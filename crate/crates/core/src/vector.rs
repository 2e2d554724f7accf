//! Dual 3-vectors `ā + εā*` and the dual unit sphere.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Tolerance on the two dual-unit-sphere constraints used when a
/// [`UnitDualVec3`] is built from arbitrary data.
pub const UNIT_SPHERE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualVec3 {
    pub re: Vector3<f64>,
    pub du: Vector3<f64>,
}

impl DualVec3 {
    pub fn new(re: Vector3<f64>, du: Vector3<f64>) -> Self {
        DualVec3 { re, du }
    }

    pub fn from_arrays(re: [f64; 3], du: [f64; 3]) -> Self {
        DualVec3 {
            re: Vector3::from(re),
            du: Vector3::from(du),
        }
    }

    pub fn zero() -> Self {
        DualVec3::default()
    }

    pub fn real(re: Vector3<f64>) -> Self {
        DualVec3 {
            re,
            du: Vector3::zeros(),
        }
    }

    /// Component `i` as a dual scalar.
    pub fn component(&self, i: usize) -> DualScalar {
        DualScalar::new(self.re[i], self.du[i])
    }

    pub fn from_components(c: [DualScalar; 3]) -> Self {
        DualVec3 {
            re: Vector3::new(c[0].re, c[1].re, c[2].re),
            du: Vector3::new(c[0].du, c[1].du, c[2].du),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(self.du.iter()).all(|v| v.is_finite())
    }

    /// `⟨ã, b̃⟩ = ⟨a,b⟩ + ε(⟨a,b*⟩ + ⟨a*,b⟩)`
    pub fn dot(&self, b: &DualVec3) -> DualScalar {
        DualScalar::new(self.re.dot(&b.re), self.re.dot(&b.du) + self.du.dot(&b.re))
    }

    /// `ã × b̃ = a×b + ε(a×b* + a*×b)`
    pub fn cross(&self, b: &DualVec3) -> DualVec3 {
        DualVec3 {
            re: self.re.cross(&b.re),
            du: self.re.cross(&b.du) + self.du.cross(&b.re),
        }
    }

    /// Multiply by a dual scalar.
    pub fn scale(&self, k: DualScalar) -> DualVec3 {
        DualVec3 {
            re: self.re * k.re,
            du: self.du * k.re + self.re * k.du,
        }
    }

    /// `(‖re‖, ‖du‖)`; the size of a residual vector in both parts.
    pub fn part_norms(&self) -> (f64, f64) {
        (self.re.norm(), self.du.norm())
    }

    /// Dual norm `‖ā‖ + ε⟨ā,ā*⟩/‖ā‖`, defined only for `ā ≠ 0`.
    pub fn norm(&self) -> Result<DualScalar> {
        self.norm_with(&Tolerances::default())
    }

    pub fn norm_with(&self, tol: &Tolerances) -> Result<DualScalar> {
        let n = self.re.norm();
        if !n.is_finite() {
            return Err(Error::NumericBreakdown { op: "norm" });
        }
        if n <= tol.zero {
            return Err(Error::ZeroRealPart { norm: n });
        }
        DualScalar::new(n, self.re.dot(&self.du) / n).ensure_finite("norm")
    }

    /// Divide by the dual norm; the result lies on the dual unit sphere.
    pub fn normalize(&self) -> Result<UnitDualVec3> {
        self.normalize_with(&Tolerances::default())
    }

    pub fn normalize_with(&self, tol: &Tolerances) -> Result<UnitDualVec3> {
        let n = self.norm_with(tol)?;
        let inv = n.recip()?;
        let v = self.scale(inv);
        if !v.is_finite() {
            return Err(Error::NumericBreakdown { op: "normalize" });
        }
        Ok(UnitDualVec3(v))
    }
}

impl Add for DualVec3 {
    type Output = DualVec3;
    fn add(self, b: DualVec3) -> DualVec3 {
        DualVec3 {
            re: self.re + b.re,
            du: self.du + b.du,
        }
    }
}

impl AddAssign for DualVec3 {
    fn add_assign(&mut self, b: DualVec3) {
        self.re += b.re;
        self.du += b.du;
    }
}

impl Sub for DualVec3 {
    type Output = DualVec3;
    fn sub(self, b: DualVec3) -> DualVec3 {
        DualVec3 {
            re: self.re - b.re,
            du: self.du - b.du,
        }
    }
}

impl Neg for DualVec3 {
    type Output = DualVec3;
    fn neg(self) -> DualVec3 {
        DualVec3 {
            re: -self.re,
            du: -self.du,
        }
    }
}

impl Mul<DualScalar> for DualVec3 {
    type Output = DualVec3;
    fn mul(self, k: DualScalar) -> DualVec3 {
        self.scale(k)
    }
}

impl Mul<f64> for DualVec3 {
    type Output = DualVec3;
    fn mul(self, k: f64) -> DualVec3 {
        DualVec3 {
            re: self.re * k,
            du: self.du * k,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DualVec3Repr {
    re: [f64; 3],
    du: [f64; 3],
}

impl Serialize for DualVec3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DualVec3Repr {
            re: self.re.into(),
            du: self.du.into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualVec3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DualVec3Repr::deserialize(d)?;
        Ok(DualVec3::from_arrays(r.re, r.du))
    }
}

/// A point of the dual unit sphere: `⟨ā,ā⟩ = 1` and `⟨ā,ā*⟩ = 0`.
/// Validated once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitDualVec3(DualVec3);

impl UnitDualVec3 {
    /// Validate `v` against the sphere constraints at `tol`.
    pub fn new(v: DualVec3, tol: f64) -> Result<Self> {
        let residual = sphere_residual(&v);
        if !residual.is_finite() || residual > tol {
            return Err(Error::NotOnDualSphere {
                residual,
                param: None,
            });
        }
        Ok(UnitDualVec3(v))
    }

    pub fn from_arrays(re: [f64; 3], du: [f64; 3]) -> Result<Self> {
        Self::new(DualVec3::from_arrays(re, du), UNIT_SPHERE_TOL)
    }

    pub(crate) fn new_unchecked(v: DualVec3) -> Self {
        UnitDualVec3(v)
    }

    pub fn vec(&self) -> &DualVec3 {
        &self.0
    }

    pub fn into_vec(self) -> DualVec3 {
        self.0
    }

    pub fn re(&self) -> Vector3<f64> {
        self.0.re
    }

    pub fn du(&self) -> Vector3<f64> {
        self.0.du
    }

    pub fn neg(&self) -> UnitDualVec3 {
        UnitDualVec3(-self.0)
    }
}

impl<'de> Deserialize<'de> for UnitDualVec3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = DualVec3::deserialize(d)?;
        UnitDualVec3::new(v, 1e-8).map_err(serde::de::Error::custom)
    }
}

impl From<UnitDualVec3> for DualVec3 {
    fn from(u: UnitDualVec3) -> DualVec3 {
        u.0
    }
}

/// `max(|⟨ā,ā⟩ - 1|, |⟨ā,ā*⟩|)`.
pub fn sphere_residual(v: &DualVec3) -> f64 {
    (v.re.norm_squared() - 1.0).abs().max(v.re.dot(&v.du).abs())
}

/// Dual angle `θ̃ = θ + εθ*` between two unit dual vectors, from
/// `⟨ã,b̃⟩ = cos θ̃`. For the lines the vectors represent, `θ` is the angle
/// between the directions and `θ*` the signed shortest distance: positive
/// when the common perpendicular from `a` to `b`, the direction of `a` and
/// the direction of `b` form a right-handed triple.
pub fn dual_angle(a: &UnitDualVec3, b: &UnitDualVec3) -> Result<DualScalar> {
    dual_angle_with(a, b, &Tolerances::default())
}

pub fn dual_angle_with(a: &UnitDualVec3, b: &UnitDualVec3, tol: &Tolerances) -> Result<DualScalar> {
    a.vec().dot(b.vec()).acos(tol.parallel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn dv(re: [f64; 3], du: [f64; 3]) -> DualVec3 {
        DualVec3::from_arrays(re, du)
    }

    #[test]
    fn dot_examples() {
        let a = dv([1., 0., 0.], [0., 1., 0.]);
        let b = dv([0., 1., 0.], [1., 0., 0.]);
        assert_eq!(a.dot(&b), DualScalar::new(0.0, 2.0));
        let u = dv([0., 0., 1.], [0., -1., 0.]);
        assert_eq!(u.dot(&u), DualScalar::ONE);
        assert_eq!(a.dot(&DualVec3::zero()), DualScalar::ZERO);
    }

    #[test]
    fn cross_examples() {
        let a = dv([1., 0., 0.], [0., 0., 0.]);
        let b = dv([0., 1., 0.], [0., 0., 1.]);
        assert_eq!(a.cross(&b), dv([0., 0., 1.], [0., -1., 0.]));
        assert_eq!(b.cross(&b), DualVec3::zero());
        let c = dv([0., 1., 0.], [0., 0., 0.]);
        assert_eq!(a.cross(&c), dv([0., 0., 1.], [0., 0., 0.]));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(
            dv([3., 0., 0.], [1., 2., 3.]).norm().unwrap(),
            DualScalar::new(3.0, 1.0)
        );
        let u = dv([0., 0., 1.], [0., -1., 0.]);
        assert_eq!(u.norm().unwrap(), DualScalar::ONE);
        assert!(matches!(
            dv([0., 0., 0.], [1., 1., 1.]).norm(),
            Err(Error::ZeroRealPart { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let r = dv([3., 0., 0.], [1., 2., 3.]).normalize().unwrap();
        let expect = dv([1., 0., 0.], [0., 2.0 / 3.0, 1.]);
        assert!((r.re() - expect.re).norm() < 1e-15);
        assert!((r.du() - expect.du).norm() < 1e-15);
        assert!(r.re().dot(&r.du()).abs() < 1e-15);

        let u = dv([0., 0., 1.], [0., -1., 0.]);
        assert_eq!(*u.normalize().unwrap().vec(), u);

        assert!(matches!(
            dv([0., 0., 0.], [0., 0., 1.]).normalize(),
            Err(Error::ZeroRealPart { .. })
        ));
    }

    #[test]
    fn dual_angle_examples() {
        let q = 2.5;
        let z = UnitDualVec3::from_arrays([0., 0., 1.], [0., 0., 0.]).unwrap();
        let l = UnitDualVec3::from_arrays([1., 0., 0.], [0., 0., -q]).unwrap();
        let th = dual_angle(&z, &l).unwrap();
        assert!(th.approx_eq(&DualScalar::new(FRAC_PI_2, q), 1e-15, 1e-15));

        assert!(matches!(
            dual_angle(&z, &z),
            Err(Error::AngleSingularity { .. })
        ));

        let x = UnitDualVec3::from_arrays([1., 0., 0.], [0., 0., 0.]).unwrap();
        assert_eq!(dual_angle(&z, &x).unwrap(), DualScalar::new(FRAC_PI_2, 0.0));
    }

    #[test]
    fn unit_validation() {
        assert!(UnitDualVec3::from_arrays([1., 0., 0.], [1., 0., 0.]).is_err());
        assert!(UnitDualVec3::from_arrays([2., 0., 0.], [0., 0., 0.]).is_err());
    }

    #[test]
    fn serializes_as_arrays() {
        let v = dv([1., 2., 3.], [0., -1., 0.5]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"re":[1.0,2.0,3.0],"du":[0.0,-1.0,0.5]}"#);
        let back: DualVec3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
