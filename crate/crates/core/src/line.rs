//! Oriented lines of real 3-space and the E. Study map onto the dual unit
//! sphere, plus a classical real-geometry measure of line pairs.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{sphere_residual, DualVec3, UnitDualVec3};

/// Tolerance on `‖direction‖ = 1`.
pub const DIRECTION_TOL: f64 = 1e-12;

/// An oriented line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line3 {
    #[serde(with = "vec3_array")]
    pub point: Vector3<f64>,
    #[serde(with = "vec3_array")]
    pub direction: Vector3<f64>,
}

impl Line3 {
    /// Build a line, checking that `direction` is a unit vector.
    pub fn new(point: Vector3<f64>, direction: Vector3<f64>) -> Result<Self> {
        let line = Line3 { point, direction };
        line.validate()?;
        Ok(line)
    }

    /// Build a line from any nonzero direction, normalizing it.
    pub fn through(point: Vector3<f64>, direction: Vector3<f64>) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidLine {
                reason: format!("direction {direction:?} cannot be normalized"),
            });
        }
        Line3::new(point, direction / n)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.point.iter().chain(self.direction.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidLine {
                reason: "non-finite coordinates".into(),
            });
        }
        let err = (self.direction.norm() - 1.0).abs();
        if err > DIRECTION_TOL {
            return Err(Error::InvalidLine {
                reason: format!("direction norm deviates from 1 by {err:e}"),
            });
        }
        Ok(())
    }

    pub fn at(&self, u: f64) -> Vector3<f64> {
        self.point + self.direction * u
    }

    /// Euclidean distance from `x` to the line.
    pub fn distance_to_point(&self, x: &Vector3<f64>) -> f64 {
        (x - self.point).cross(&self.direction).norm()
    }
}

/// E. Study map: `(ā, p̄ × ā)`.
pub fn line_to_dual(line: &Line3) -> Result<UnitDualVec3> {
    line.validate()?;
    let v = DualVec3::new(line.direction, line.point.cross(&line.direction));
    Ok(UnitDualVec3::new_unchecked(v))
}

/// Inverse E. Study map. The returned point is the foot of the
/// perpendicular from the origin, `ā × ā*`.
pub fn dual_to_line(v: &DualVec3) -> Result<Line3> {
    dual_to_line_with(v, 1e-8)
}

pub fn dual_to_line_with(v: &DualVec3, tol: f64) -> Result<Line3> {
    let residual = sphere_residual(v);
    if !residual.is_finite() || residual > tol {
        return Err(Error::NotOnDualSphere {
            residual,
            param: None,
        });
    }
    let direction = v.re / v.re.norm();
    Ok(Line3 {
        point: direction.cross(&v.du),
        direction,
    })
}

/// Angle between the directions (in `[0, π]`) and shortest distance
/// between two lines, by real vector geometry only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePairGeometry {
    pub angle: f64,
    pub distance: f64,
}

pub fn line_pair_geometry(a: &Line3, b: &Line3) -> LinePairGeometry {
    let cos = a.direction.dot(&b.direction).clamp(-1.0, 1.0);
    let cross = a.direction.cross(&b.direction);
    let sin = cross.norm();
    let angle = sin.atan2(cos);
    let w = b.point - a.point;
    // common perpendicular for skew lines, point-to-line otherwise
    let distance = if sin > 1e-12 {
        w.dot(&cross).abs() / sin
    } else {
        a.distance_to_point(&b.point)
    };
    LinePairGeometry { angle, distance }
}

pub(crate) mod vec3_array {
    use nalgebra::Vector3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector3<f64>, s: S) -> Result<S::Ok, S::Error> {
        let a: [f64; 3] = (*v).into();
        a.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector3<f64>, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vector3::from(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dual_angle;
    use std::f64::consts::FRAC_PI_2;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    #[test]
    fn study_map_examples() {
        let z = Line3::new(v(0., 0., 0.), v(0., 0., 1.)).unwrap();
        assert_eq!(
            *line_to_dual(&z).unwrap().vec(),
            DualVec3::from_arrays([0., 0., 1.], [0., 0., 0.])
        );

        let l = Line3::new(v(1., 0., 0.), v(0., 0., 1.)).unwrap();
        let expect = DualVec3::from_arrays([0., 0., 1.], [0., -1., 0.]);
        assert_eq!(*line_to_dual(&l).unwrap().vec(), expect);

        let shifted = Line3::new(v(1., 0., 5.), v(0., 0., 1.)).unwrap();
        assert_eq!(*line_to_dual(&shifted).unwrap().vec(), expect);
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let bad = Line3 {
            point: v(0., 0., 0.),
            direction: v(0., 0., 2.),
        };
        assert!(matches!(line_to_dual(&bad), Err(Error::InvalidLine { .. })));
        assert!(Line3::new(v(0., 0., 0.), v(1., 1., 0.)).is_err());
        assert!(Line3::through(v(0., 0., 0.), v(0., 0., 0.)).is_err());
    }

    #[test]
    fn inverse_map_examples() {
        let l = dual_to_line(&DualVec3::from_arrays([0., 0., 1.], [0., -1., 0.])).unwrap();
        assert_eq!(l.point, v(1., 0., 0.));
        assert_eq!(l.direction, v(0., 0., 1.));

        let l = dual_to_line(&DualVec3::from_arrays([0., 0., 1.], [0., 0., 0.])).unwrap();
        assert_eq!(l.point, v(0., 0., 0.));

        assert!(matches!(
            dual_to_line(&DualVec3::from_arrays([1., 0., 0.], [1., 0., 0.])),
            Err(Error::NotOnDualSphere { .. })
        ));
    }

    #[test]
    fn line_pair_examples() {
        let q = 1.75;
        let z = Line3::new(v(0., 0., 0.), v(0., 0., 1.)).unwrap();
        let l = Line3::new(v(0., q, 0.), v(1., 0., 0.)).unwrap();
        let g = line_pair_geometry(&z, &l);
        assert!((g.angle - FRAC_PI_2).abs() < 1e-15);
        assert!((g.distance - q).abs() < 1e-15);

        let g = line_pair_geometry(&l, &l);
        assert_eq!((g.angle, g.distance), (0.0, 0.0));

        let par = Line3::new(v(1., 0., 0.), v(0., 0., 1.)).unwrap();
        let g = line_pair_geometry(&z, &par);
        assert_eq!((g.angle, g.distance), (0.0, 1.0));
    }

    #[test]
    fn dual_angle_matches_common_perpendicular_sign() {
        // perpendicular from z-axis to l runs along +y; (y, z, x) is right-handed
        let q = 0.6;
        let z = line_to_dual(&Line3::new(v(0., 0., 0.), v(0., 0., 1.)).unwrap()).unwrap();
        let l = line_to_dual(&Line3::new(v(0., q, 0.), v(1., 0., 0.)).unwrap()).unwrap();
        let th = dual_angle(&z, &l).unwrap();
        assert!((th.du - q).abs() < 1e-15);
        let l_neg = line_to_dual(&Line3::new(v(0., -q, 0.), v(1., 0., 0.)).unwrap()).unwrap();
        assert!((dual_angle(&z, &l_neg).unwrap().du + q).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let l = Line3::new(v(1., 0., 0.), v(0., 0., 1.)).unwrap();
        assert_eq!(
            serde_json::to_string(&l).unwrap(),
            r#"{"point":[1.0,0.0,0.0],"direction":[0.0,0.0,1.0]}"#
        );
    }
}
