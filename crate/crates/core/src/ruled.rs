//! Ruled surfaces `r(s, u) = α(s) + u I(s)` and the dual curves on the
//! dual unit sphere that describe them.

use std::fmt::Write as _;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{DualCurve, TabulatedCurve};
use crate::error::{Error, Result};
use crate::line::{dual_to_line_with, line_to_dual, Line3};
use crate::vector::{sphere_residual, DualVec3, UnitDualVec3};

/// Largest `|‖I‖ − 1|` accepted for a ruling.
pub const RULING_TOL: f64 = 1e-10;
/// Largest dual-sphere residual accepted for an input curve.
pub const SPHERE_TOL: f64 = 1e-8;
/// Lines closer than this (direction and foot point) count as equal when
/// flagging a degenerate patch.
const SAME_LINE_TOL: f64 = 1e-12;

/// Sampled ruled surface: base points `α(s_i)` and unit rulings `I(s_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuledSurfacePatch {
    pub s_grid: Vec<f64>,
    pub base_points: Vec<[f64; 3]>,
    pub rulings: Vec<[f64; 3]>,
    pub u_range: [f64; 2],
}

fn invalid(reason: impl Into<String>) -> Error {
    Error::InvalidPatch { reason: reason.into() }
}

impl RuledSurfacePatch {
    pub fn new(
        s_grid: Vec<f64>,
        base_points: Vec<[f64; 3]>,
        rulings: Vec<[f64; 3]>,
        u_range: [f64; 2],
    ) -> Result<Self> {
        let p = RuledSurfacePatch {
            s_grid,
            base_points,
            rulings,
            u_range,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: RuledSurfacePatch =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("patch JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("patch serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.s_grid.len();
        if n < 2 || self.base_points.len() != n || self.rulings.len() != n {
            return Err(invalid(format!(
                "need >= 2 samples with one base point and ruling each (grid {n}, points {}, rulings {})",
                self.base_points.len(),
                self.rulings.len()
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.s_grid)
            || !finite(&self.u_range)
            || !self.base_points.iter().all(|p| finite(p))
            || !self.rulings.iter().all(|p| finite(p))
        {
            return Err(invalid("non-finite data"));
        }
        if self.s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("s_grid must be strictly increasing"));
        }
        if self.u_range[1] <= self.u_range[0] {
            return Err(invalid("u_range must satisfy a < b"));
        }
        for (i, r) in self.rulings.iter().enumerate() {
            let len = Vector3::from(*r).norm();
            if (len - 1.0).abs() > RULING_TOL {
                return Err(invalid(format!("ruling {i} has length {len}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn line(&self, i: usize) -> Line3 {
        Line3 {
            point: self.base_points[i].into(),
            direction: self.rulings[i].into(),
        }
    }

    /// `α(s_i) + u I(s_i)`.
    pub fn point(&self, i: usize, u: f64) -> Vector3<f64> {
        Vector3::from(self.base_points[i]) + Vector3::from(self.rulings[i]) * u
    }

    /// All samples describe one and the same line.
    pub fn is_degenerate(&self) -> bool {
        let first = self.line(0);
        (1..self.len()).all(|i| {
            let l = self.line(i);
            (l.direction - first.direction).norm() <= SAME_LINE_TOL
                && first.distance_to_point(&l.point) <= SAME_LINE_TOL
        })
    }
}

/// Lines of `c` (a curve on the dual unit sphere) at `s_grid`, each with
/// its foot point from the origin as base point.
pub fn dual_curve_to_ruled(c: &DualCurve, s_grid: &[f64], u_range: (f64, f64)) -> Result<RuledSurfacePatch> {
    let lines = s_grid
        .par_iter()
        .map(|&s| {
            let v = c.eval(s)?;
            let residual = sphere_residual(&v);
            if !(residual <= SPHERE_TOL) {
                return Err(Error::NotOnDualSphere {
                    residual,
                    param: Some(s),
                });
            }
            dual_to_line_with(&v, SPHERE_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    RuledSurfacePatch::new(
        s_grid.to_vec(),
        lines.iter().map(|l| l.point.into()).collect(),
        lines.iter().map(|l| l.direction.into()).collect(),
        [u_range.0, u_range.1],
    )
}

/// `(I(s_i), α(s_i) × I(s_i))` at every sample.
pub fn ruled_to_dual_samples(patch: &RuledSurfacePatch) -> Result<Vec<UnitDualVec3>> {
    patch.validate()?;
    (0..patch.len()).map(|i| line_to_dual(&patch.line(i))).collect()
}

/// The dual curve through [`ruled_to_dual_samples`], interpolated between
/// the grid parameters.
pub fn ruled_to_dual_curve(patch: &RuledSurfacePatch) -> Result<DualCurve> {
    let points: Vec<DualVec3> = ruled_to_dual_samples(patch)?.into_iter().map(Into::into).collect();
    TabulatedCurve::new(patch.s_grid.clone(), points, None)?.into_curve()
}

/// Triangulated OBJ text for a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub obj: String,
    pub vertices: usize,
    pub triangles: usize,
    /// Set when the patch is a single repeated line (zero-area mesh).
    pub degenerate: bool,
}

/// `printf("%.{sig}g")`.
pub fn format_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Quad strip over `s_grid × n_u` uniform `u` samples, two triangles per
/// quad. Vertex `(i, j)` is `α(s_i) + u_j I(s_i)` with 1-based index
/// `i·n_u + j + 1`.
pub fn export_mesh(patch: &RuledSurfacePatch, n_u: usize) -> Result<Mesh> {
    patch.validate()?;
    if n_u < 2 {
        return Err(invalid(format!("n_u must be at least 2, got {n_u}")));
    }
    let n_s = patch.len();
    let [a, b] = patch.u_range;
    let degenerate = patch.is_degenerate();
    let vertices = n_s * n_u;
    let triangles = 2 * (n_s - 1) * (n_u - 1);
    let mut obj = String::with_capacity(vertices * 48 + triangles * 24);
    writeln!(obj, "# ruled surface: {vertices} vertices, {triangles} triangles").unwrap();
    if degenerate {
        writeln!(obj, "# degenerate: every sample is the same line").unwrap();
    }
    for i in 0..n_s {
        for j in 0..n_u {
            let u = a + (b - a) * j as f64 / (n_u - 1) as f64;
            let p = patch.point(i, u);
            writeln!(obj, "v {} {} {}", format_g(p.x, 12), format_g(p.y, 12), format_g(p.z, 12)).unwrap();
        }
    }
    let idx = |i: usize, j: usize| i * n_u + j + 1;
    for i in 0..n_s - 1 {
        for j in 0..n_u - 1 {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            writeln!(obj, "f {v00} {v10} {v11}").unwrap();
            writeln!(obj, "f {v00} {v11} {v01}").unwrap();
        }
    }
    Ok(Mesh {
        obj,
        vertices,
        triangles,
        degenerate,
    })
}
