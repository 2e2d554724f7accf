//! Dual-number curve geometry.
//!
//! Lines of real 3-space correspond to unit dual vectors (the E. Study
//! map), so a curve on the dual unit sphere is a one-parameter family of
//! lines, i.e. a ruled surface. This crate provides dual arithmetic, the
//! dual Frenet apparatus of dual space curves, integration of prescribed
//! dual curvature and torsion, dual Mannheim partner curves with numeric
//! checks of their characterizations, and ruled-surface meshing.

pub mod curve;
pub mod dual;
pub mod error;
pub mod line;
pub mod mannheim;
pub mod numeric;
pub mod ruled;
pub mod selftest;
pub mod synthesis;
pub mod tolerance;
pub mod vector;

pub use curve::{DerivativeMode, DualCurve, FrenetData};
pub use dual::DualScalar;
pub use error::{Error, Result};
pub use line::{line_to_dual, dual_to_line, Line3};
pub use tolerance::Tolerances;
pub use vector::{DualVec3, UnitDualVec3};
