//! Dual space curves `α̃(t) = α(t) + εα*(t)`.
//!
//! A [`DualCurve`] wraps a [`CurveSource`] together with its parameter
//! domain. Sources that know their own derivatives (catalog expressions,
//! tabulated samples, arc-length reparameterizations) are used directly;
//! anything else is differentiated with five-point central differences.

mod arclength;
mod catalog;
mod classify;
mod frenet;
mod tabulated;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::central_difference;
use crate::vector::DualVec3;

pub use arclength::{dual_arc_length, reparameterize_by_arclength, ArcLengthCurve};
pub use catalog::{CurveSpec, Expr};
pub use classify::{
    classify_planar, classify_straight_line, DualLine, PlanarClassification,
    StraightLineClassification,
};
pub(crate) use classify::dual_normal_to;
pub use frenet::{frenet, frenet_equation_residual, frenet_with, FrenetData, FrenetResidual};
pub use tabulated::TabulatedCurve;

/// Something that can be evaluated as a dual space curve.
pub trait CurveSource: Send + Sync {
    fn eval(&self, t: f64) -> Result<DualVec3>;

    /// Derivative of order 1..=3 when the source can supply it itself.
    /// `None` falls back to finite differences of [`eval`](Self::eval).
    fn derivative(&self, _t: f64, _order: usize) -> Option<Result<DualVec3>> {
        None
    }

    fn has_derivatives(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Immutable dual curve over a closed parameter interval.
#[derive(Clone)]
pub struct DualCurve {
    domain: (f64, f64),
    source: Arc<dyn CurveSource>,
    mode: DerivativeMode,
}

impl fmt::Debug for DualCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DualCurve")
            .field("domain", &self.domain)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

struct FnSource<F>(F);

impl<F> CurveSource for FnSource<F>
where
    F: Fn(f64) -> DualVec3 + Send + Sync,
{
    fn eval(&self, t: f64) -> Result<DualVec3> {
        let v = (self.0)(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericBreakdown { op: "curve eval" })
        }
    }
}

impl DualCurve {
    pub fn new(source: Arc<dyn CurveSource>, domain: (f64, f64)) -> Result<Self> {
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(Error::InvalidInput(format!(
                "curve domain {domain:?} is not a proper interval"
            )));
        }
        let mode = if source.has_derivatives() {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::FiniteDifference
        };
        Ok(DualCurve {
            domain,
            source,
            mode,
        })
    }

    /// Curve from a closure; derivatives by finite differences.
    pub fn from_fn<F>(domain: (f64, f64), f: F) -> Result<Self>
    where
        F: Fn(f64) -> DualVec3 + Send + Sync + 'static,
    {
        DualCurve::new(Arc::new(FnSource(f)), domain)
    }

    /// Same curve, but differentiated numerically even if the source has
    /// exact derivatives.
    pub fn with_finite_differences(&self) -> Self {
        DualCurve {
            mode: DerivativeMode::FiniteDifference,
            ..self.clone()
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn source(&self) -> &Arc<dyn CurveSource> {
        &self.source
    }

    pub fn eval(&self, t: f64) -> Result<DualVec3> {
        self.source.eval(t)
    }

    /// `d^order α̃ / dt^order` for `order` in 0..=3.
    pub fn derivative(&self, t: f64, order: usize) -> Result<DualVec3> {
        if order == 0 {
            return self.eval(t);
        }
        if order > 3 {
            return Err(Error::InvalidInput(format!(
                "derivative order {order} not supported"
            )));
        }
        if self.mode == DerivativeMode::Analytic {
            if let Some(d) = self.source.derivative(t, order) {
                return d;
            }
        }
        // third differences lose three digits per decade of h; use a wider step
        let scale = if order == 3 { 1e-3 } else { 1e-4 };
        let h = scale * t.abs().max(1.0);
        let d = central_difference(|x| self.eval(x), t, h, order)?;
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NumericBreakdown { op: "finite difference" })
        }
    }

    /// Value and first three derivatives at `t`.
    pub fn jet(&self, t: f64) -> Result<[DualVec3; 4]> {
        Ok([
            self.eval(t)?,
            self.derivative(t, 1)?,
            self.derivative(t, 2)?,
            self.derivative(t, 3)?,
        ])
    }

    /// `n` uniformly spaced parameters covering the domain, endpoints included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        uniform_grid(self.domain.0, self.domain.1, n)
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
