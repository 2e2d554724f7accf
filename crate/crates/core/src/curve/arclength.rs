use std::sync::Arc;

use super::{uniform_grid, CurveSource, DualCurve};
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::numeric::integrate_dual;
use crate::tolerance::Tolerances;
use crate::vector::DualVec3;

const QUAD_TOL: f64 = 1e-12;
const TABLE_INTERVALS: usize = 256;

/// `ds̃/dt = ‖α̃′(t)‖`.
fn dual_speed(c: &DualCurve, t: f64, tol: &Tolerances) -> Result<DualScalar> {
    let d1 = c.derivative(t, 1)?;
    d1.norm_with(tol).map_err(|_| Error::IrregularCurve {
        t,
        speed: d1.re.norm(),
    })
}

/// `s̃ = ∫ ‖α̃′‖ dt` from `t_start` to `t_end`.
pub fn dual_arc_length(c: &DualCurve, t_start: f64, t_end: f64) -> Result<DualScalar> {
    let tol = Tolerances::default();
    integrate_dual(|t| dual_speed(c, t, &tol), t_start, t_end, QUAD_TOL)
}

/// A curve reparameterized by the real arc length of its indicatrix.
pub struct ArcLengthCurve {
    inner: DualCurve,
    t_nodes: Vec<f64>,
    s_nodes: Vec<DualScalar>,
    tol: Tolerances,
}

impl ArcLengthCurve {
    pub fn length(&self) -> f64 {
        self.s_nodes[self.s_nodes.len() - 1].re
    }

    pub fn inner(&self) -> &DualCurve {
        &self.inner
    }

    fn locate(&self, s: f64) -> usize {
        let k = self.s_nodes.partition_point(|v| v.re <= s);
        k.saturating_sub(1).min(self.t_nodes.len() - 2)
    }

    /// Original parameter `t(s)` together with the dual arc length there.
    fn solve(&self, s: f64) -> Result<(f64, DualScalar)> {
        let k = self.locate(s);
        let (mut lo, mut hi) = (self.t_nodes[k], self.t_nodes[k + 1]);
        let (s_lo, s_hi) = (self.s_nodes[k], self.s_nodes[k + 1]);
        let base = s_lo;
        let mut t = lo + (hi - lo) * (s - s_lo.re) / (s_hi.re - s_lo.re);
        let from_node = |t: f64| -> Result<DualScalar> {
            Ok(base
                + integrate_dual(|x| dual_speed(&self.inner, x, &self.tol), self.t_nodes[k], t, 1e-14)?)
        };
        for _ in 0..60 {
            let st = from_node(t)?;
            let f = st.re - s;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let v = dual_speed(&self.inner, t, &self.tol)?.re;
            let mut next = t - f / v;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
                return Ok((next, from_node(next)?));
            }
            t = next;
        }
        Ok((t, from_node(t)?))
    }

    /// Parameter of the original curve at arc length `s`.
    pub fn parameter_at(&self, s: f64) -> Result<f64> {
        self.solve(s).map(|r| r.0)
    }

    /// The dual arc length `s̃(s) = s + εs*(s)` measured from the start.
    pub fn dual_arc_length_at(&self, s: f64) -> Result<DualScalar> {
        let (_, st) = self.solve(s)?;
        Ok(DualScalar::new(s, st.du))
    }

    fn derivatives(&self, s: f64, order: usize) -> Result<DualVec3> {
        let (t, _) = self.solve(s)?;
        let c = &self.inner;
        if order == 0 {
            return c.eval(t);
        }
        let d1 = c.derivative(t, 1)?;
        let d2 = c.derivative(t, 2)?;
        let v = d1.re.norm();
        let v_t = d1.re.dot(&d2.re) / v;
        // t(s) and its derivatives by the inverse-function rule
        let t1 = 1.0 / v;
        let t2 = -v_t / v.powi(3);
        Ok(match order {
            1 => d1 * t1,
            2 => d2 * (t1 * t1) + d1 * t2,
            _ => {
                let d3 = c.derivative(t, 3)?;
                let v_tt = (d2.re.norm_squared() + d1.re.dot(&d3.re)) / v - v_t * v_t / v;
                let t3 = -v_tt / v.powi(4) + 3.0 * v_t * v_t / v.powi(5);
                d3 * t1.powi(3) + d2 * (3.0 * t1 * t2) + d1 * t3
            }
        })
    }
}

impl CurveSource for ArcLengthCurve {
    fn eval(&self, s: f64) -> Result<DualVec3> {
        self.derivatives(s, 0)
    }

    fn derivative(&self, s: f64, order: usize) -> Option<Result<DualVec3>> {
        Some(self.derivatives(s, order))
    }

    fn has_derivatives(&self) -> bool {
        true
    }
}

/// Reparameterize `c` by the real arc length `s` of its indicatrix. The
/// returned handle evaluates as a curve on `[0, L]` and answers `s̃(s)`.
pub fn reparameterize_by_arclength(c: &DualCurve) -> Result<(DualCurve, Arc<ArcLengthCurve>)> {
    let tol = Tolerances::default();
    let (a, b) = c.domain();
    let t_nodes = uniform_grid(a, b, TABLE_INTERVALS + 1);
    let mut s_nodes = Vec::with_capacity(t_nodes.len());
    let mut acc = DualScalar::ZERO;
    s_nodes.push(acc);
    for w in t_nodes.windows(2) {
        acc += integrate_dual(|t| dual_speed(c, t, &tol), w[0], w[1], 1e-14)?;
        s_nodes.push(acc);
    }
    let arc = Arc::new(ArcLengthCurve {
        inner: c.clone(),
        t_nodes,
        s_nodes,
        tol,
    });
    let curve = DualCurve::new(arc.clone(), (0.0, arc.length()))?;
    Ok((curve, arc))
}
