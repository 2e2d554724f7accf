//! Dual curves from prescribed dual curvature and torsion: the Frenet
//! system integrated over real arc length with classical RK4, in dual
//! arithmetic throughout.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::curve::{DualCurve, TabulatedCurve};
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::vector::{DualVec3, UnitDualVec3};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Largest tolerated orthonormality defect produced by a single step.
pub const MAX_STEP_DRIFT: f64 = 1e-6;
const FRAME_TOL: f64 = 1e-12;

/// A dual-valued function of real arc length with its first derivative.
pub trait ScalarFn: Send + Sync {
    fn value(&self, s: f64) -> DualScalar;

    fn derivative(&self, s: f64) -> DualScalar {
        let h = 1e-4 * s.abs().max(1.0);
        let f = |x: f64| self.value(x);
        ((f(s - 2.0 * h) - f(s + 2.0 * h)) + (f(s + h) - f(s - h)) * 8.0) * (1.0 / (12.0 * h))
    }
}

impl<F> ScalarFn for F
where
    F: Fn(f64) -> DualScalar + Send + Sync,
{
    fn value(&self, s: f64) -> DualScalar {
        self(s)
    }
}

fn one() -> DualScalar {
    DualScalar::ONE
}

/// Profile expressions accepted in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarProfile {
    Const {
        re: f64,
        #[serde(default)]
        du: f64,
    },
    /// `factor · tan(scale · s + shift)` with dual coefficients.
    Tan {
        #[serde(default = "one")]
        scale: DualScalar,
        #[serde(default)]
        shift: DualScalar,
        #[serde(default = "one")]
        factor: DualScalar,
    },
    /// `Σ re_coeffs[k] sᵏ + ε Σ du_coeffs[k] sᵏ`
    Poly {
        re_coeffs: Vec<f64>,
        #[serde(default)]
        du_coeffs: Vec<f64>,
    },
}

impl ScalarProfile {
    pub fn constant(v: DualScalar) -> Self {
        ScalarProfile::Const { re: v.re, du: v.du }
    }

    pub fn tan() -> Self {
        ScalarProfile::Tan {
            scale: DualScalar::ONE,
            shift: DualScalar::ZERO,
            factor: DualScalar::ONE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ScalarProfile::Const { re, du } => re.is_finite() && du.is_finite(),
            ScalarProfile::Tan { scale, shift, factor } => {
                scale.is_finite() && shift.is_finite() && factor.is_finite()
            }
            ScalarProfile::Poly { re_coeffs, du_coeffs } => {
                re_coeffs.iter().chain(du_coeffs).all(|c| c.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("profile coefficients must be finite".into()))
        }
    }
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * s + v)
}

fn horner_derivative(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, v)| acc * s + v * k as f64)
}

impl ScalarFn for ScalarProfile {
    fn value(&self, s: f64) -> DualScalar {
        match self {
            ScalarProfile::Const { re, du } => DualScalar::new(*re, *du),
            ScalarProfile::Tan { scale, shift, factor } => {
                *factor * (*scale * DualScalar::real(s) + *shift).tan()
            }
            ScalarProfile::Poly { re_coeffs, du_coeffs } => {
                DualScalar::new(horner(re_coeffs, s), horner(du_coeffs, s))
            }
        }
    }

    fn derivative(&self, s: f64) -> DualScalar {
        match self {
            ScalarProfile::Const { .. } => DualScalar::ZERO,
            ScalarProfile::Tan { scale, shift, factor } => {
                let t = (*scale * DualScalar::real(s) + *shift).tan();
                *factor * *scale * (DualScalar::ONE + t * t)
            }
            ScalarProfile::Poly { re_coeffs, du_coeffs } => DualScalar::new(
                horner_derivative(re_coeffs, s),
                horner_derivative(du_coeffs, s),
            ),
        }
    }
}

/// Prescribed dual curvature and torsion plus initial conditions.
#[derive(Clone)]
pub struct FrenetProfile {
    pub kappa: Arc<dyn ScalarFn>,
    pub tau: Arc<dyn ScalarFn>,
    pub s_range: (f64, f64),
    pub initial_point: DualVec3,
    pub initial_frame: [UnitDualVec3; 3],
}

impl fmt::Debug for FrenetProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrenetProfile")
            .field("s_range", &self.s_range)
            .field("initial_point", &self.initial_point)
            .field("initial_frame", &self.initial_frame)
            .finish_non_exhaustive()
    }
}

pub fn identity_frame() -> [UnitDualVec3; 3] {
    let e = |i: usize| {
        let mut v = Vector3::zeros();
        v[i] = 1.0;
        UnitDualVec3::new_unchecked(DualVec3::real(v))
    };
    [e(0), e(1), e(2)]
}

fn frame_defect(t: &DualVec3, n: &DualVec3, b: &DualVec3) -> f64 {
    let pairs = [
        (t.dot(t) - DualScalar::ONE),
        (n.dot(n) - DualScalar::ONE),
        (b.dot(b) - DualScalar::ONE),
        t.dot(n),
        t.dot(b),
        n.dot(b),
    ];
    let (r, d) = (t.cross(n) - *b).part_norms();
    pairs
        .iter()
        .map(|v| v.re.abs().max(v.du.abs()))
        .fold(r.max(d), f64::max)
}

impl FrenetProfile {
    pub fn new(
        kappa: Arc<dyn ScalarFn>,
        tau: Arc<dyn ScalarFn>,
        s_range: (f64, f64),
    ) -> Result<Self> {
        FrenetProfile::with_initial(kappa, tau, s_range, DualVec3::zero(), identity_frame())
    }

    pub fn with_initial(
        kappa: Arc<dyn ScalarFn>,
        tau: Arc<dyn ScalarFn>,
        s_range: (f64, f64),
        initial_point: DualVec3,
        initial_frame: [UnitDualVec3; 3],
    ) -> Result<Self> {
        if !(s_range.0.is_finite() && s_range.1.is_finite() && s_range.0 < s_range.1) {
            return Err(Error::InvalidInput(format!("bad arc-length range {s_range:?}")));
        }
        if !initial_point.is_finite() {
            return Err(Error::InvalidInput("initial point must be finite".into()));
        }
        let [t, n, b] = initial_frame.map(|u| u.into_vec());
        let defect = frame_defect(&t, &n, &b);
        if !(defect <= FRAME_TOL) {
            return Err(Error::InvalidInput(format!(
                "initial frame is not a right-handed dual-orthonormal triple (defect {defect:e})"
            )));
        }
        Ok(FrenetProfile {
            kappa,
            tau,
            s_range,
            initial_point,
            initial_frame,
        })
    }
}

/// `{"kappa": .., "tau": .., "s_range": [a, b], "step": h}` with optional
/// `initial_point` and `initial_frame` (`[t, n, b]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kappa: ScalarProfile,
    pub tau: ScalarProfile,
    pub s_range: [f64; 2],
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_point: Option<DualVec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_frame: Option<[UnitDualVec3; 3]>,
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

impl ProfileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("profile JSON: {e}")))
    }

    pub fn profile(&self) -> Result<FrenetProfile> {
        self.kappa.validate()?;
        self.tau.validate()?;
        FrenetProfile::with_initial(
            Arc::new(self.kappa.clone()),
            Arc::new(self.tau.clone()),
            (self.s_range[0], self.s_range[1]),
            self.initial_point.unwrap_or_else(DualVec3::zero),
            self.initial_frame.unwrap_or_else(identity_frame),
        )
    }
}

#[derive(Clone, Copy)]
struct State {
    x: DualVec3,
    t: DualVec3,
    n: DualVec3,
    b: DualVec3,
}

impl State {
    fn axpy(&self, h: f64, d: &State) -> State {
        State {
            x: self.x + d.x * h,
            t: self.t + d.t * h,
            n: self.n + d.n * h,
            b: self.b + d.b * h,
        }
    }
}

fn rhs(p: &FrenetProfile, s: f64, y: &State) -> Result<State> {
    let k = p.kappa.value(s);
    let tau = p.tau.value(s);
    if !(k.re > 0.0) || !k.is_finite() {
        return Err(Error::ProfileSingularity { s, kappa: k.re });
    }
    let tau = tau.ensure_finite("torsion profile")?;
    Ok(State {
        x: y.t,
        t: y.n.scale(k),
        n: y.b.scale(tau) - y.t.scale(k),
        b: -y.n.scale(tau),
    })
}

fn reorthonormalize(y: &mut State) -> Result<()> {
    let t = y.t.scale(y.t.norm()?.recip()?);
    let n = y.n - t.scale(y.n.dot(&t));
    let n = n.scale(n.norm()?.recip()?);
    y.b = t.cross(&n);
    y.t = t;
    y.n = n;
    Ok(())
}

/// Integrate and return the node table: position, unit tangent and
/// `κ̃ñ` at each step.
pub fn integrate_frenet_table(p: &FrenetProfile, step: f64) -> Result<TabulatedCurve> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    let (a, b) = p.s_range;
    let n_steps = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n_steps as f64;
    let [t0, n0, b0] = p.initial_frame.map(|u| u.into_vec());
    let mut y = State {
        x: p.initial_point,
        t: t0,
        n: n0,
        b: b0,
    };
    let mut nodes = Vec::with_capacity(n_steps + 1);
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut tangents = Vec::with_capacity(n_steps + 1);
    let mut accelerations = Vec::with_capacity(n_steps + 1);
    nodes.push(a);
    points.push(y.x);
    tangents.push(y.t);
    accelerations.push(rhs(p, a, &y)?.t);
    for i in 0..n_steps {
        let s = a + h * i as f64;
        let k1 = rhs(p, s, &y)?;
        let k2 = rhs(p, s + 0.5 * h, &y.axpy(0.5 * h, &k1))?;
        let k3 = rhs(p, s + 0.5 * h, &y.axpy(0.5 * h, &k2))?;
        let k4 = rhs(p, s + h, &y.axpy(h, &k3))?;
        let mut next = y;
        for (k, w) in [(k1, 1.0), (k2, 2.0), (k3, 2.0), (k4, 1.0)] {
            next = next.axpy(h * w / 6.0, &k);
        }
        let drift = frame_defect(&next.t, &next.n, &next.b);
        let s_next = if i + 1 == n_steps { b } else { a + h * (i + 1) as f64 };
        if !(drift <= MAX_STEP_DRIFT) {
            return Err(Error::StepTooLarge { s: s_next, drift });
        }
        reorthonormalize(&mut next)?;
        y = next;
        nodes.push(s_next);
        points.push(y.x);
        tangents.push(y.t);
        accelerations.push(rhs(p, s_next, &y)?.t);
    }
    TabulatedCurve::new(nodes, points, Some(tangents))?.with_second_derivatives(accelerations)
}

/// Integrate the Frenet system and return the resulting unit-speed curve.
pub fn integrate_frenet(p: &FrenetProfile, step: f64) -> Result<DualCurve> {
    integrate_frenet_table(p, step)?.into_curve()
}
