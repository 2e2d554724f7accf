use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{pair_check, MannheimPair, PairOptions};
use crate::curve::{
    classify_straight_line, dual_normal_to, frenet_with, reparameterize_by_arclength, DualCurve,
    TabulatedCurve,
};
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::numeric::fd_weights;
use crate::synthesis::{integrate_frenet_table, FrenetProfile, ScalarFn, ScalarProfile, DEFAULT_STEP};
use crate::tolerance::Tolerances;
use crate::vector::{DualVec3, UnitDualVec3};

/// Node count used when an offset curve is tabulated over a generic curve.
pub const OFFSET_NODES: usize = 2001;

fn check_lambda(lambda: DualScalar) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("offset constant {lambda} is not finite")));
    }
    if lambda.is_pure_dual() {
        return Err(Error::PureDualLambda { lambda });
    }
    Ok(())
}

/// `d/du` of curvature and torsion at `u` by a five-point stencil kept
/// inside the domain.
fn frame_rates(c: &DualCurve, u: f64, tol: &Tolerances) -> Result<(DualScalar, DualScalar)> {
    let (a, b) = c.domain();
    let h = RATE_STEP.min((b - a) / 8.0);
    let centre = u.clamp(a + 2.0 * h, b - 2.0 * h);
    let xs: Vec<f64> = (-2..=2).map(|k| centre + k as f64 * h).collect();
    let w = fd_weights(u, &xs, 1);
    let (mut dk, mut dt) = (DualScalar::ZERO, DualScalar::ZERO);
    for (x, wk) in xs.iter().zip(&w[1]) {
        let f = frenet_with(c, *x, tol)?;
        dk += f.kappa * *wk;
        dt += f.tau * *wk;
    }
    Ok((dk, dt))
}

const RATE_STEP: f64 = 1e-2;

/// Tabulate an offset given, per node, its position and first two derivatives.
fn offset_curve<F>(nodes: &[f64], f: F) -> Result<DualCurve>
where
    F: Fn(f64) -> Result<[DualVec3; 3]>,
{
    let mut levels: [Vec<DualVec3>; 3] = Default::default();
    for &u in nodes {
        for (level, v) in levels.iter_mut().zip(f(u)?) {
            level.push(v);
        }
    }
    let [points, tangents, acc] = levels;
    let tab = TabulatedCurve::new(nodes.to_vec(), points, Some(tangents))?.with_second_derivatives(acc)?;
    let (curve, _) = reparameterize_by_arclength(&tab.into_curve()?)?;
    Ok(curve)
}

/// Rate of the dual speed, `⟨α̃′, α̃″⟩ / ṡ`.
fn speed_rate(c: &DualCurve, u: f64, speed: DualScalar) -> Result<DualScalar> {
    c.derivative(u, 1)?.dot(&c.derivative(u, 2)?).div(speed)
}

/// `α̃₁ + λ̃b̃₁`, reparameterized by its own real arc length.
pub fn mannheim_from_partner(c1: &DualCurve, lambda: DualScalar) -> Result<DualCurve> {
    mannheim_from_partner_on(c1, lambda, &c1.grid(OFFSET_NODES))
}

/// As [`mannheim_from_partner`], tabulating the offset at `nodes` of `c1`.
pub fn mannheim_from_partner_on(c1: &DualCurve, lambda: DualScalar, nodes: &[f64]) -> Result<DualCurve> {
    let tol = Tolerances::default();
    offset_along_binormal(c1, lambda, nodes, |u| Ok(frame_rates(c1, u, &tol)?.1))
}

/// `dtau(u)` supplies `dτ̃₁/du`; a closed form avoids differentiating
/// numerical torsion, whose noise would otherwise be differentiated again.
fn offset_along_binormal<D>(c1: &DualCurve, lambda: DualScalar, nodes: &[f64], dtau: D) -> Result<DualCurve>
where
    D: Fn(f64) -> Result<DualScalar>,
{
    check_lambda(lambda)?;
    let tol = Tolerances::default();
    offset_curve(nodes, |u| {
        let f = frenet_with(c1, u, &tol)?;
        let (t1, n1, b1) = (*f.t_vec.vec(), *f.n_vec.vec(), *f.b_vec.vec());
        let v = f.speed;
        // α̃′ = ṡ₁ w̃ with w̃ = t̃₁ − λ̃τ̃₁ñ₁
        let w = t1 - n1.scale(lambda * f.tau);
        let dw = n1.scale(v * f.kappa) - n1.scale(lambda * dtau(u)?)
            - (b1.scale(f.tau) - t1.scale(f.kappa)).scale(lambda * f.tau * v);
        Ok([
            c1.eval(u)? + b1.scale(lambda),
            w.scale(v),
            w.scale(speed_rate(c1, u, v)?) + dw.scale(v),
        ])
    })
}

/// `α̃ − λ̃ñ`, reparameterized by its own real arc length.
pub fn partner_from_mannheim(c: &DualCurve, lambda: DualScalar) -> Result<DualCurve> {
    partner_from_mannheim_on(c, lambda, &c.grid(OFFSET_NODES))
}

pub fn partner_from_mannheim_on(c: &DualCurve, lambda: DualScalar, nodes: &[f64]) -> Result<DualCurve> {
    check_lambda(lambda)?;
    let tol = Tolerances::default();
    let mut max_speed = 0.0f64;
    for &u in nodes {
        let f = frenet_with(c, u, &tol)?;
        let d = f.t_vec.vec().scale(DualScalar::ONE + lambda * f.kappa) - f.b_vec.vec().scale(lambda * f.tau);
        max_speed = max_speed.max((d.scale(f.speed)).re.norm());
    }
    if !(max_speed > tol.zero) {
        return Err(Error::DegeneratePartner { max_speed });
    }
    offset_curve(nodes, |u| {
        let f = frenet_with(c, u, &tol)?;
        let (t, n, b) = (*f.t_vec.vec(), *f.n_vec.vec(), *f.b_vec.vec());
        let (dkappa, dtau) = frame_rates(c, u, &tol)?;
        let v = f.speed;
        let l = lambda;
        // α̃′ = ṡ w̃ with w̃ = (1 + λ̃κ̃)t̃ − λ̃τ̃b̃
        let w = t.scale(DualScalar::ONE + l * f.kappa) - b.scale(l * f.tau);
        let dw = t.scale(l * dkappa)
            + n.scale(v * ((DualScalar::ONE + l * f.kappa) * f.kappa + l * f.tau.square()))
            - b.scale(l * dtau);
        Ok([
            c.eval(u)? - n.scale(lambda),
            w.scale(v),
            w.scale(speed_rate(c, u, v)?) + dw.scale(v),
        ])
    })
}

/// Partner of a straight line `C̃`: its frame is not unique, so a constant
/// normal is chosen (any unit dual vector dual-orthogonal to the line when
/// `normal` is `None`) and the partner is `α̃ − λ̃ñ`.
pub fn partner_of_straight_line(
    c: &DualCurve,
    lambda: DualScalar,
    normal: Option<UnitDualVec3>,
    tol: &Tolerances,
) -> Result<DualCurve> {
    check_lambda(lambda)?;
    let class = classify_straight_line(c, tol)?;
    let line = class
        .line
        .ok_or_else(|| Error::InvalidInput("curve is not a straight line".into()))?;
    let n = match normal {
        Some(n) => {
            let d = n.vec().dot(line.direction.vec());
            if d.re.abs() > 1e-10 || d.du.abs() > 1e-10 {
                return Err(Error::InvalidInput("normal is not orthogonal to the line".into()));
            }
            n
        }
        None => dual_normal_to(&line.direction),
    };
    let offset = n.vec().scale(lambda);
    let inner = c.clone();
    DualCurve::from_fn(c.domain(), move |t| match inner.eval(t) {
        Ok(p) => p - offset,
        Err(_) => DualVec3::new(
            nalgebra::Vector3::repeat(f64::NAN),
            nalgebra::Vector3::repeat(f64::NAN),
        ),
    })
}

struct MannheimCurvature {
    lambda: DualScalar,
    tau: Arc<dyn ScalarFn>,
}

impl ScalarFn for MannheimCurvature {
    fn value(&self, s: f64) -> DualScalar {
        let tau = self.tau.value(s);
        let l = self.lambda;
        (l * self.tau.derivative(s))
            .div(DualScalar::ONE + l * l * tau * tau)
            .unwrap_or(DualScalar::new(f64::NAN, f64::NAN))
    }
}

/// Curvature `λ̃τ̃₁′/(1 + λ̃²τ̃₁²)` that makes `τ̃₁` the torsion of a
/// Mannheim partner curve with offset `λ̃`.
pub fn mannheim_curvature(lambda: DualScalar, tau: Arc<dyn ScalarFn>) -> Arc<dyn ScalarFn> {
    Arc::new(MannheimCurvature { lambda, tau })
}

/// Synthesize `C̃₁` from `τ̃₁` and `λ̃`, offset it to `C̃`, and validate.
pub fn generate_pair(
    lambda: DualScalar,
    tau1: Arc<dyn ScalarFn>,
    s_range: (f64, f64),
    step: f64,
    options: &PairOptions,
) -> Result<MannheimPair> {
    check_lambda(lambda)?;
    let kappa1 = mannheim_curvature(lambda, tau1.clone());
    let profile = FrenetProfile::new(kappa1, tau1.clone(), s_range)?;
    let tab = integrate_frenet_table(&profile, step)?;
    let nodes = tab.nodes().to_vec();
    let c1 = tab.into_curve()?;
    // the synthesized curve has unit dual speed, so d/du = d/ds̃₁
    let c = offset_along_binormal(&c1, lambda, &nodes, |u| Ok(tau1.derivative(u)))?;
    let check = pair_check(&c, &c1, options)?;
    match check.pair {
        Some(pair) => Ok(pair),
        None => Err(Error::PairValidationFailed {
            failed: check.report.failed(),
        }),
    }
}

/// `{"lambda": {"re", "du"}, "tau": <scalar-expr>, "s_range": [a, b],
/// "step": h}` describing a pair to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub lambda: DualScalar,
    #[serde(alias = "tau1")]
    pub tau: ScalarProfile,
    pub s_range: [f64; 2],
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

impl PairSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("pair JSON: {e}")))
    }

    pub fn generate(&self, options: &PairOptions) -> Result<MannheimPair> {
        self.tau.validate()?;
        generate_pair(
            self.lambda,
            Arc::new(self.tau.clone()),
            (self.s_range[0], self.s_range[1]),
            self.step,
            options,
        )
    }
}
