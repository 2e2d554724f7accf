use super::{MannheimPair, PairOptions, PairSample, Residuals, TheoremReport};
use crate::curve::{classify_straight_line, frenet_with, uniform_grid, DualCurve};
use crate::dual::DualScalar;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

use nalgebra::Vector3;

/// Outcome of [`pair_check`]: the validated pair when every check passes,
/// and the report either way.
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub pair: Option<MannheimPair>,
    pub report: TheoremReport,
}

const MIN_MATCHED: usize = 8;
const ROOT_TOL: f64 = 1e-14;

/// `g(u) = ⟨p − α₁(u), α₁′(u)⟩` with its `u`-derivative, real parts only.
fn foot_function(c1: &DualCurve, p: &Vector3<f64>, u: f64) -> Result<(f64, f64)> {
    let q = c1.eval(u)?.re;
    let d1 = c1.derivative(u, 1)?.re;
    let d2 = c1.derivative(u, 2)?.re;
    let g = (p - q).dot(&d1);
    let gu = -d1.norm_squared() + (p - q).dot(&d2);
    Ok((g, gu))
}

/// Root of `g` in `[a, b]` given opposite signs at the ends (Illinois).
fn refine_foot(c1: &DualCurve, p: &Vector3<f64>, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= ROOT_TOL * a.abs().max(1.0) {
            break;
        }
        let m = (a * gb - b * ga) / (gb - ga);
        let m = if m.is_finite() && m > a.min(b) && m < a.max(b) { m } else { 0.5 * (a + b) };
        let (gm, _) = foot_function(c1, p, m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == gb.signum() {
            b = m;
            gb = gm;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = m;
            ga = gm;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if ga.abs() < gb.abs() { a } else { b })
}

/// Foot of the perpendicular from `p` to `c1` near `guess`, by Newton.
pub(crate) fn local_foot(c1: &DualCurve, p: &Vector3<f64>, guess: f64) -> Result<f64> {
    let (lo, hi) = c1.domain();
    let mut u = guess;
    for _ in 0..50 {
        let (g, gu) = foot_function(c1, p, u)?;
        let du = g / gu;
        if !du.is_finite() {
            break;
        }
        u = (u - du).clamp(lo, hi);
        if du.abs() <= ROOT_TOL * u.abs().max(1.0) {
            break;
        }
    }
    Ok(u)
}

/// Correspondence sample on the coarse scan of `c1`.
struct Scan {
    u: Vec<f64>,
    p: Vec<Vector3<f64>>,
    d: Vec<Vector3<f64>>,
}

impl Scan {
    fn new(c1: &DualCurve, n: usize) -> Result<Self> {
        let (a, b) = c1.domain();
        let u = uniform_grid(a, b, n);
        let p = u.iter().map(|&x| c1.eval(x).map(|v| v.re)).collect::<Result<_>>()?;
        let d = u.iter().map(|&x| c1.derivative(x, 1).map(|v| v.re)).collect::<Result<_>>()?;
        Ok(Scan { u, p, d })
    }

    /// Nearest perpendicular foot of `p` on `c1`, if any.
    fn foot(&self, c1: &DualCurve, p: &Vector3<f64>) -> Result<Option<f64>> {
        let g: Vec<f64> = (0..self.u.len()).map(|j| (p - self.p[j]).dot(&self.d[j])).collect();
        let mut best: Option<(f64, usize)> = None;
        for j in 0..g.len() - 1 {
            if g[j] == 0.0 || g[j].signum() != g[j + 1].signum() {
                let dist = (p - self.p[j]).norm().min((p - self.p[j + 1]).norm());
                if best.is_none_or(|(d, _)| dist < d) {
                    best = Some((dist, j));
                }
            }
        }
        let Some((_, j)) = best else {
            return Ok(None);
        };
        if g[j] == 0.0 {
            return Ok(Some(self.u[j]));
        }
        refine_foot(c1, p, self.u[j], self.u[j + 1], g[j], g[j + 1]).map(Some)
    }
}

/// Build the correspondence `C̃ → C̃₁` by perpendicular projection and test
/// that the principal normal of `c` is parallel to the binormal of `c1`.
pub fn pair_check(c: &DualCurve, c1: &DualCurve, options: &PairOptions) -> Result<PairCheck> {
    let tol = &options.tol;
    let n = options.samples.max(MIN_MATCHED);
    if classify_straight_line(c1, tol)?.is_line {
        return Err(Error::NoCorrespondence {
            reason: "partner is a straight line, so its binormal line is not defined".into(),
        });
    }
    let scan = Scan::new(c1, options.scan_factor.max(1) * n + 1)?;
    let (a, b) = c.domain();
    let h = (b - a) / n as f64;

    let mut samples = Vec::with_capacity(n);
    let mut excluded = 0usize;
    for i in 0..n {
        let t = a + (i as f64 + 0.5) * h;
        let point = c.eval(t)?;
        let Some(t1) = scan.foot(c1, &point.re)? else {
            excluded += 1;
            continue;
        };
        let (frame, frame1) = match (frenet_with(c, t, tol), frenet_with(c1, t1, tol)) {
            (Ok(f), Ok(f1)) => (f, f1),
            _ => {
                excluded += 1;
                continue;
            }
        };
        if frame.kappa.re < options.min_curvature || frame1.kappa.re < options.min_curvature {
            excluded += 1;
            continue;
        }
        let point1 = c1.eval(t1)?;
        // implicit differentiation of ⟨α(t) − α₁(t₁), α₁′(t₁)⟩ = 0
        let (_, gu) = foot_function(c1, &point.re, t1)?;
        let gt = c.derivative(t, 1)?.re.dot(&c1.derivative(t1, 1)?.re);
        let dt1_dt = -gt / gu;
        let ds1_ds = (frame1.speed * dt1_dt).div(frame.speed)?;
        let (tv, t1v, n1v) = (frame.t_vec.vec(), frame1.t_vec.vec(), frame1.n_vec.vec());
        let theta = DualScalar::angle_from_cos_sin(tv.dot(t1v), tv.dot(n1v))?;
        samples.push(PairSample {
            t,
            t1,
            point,
            point1,
            frame,
            frame1,
            theta,
            mu: None,
            dt1_dt,
            ds1_ds,
        });
    }
    if samples.len() < MIN_MATCHED {
        return Err(Error::NoCorrespondence {
            reason: format!(
                "only {} of {n} samples have a usable corresponding point",
                samples.len()
            ),
        });
    }
    if samples.windows(2).any(|w| w[1].t1 <= w[0].t1) {
        return Err(Error::NoCorrespondence {
            reason: "projection onto the partner is not strictly increasing".into(),
        });
    }

    let sigma = if samples[0].frame.n_vec.re().dot(&samples[0].frame1.b_vec.re()) < 0.0 {
        -1.0
    } else {
        1.0
    };
    let mut parallel = Residuals::default();
    let mut perpendicular = Residuals::default();
    let mut along = Residuals::default();
    let mut lambda_sum = DualScalar::ZERO;
    for s in &samples {
        let (nv, b1) = (s.frame.n_vec.vec(), s.frame1.b_vec.vec());
        let gap = s.point - s.point1;
        parallel.push_vec(&nv.cross(b1));
        perpendicular.push(gap.dot(s.frame1.t_vec.vec()));
        along.push_vec(&gap.cross(b1));
        lambda_sum += gap.dot(b1);
    }
    let lambda = lambda_sum * (1.0 / samples.len() as f64);
    for s in samples.iter_mut() {
        if s.theta.sin().re.abs() > tol.parallel {
            let (sin, cos) = s.theta.sin_cos();
            s.mu = cos.div(sin).ok().map(|cot| lambda * cot);
        }
    }

    let mut report = TheoremReport {
        checks: vec![
            parallel.check("normal_binormal_parallel", tol.pair),
            perpendicular.check("correspondence_perpendicular", tol.pair),
            along.check("offset_along_binormal", tol.pair),
        ],
        ..Default::default()
    };
    let pair = MannheimPair {
        curve_c: c.clone(),
        curve_c1: c1.clone(),
        lambda,
        sigma,
        samples,
        excluded,
        options: *options,
    };
    report.pair = Some(pair.summary());
    if report.pass() && lambda.re.abs() <= tol.zero {
        // normals match but the curves coincide in real space
        return Err(Error::PureDualLambda { lambda });
    }
    Ok(PairCheck {
        pair: report.pass().then_some(pair),
        report,
    })
}

const CONDITION_SAMPLES: usize = 256;

fn nonzero_lambda(lambda: DualScalar) -> Result<()> {
    if lambda.is_pure_dual() {
        Err(Error::PureDualLambda { lambda })
    } else {
        Ok(())
    }
}

/// Residual of `κ̃ − λ̃(κ̃² + τ̃²)` over a grid of `c`.
pub fn check_mannheim_condition(c: &DualCurve, lambda: DualScalar, tol: &Tolerances) -> Result<TheoremReport> {
    nonzero_lambda(lambda)?;
    let mut r = Residuals::default();
    for t in c.grid(CONDITION_SAMPLES) {
        let f = frenet_with(c, t, tol)?;
        r.push(f.kappa - lambda * (f.kappa.square() + f.tau.square()));
    }
    Ok(TheoremReport {
        checks: vec![r.check("mannheim_condition", tol.theorem)],
        ..Default::default()
    })
}

const ODE_STEP: f64 = 1e-3;

/// Residual of `τ̃₁′ − (κ̃₁/λ̃)(1 + λ̃²τ̃₁²)` over a grid of `c1`, the
/// derivative taken numerically along the curve.
pub fn check_partner_ode(c1: &DualCurve, lambda: DualScalar, tol: &Tolerances) -> Result<TheoremReport> {
    nonzero_lambda(lambda)?;
    let (a, b) = c1.domain();
    let h = ODE_STEP.min((b - a) / 8.0);
    let mut r = Residuals::default();
    for t in uniform_grid(a + 2.0 * h, b - 2.0 * h, CONDITION_SAMPLES) {
        let f = frenet_with(c1, t, tol)?;
        let tau = |x: f64| frenet_with(c1, x, tol).map(|g| g.tau);
        let (m2, m1, p1, p2) = (tau(t - 2.0 * h)?, tau(t - h)?, tau(t + h)?, tau(t + 2.0 * h)?);
        let dtau_dt = (m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * h));
        let dtau = dtau_dt.div(f.speed)?;
        let rhs = f.kappa.div(lambda)? * (DualScalar::ONE + lambda.square() * f.tau.square());
        r.push(dtau - rhs);
    }
    Ok(TheoremReport {
        checks: vec![r.check("partner_ode", tol.ode)],
        ..Default::default()
    })
}
