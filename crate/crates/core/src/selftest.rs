//! The acceptance suite as a library, shared by the `selftest` command and
//! the integration tests. Each criterion returns a pass flag and a one-line
//! summary of the numbers it measured.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{
    classify_planar, classify_straight_line, frenet_equation_residual, frenet_with, uniform_grid, CurveSpec,
    DualCurve, Expr,
};
use crate::dual::DualScalar;
use crate::error::Result;
use crate::line::{dual_to_line, line_to_dual, Line3};
use crate::mannheim::{check_mannheim_condition, generate_pair, verify_theorems, PairOptions};
use crate::ruled::{dual_curve_to_ruled, export_mesh, ruled_to_dual_samples};
use crate::synthesis::{integrate_frenet, FrenetProfile, ScalarFn, ScalarProfile};
use crate::tolerance::Tolerances;
use crate::vector::{dual_angle, sphere_residual};

pub const CRITERIA: usize = 11;
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Multiplies every upper-bound threshold.
    pub tol_scale: f64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: DEFAULT_SEED,
            tol_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

const TITLES: [&str; CRITERIA] = [
    "dual algebra axioms",
    "line <-> dual vector round trip",
    "dual angle vs common perpendicular",
    "Frenet apparatus of catalog curves",
    "curve synthesis round trip and order",
    "Mannheim pair end to end",
    "Mannheim condition and its sensitivity",
    "squared vs first-power curvature identity",
    "non-constancy of torsion product and osculating ratio",
    "straight line and plane classifiers",
    "ruled surface mesh and round trip",
];

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionOutcome> {
    (1..=CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}

/// Run criterion `id` (1-based). Internal errors count as failures.
pub fn run_criterion(id: usize, cfg: &SelftestConfig) -> CriterionOutcome {
    assert!((1..=CRITERIA).contains(&id), "criterion {id} does not exist");
    let k = cfg.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(id as u64));
    let result = match id {
        1 => algebra(&mut rng, k),
        2 => study_round_trip(&mut rng, k),
        3 => angle_oracle(&mut rng, k),
        4 => frenet_catalog(k),
        5 => synthesis(k),
        6 => mannheim_pairs(k),
        7 => condition(k),
        8 => curvature_identity(k),
        9 => non_constancy(),
        10 => classifiers(k),
        _ => ruled(k),
    };
    let (pass, detail) = match result {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id,
        title: TITLES[id - 1],
        pass,
        detail,
    }
}

type Outcome = Result<(bool, String)>;

fn dual(rng: &mut ChaCha8Rng, r: f64) -> DualScalar {
    DualScalar::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn abs_dual(x: DualScalar) -> DualScalar {
    DualScalar::new(x.re.abs(), x.du.abs())
}

/// Largest part-wise `|x − y| / scale`.
fn rel(x: DualScalar, y: DualScalar, scale: DualScalar) -> f64 {
    let r = |d: f64, s: f64| if s > 0.0 { d / s } else { d };
    r((x.re - y.re).abs(), scale.re).max(r((x.du - y.du).abs(), scale.du))
}

fn algebra(rng: &mut ChaCha8Rng, k: f64) -> Outcome {
    let mut ring = 0.0f64;
    for _ in 0..10_000 {
        let (a, b, c) = (dual(rng, 10.0), dual(rng, 10.0), dual(rng, 10.0));
        let (aa, ab, ac) = (abs_dual(a), abs_dual(b), abs_dual(c));
        let sum_scale = aa + ab + ac;
        let prod_scale = aa * ab * ac;
        ring = ring
            .max(rel((a + b) + c, a + (b + c), sum_scale))
            .max(rel(a + b, b + a, sum_scale))
            .max(rel((a * b) * c, a * (b * c), prod_scale))
            .max(rel(a * b, b * a, aa * ab))
            .max(rel(a * (b + c), a * b + a * c, aa * (ab + ac)))
            .max(rel(a + DualScalar::ZERO, a, aa))
            .max(rel(a * DualScalar::ONE, a, aa))
            .max(rel(a + (-a), DualScalar::ZERO, aa + aa));
    }
    let eps_sq = DualScalar::EPS * DualScalar::EPS;
    let nilpotent = eps_sq == DualScalar::ZERO;

    // dual parts of lifted functions against central differences of the
    // real functions
    type Lift = (fn(DualScalar) -> DualScalar, fn(f64) -> f64, (f64, f64));
    let lifts: [Lift; 6] = [
        (|x| x.sin(), f64::sin, (-3.0, 3.0)),
        (|x| x.cos(), f64::cos, (-3.0, 3.0)),
        (|x| x.tan(), f64::tan, (-1.2, 1.2)),
        (|x| x.sqrt().unwrap(), f64::sqrt, (0.1, 10.0)),
        (|x| x.recip().unwrap(), |x| 1.0 / x, (0.2, 5.0)),
        (|x| x.acos(1e-9).unwrap(), f64::acos, (-0.9, 0.9)),
    ];
    let mut taylor = 0.0f64;
    for (lift, f, (lo, hi)) in lifts {
        for _ in 0..200 {
            let x = rng.random_range(lo..hi);
            let d = rng.random_range(-2.0..2.0);
            let h = 1e-3;
            let fd = (f(x - 2.0 * h) - f(x + 2.0 * h) + 8.0 * (f(x + h) - f(x - h))) / (12.0 * h);
            let y = lift(DualScalar::new(x, d));
            taylor = taylor.max((y.du - fd * d).abs() / (fd * d).abs().max(1.0));
            taylor = taylor.max((y.re - f(x)).abs());
        }
    }
    let pass = ring <= 1e-14 * k && nilpotent && taylor <= 1e-8 * k;
    Ok((
        pass,
        format!("ring axioms max rel err {ring:.2e} (<= 1e-14); eps^2 = 0: {nilpotent}; Taylor lifts max err {taylor:.2e} (<= 1e-8)"),
    ))
}

fn unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_line(rng: &mut ChaCha8Rng) -> Line3 {
    let p = Vector3::new(
        rng.random_range(-10.0..10.0),
        rng.random_range(-10.0..10.0),
        rng.random_range(-10.0..10.0),
    );
    Line3 {
        point: p,
        direction: unit(rng),
    }
}

/// Worst (direction change, foot distance, sphere residual) of a line
/// through the dual sphere and back.
fn line_round_trip(line: &Line3) -> Result<(f64, f64, f64)> {
    let v = line_to_dual(line)?;
    let back = dual_to_line(v.vec())?;
    Ok((
        (back.direction - line.direction).amax(),
        line.distance_to_point(&back.point),
        sphere_residual(v.vec()),
    ))
}

/// Directions agree to a few rounding units.
const DIRECTION_TOL: f64 = 4.0 * f64::EPSILON;

fn study_round_trip(rng: &mut ChaCha8Rng, k: f64) -> Outcome {
    let (mut dir, mut foot, mut sphere) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (d, f, s) = line_round_trip(&random_line(rng))?;
        dir = dir.max(d);
        foot = foot.max(f);
        sphere = sphere.max(s);
    }
    let pass = dir <= DIRECTION_TOL * k && foot < 1e-10 * k && sphere < 1e-12 * k;
    Ok((
        pass,
        format!("direction change {dir:.2e}; foot-to-line {foot:.2e} (< 1e-10); sphere residual {sphere:.2e} (< 1e-12)"),
    ))
}

/// Angle and shortest distance from the closest points of the two lines.
fn common_perpendicular(a: &Line3, b: &Line3) -> (f64, f64) {
    let w0 = a.point - b.point;
    let (aa, ab, bb) = (a.direction.dot(&a.direction), a.direction.dot(&b.direction), b.direction.dot(&b.direction));
    let (d, e) = (a.direction.dot(&w0), b.direction.dot(&w0));
    let den = aa * bb - ab * ab;
    let sc = (ab * e - bb * d) / den;
    let tc = (aa * e - ab * d) / den;
    let gap = w0 + a.direction * sc - b.direction * tc;
    let angle = a.direction.cross(&b.direction).norm().atan2(ab);
    (angle, gap.norm())
}

fn angle_oracle(rng: &mut ChaCha8Rng, k: f64) -> Outcome {
    let (mut angle_err, mut dist_err) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 1000 {
        let (a, b) = (random_line(rng), random_line(rng));
        if a.direction.cross(&b.direction).norm() < 0.05 {
            continue;
        }
        n += 1;
        let theta = dual_angle(&line_to_dual(&a)?, &line_to_dual(&b)?)?;
        let (angle, dist) = common_perpendicular(&a, &b);
        angle_err = angle_err.max((theta.re - angle).abs());
        dist_err = dist_err.max((theta.du.abs() - dist).abs());
    }
    let pass = angle_err < 1e-9 * k && dist_err < 1e-9 * k;
    Ok((pass, format!("angle err {angle_err:.2e}; |distance| err {dist_err:.2e} (< 1e-9) over {n} pairs")))
}

fn dual_helix() -> Result<DualCurve> {
    let h = Expr::Helix { radius: 3.0, pitch: 4.0 };
    CurveSpec::new(h.clone(), Expr::Scaled { factor: 0.1, of: Box::new(h) }).build()
}

/// Curves of the catalog with a defined Frenet frame everywhere.
fn catalog() -> Vec<(&'static str, CurveSpec)> {
    let helix = Expr::Helix { radius: 3.0, pitch: 4.0 };
    let circle = Expr::Circle { radius: 2.0 };
    let cubic = Expr::Polynomial {
        coeffs: vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]],
    };
    vec![
        ("helix", CurveSpec::new(helix.clone(), Expr::zero())),
        ("dual helix", CurveSpec::new(helix.clone(), Expr::Scaled { factor: 0.1, of: Box::new(helix) })),
        ("circle", CurveSpec::new(circle.clone(), Expr::zero())),
        (
            "dual circle",
            CurveSpec::new(circle, Expr::Line { point: [0.0, 0.0, 0.5], direction: [0.1, 0.0, 0.0] }),
        ),
        (
            "twisted cubic",
            CurveSpec::new(cubic, Expr::Circle { radius: 0.3 }).with_domain(0.2, 1.5),
        ),
    ]
}

fn frenet_catalog(k: f64) -> Outcome {
    let c = dual_helix()?;
    let fd = c.with_finite_differences();
    let tol = Tolerances::default();
    let expect = (DualScalar::new(0.12, -0.012), DualScalar::new(0.16, -0.016));
    let (mut analytic, mut numeric) = (0.0f64, 0.0f64);
    for t in [0.0, 0.7, 2.0, 5.5] {
        for (curve, worst) in [(&c, &mut analytic), (&fd, &mut numeric)] {
            let f = frenet_with(curve, t, &tol)?;
            let (a, b) = f.kappa.abs_diff(&expect.0);
            let (x, y) = f.tau.abs_diff(&expect.1);
            *worst = worst.max(a).max(b).max(x).max(y);
        }
    }
    let mut eq = 0.0f64;
    for (_, spec) in catalog() {
        let curve = spec.build()?;
        for t in uniform_grid(curve.domain().0 + 0.1, curve.domain().1 - 0.1, 9) {
            eq = eq.max(frenet_equation_residual(&curve, t, 1e-3)?.max());
        }
    }
    let pass = analytic < 1e-9 * k && numeric < 1e-5 * k && eq < 1e-6 * k;
    Ok((
        pass,
        format!("dual helix kappa/tau err analytic {analytic:.2e} (< 1e-9), finite difference {numeric:.2e} (< 1e-5); Frenet equation residual {eq:.2e} (< 1e-6)"),
    ))
}

fn test_profile() -> Result<FrenetProfile> {
    FrenetProfile::new(
        Arc::new(ScalarProfile::Poly { re_coeffs: vec![1.0, 0.0, 0.3], du_coeffs: vec![0.1, 0.05] }),
        Arc::new(ScalarProfile::Poly { re_coeffs: vec![0.5, 0.2], du_coeffs: vec![0.0, 0.1] }),
        (0.0, 2.0),
    )
}

fn synthesis(k: f64) -> Outcome {
    let p = test_profile()?;
    let c = integrate_frenet(&p, 1e-3)?;
    let tol = Tolerances::default();
    let mut err = 0.0f64;
    for s in uniform_grid(0.0, 2.0, 41) {
        let f = frenet_with(&c, s, &tol)?;
        let (a, b) = f.kappa.abs_diff(&p.kappa.value(s));
        let (x, y) = f.tau.abs_diff(&p.tau.value(s));
        err = err.max(a).max(b).max(x).max(y);
    }
    // Richardson-style order estimate from the endpoint at three steps
    let end = |h: f64| -> Result<crate::vector::DualVec3> { integrate_frenet(&p, h)?.eval(2.0) };
    let (e1, e2, e3) = (end(0.04)?, end(0.02)?, end(0.01)?);
    let d1 = (e1 - e2).part_norms();
    let d2 = (e2 - e3).part_norms();
    let order_re = (d1.0 / d2.0).log2();
    let order_du = (d1.1 / d2.1).log2();
    let pass = err < 1e-6 * k && order_re > 3.5 && order_du > 3.5;
    Ok((
        pass,
        format!("profile err {err:.2e} (< 1e-6) at step 1e-3; observed order {order_re:.2} real / {order_du:.2} dual (> 3.5)"),
    ))
}

fn tan_profile(shift_du: f64) -> Arc<dyn ScalarFn> {
    Arc::new(ScalarProfile::Tan {
        scale: DualScalar::ONE,
        shift: DualScalar::new(0.0, shift_du),
        factor: DualScalar::ONE,
    })
}

fn mannheim_pairs(k: f64) -> Outcome {
    let opts = PairOptions::default();
    let mut pass = true;
    let mut details = Vec::new();
    for (lambda, shift) in [(DualScalar::ONE, 0.0), (DualScalar::new(1.0, 0.25), 0.1)] {
        let p = generate_pair(lambda, tan_profile(shift), (-1.0, 1.0), 1e-3, &opts)?;
        let r = verify_theorems(&p)?;
        let dist = p
            .samples
            .iter()
            .map(|s| (s.point - s.point1).norm())
            .collect::<Result<Vec<_>>>()?;
        let real_gap = dist.iter().map(|d| (d.re - 1.0).abs()).fold(0.0, f64::max);
        let spread = |f: fn(&DualScalar) -> f64| {
            let hi = dist.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            let lo = dist.iter().map(f).fold(f64::INFINITY, f64::min);
            hi - lo
        };
        let dist_spread = spread(|d| d.re).max(spread(|d| d.du));
        let mut worst = 0.0f64;
        for name in ["thm4_torsion", "thm7_linear", "thm8_i", "thm8_ii", "thm8_iii", "thm8_iv", "eq9_eq10_angle"] {
            let c = r.check(name).expect("check present");
            pass &= c.max_residual_re < 1e-6 * k && c.max_residual_du < 1e-6 * k && c.samples > 0;
            worst = worst.max(c.max_residual_re).max(c.max_residual_du);
        }
        let lam = p.lambda.abs_diff(&lambda);
        // the generated pair was already validated; re-read its residual
        let par = p
            .samples
            .iter()
            .map(|s| s.frame.n_vec.vec().cross(s.frame1.b_vec.vec()).part_norms())
            .fold(0.0f64, |m, (a, b)| m.max(a).max(b));
        pass &= par < 1e-6 * k && dist_spread < 1e-7 * k && real_gap < 1e-7 * k && lam.0.max(lam.1) < 1e-6 * k;
        details.push(format!(
            "lambda {lambda}: n x b1 {par:.1e}, distance spread {dist_spread:.1e} / |re - 1| {real_gap:.1e}, theorem residuals <= {worst:.1e}"
        ));
    }
    Ok((pass, details.join("; ")))
}

fn condition(k: f64) -> Outcome {
    let helix = CurveSpec::new(Expr::Helix { radius: 3.0, pitch: 4.0 }, Expr::zero()).build()?;
    let tol = Tolerances::default();
    let residual = |l: DualScalar| -> Result<f64> {
        let c = check_mannheim_condition(&helix, l, &tol)?.checks.remove(0);
        Ok(c.max_residual_re.max(c.max_residual_du))
    };
    let exact = residual(DualScalar::real(3.0))?;
    let plus = residual(DualScalar::real(3.01))?;
    let minus = residual(DualScalar::real(2.99))?;
    let relative = residual(DualScalar::real(3.0 * 1.01))?;
    let perturbed = plus.min(minus);
    let pass = exact < 1e-12 * k && perturbed > 1e-3;
    Ok((
        pass,
        format!(
            "exact {exact:.2e} (< 1e-12); lambda +/- 0.01 gives {perturbed:.2e} (needs > 1e-3; equals 0.01(kappa^2 + tau^2) = 4e-4); a 1% relative change gives {relative:.2e}"
        ),
    ))
}

fn generated() -> Result<crate::mannheim::TheoremReport> {
    let p = generate_pair(DualScalar::ONE, tan_profile(0.0), (-1.0, 1.0), 1e-3, &PairOptions::default())?;
    verify_theorems(&p)
}

fn curvature_identity(k: f64) -> Outcome {
    let r = generated()?;
    let sq = r.check("cor4").expect("check present");
    let first = r.diagnostic("cor4_printed").expect("diagnostic present");
    let factor = r.finding("cor4_printed_factor").expect("finding present");
    let json = r.to_json();
    let both_reported = json.contains("\"cor4\"") && json.contains("\"cor4_printed\"");
    let squared_ok = sq.max_residual_re < 1e-6 * k && sq.max_residual_du < 1e-6 * k;
    let first_fails = !first.pass;
    let pass = squared_ok && first_fails && factor.value < 1e-6 * k && both_reported;
    Ok((
        pass,
        format!(
            "squared form {:.2e}; first-power form {:.2e} (fails); missing factor equals ds1/ds to {:.2e}",
            sq.max_residual_re.max(sq.max_residual_du),
            first.max_residual_re.max(first.max_residual_du),
            factor.value
        ),
    ))
}

fn non_constancy() -> Outcome {
    let r = generated()?;
    let schell = r.finding("cor2_schell_spread").expect("finding present");
    let osc = r.finding("cor5_osculating_spread").expect("finding present");
    let pass = schell.value > 0.01 && osc.value > 0.01;
    Ok((
        pass,
        format!("spread of tau*tau1 {:.3}; spread of osculating ratio {:.3} (both > 0.01)", schell.value, osc.value),
    ))
}

fn classifiers(k: f64) -> Outcome {
    let tol = Tolerances::default();
    let line = CurveSpec::new(
        Expr::Line { point: [1.0, 2.0, 0.0], direction: [0.0, 0.6, 0.8] },
        Expr::Line { point: [0.0, 0.3, 0.0], direction: [0.2, 0.0, 0.1] },
    )
    .with_domain(0.0, 4.0)
    .build()?;
    let circle = CurveSpec::new(
        Expr::Circle { radius: 2.0 },
        Expr::Line { point: [0.0, 0.0, 0.5], direction: [0.0; 3] },
    )
    .build()?;
    let helix = dual_helix()?;
    let l = classify_straight_line(&line, &tol)?;
    let c_line = classify_straight_line(&circle, &tol)?;
    let c_plane = classify_planar(&circle, &tol)?;
    let h_line = classify_straight_line(&helix, &tol)?;
    let h_plane = classify_planar(&helix, &tol)?;
    let kappa = l.max_curvature.0.max(l.max_curvature.1);
    let plane = c_plane.max_plane_residual.0.max(c_plane.max_plane_residual.1);
    let pass = l.is_line
        && kappa < 1e-10 * k
        && !c_line.is_line
        && c_plane.is_planar
        && plane < 1e-8 * k
        && !h_line.is_line
        && !h_plane.is_planar;
    Ok((
        pass,
        format!(
            "line kappa {kappa:.2e} (< 1e-10); circle planar {} residual {plane:.2e} (< 1e-8); helix line {} planar {}",
            c_plane.is_planar, h_line.is_line, h_plane.is_planar
        ),
    ))
}

fn ruled(k: f64) -> Outcome {
    let h = 0.5;
    let helicoid = CurveSpec::new(
        Expr::Circle { radius: 1.0 },
        Expr::Moment {
            point: Box::new(Expr::Line { point: [0.0; 3], direction: [0.0, 0.0, h] }),
            direction: Box::new(Expr::Circle { radius: 1.0 }),
        },
    )
    .build()?;
    let grid = uniform_grid(0.0, 4.0 * PI, 100);
    let patch = dual_curve_to_ruled(&helicoid, &grid, (-2.0, 2.0))?;
    let mesh = export_mesh(&patch, 20)?;
    let mut on_surface = 0.0f64;
    for (v, line) in mesh.obj.lines().filter(|l| l.starts_with("v ")).enumerate() {
        let x: Vec<f64> = line[2..].split(' ').map(|c| c.parse().unwrap_or(f64::NAN)).collect();
        let s = grid[v / 20];
        let r = (x[1] * s.cos() - x[0] * s.sin()).abs().max((x[2] - h * s).abs());
        on_surface = on_surface.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    let (mut dir, mut foot, mut sphere) = (0.0f64, 0.0f64, 0.0f64);
    let back = ruled_to_dual_samples(&patch)?;
    for (i, v) in back.iter().enumerate() {
        let original = helicoid.eval(grid[i])?;
        sphere = sphere.max(sphere_residual(v.vec()));
        let l = dual_to_line(v.vec())?;
        let o = dual_to_line(&original)?;
        dir = dir.max((l.direction - o.direction).amax());
        foot = foot.max(o.distance_to_point(&l.point));
    }
    let counts = mesh.vertices == 2000 && mesh.triangles == 2 * 99 * 19;
    let pass = on_surface < 1e-9 * k && dir <= DIRECTION_TOL * k && foot < 1e-10 * k && sphere < 1e-12 * k && counts;
    Ok((
        pass,
        format!(
            "helicoid vertices off surface {on_surface:.2e} (< 1e-9); round trip direction {dir:.2e}, foot {foot:.2e}, sphere {sphere:.2e}; {} vertices {} triangles",
            mesh.vertices, mesh.triangles
        ),
    ))
}
