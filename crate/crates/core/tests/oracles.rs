//! Worked examples with values computed independently of this crate
//! (symbolic dual arithmetic, classical helix formulas, closed forms).

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use dualfrenet::curve::{
    classify_planar, classify_straight_line, dual_arc_length, frenet, reparameterize_by_arclength, CurveSpec, Expr,
};
use dualfrenet::line::line_pair_geometry;
use dualfrenet::mannheim::{
    check_mannheim_condition, check_partner_ode, generate_pair, osculating_ratio, pair_check, partner_from_mannheim,
    partner_of_straight_line, verify_theorems, PairOptions,
};
use dualfrenet::ruled::{dual_curve_to_ruled, export_mesh, ruled_to_dual_samples};
use dualfrenet::synthesis::{integrate_frenet, FrenetProfile, ScalarProfile};
use dualfrenet::vector::dual_angle;
use dualfrenet::{DualCurve, DualScalar, DualVec3, Error, Line3, Tolerances, UnitDualVec3};
use nalgebra::Vector3;

fn ds(re: f64, du: f64) -> DualScalar {
    DualScalar::new(re, du)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn helix_spec(dual_factor: f64) -> CurveSpec {
    let real = Expr::Helix { radius: 3.0, pitch: 4.0 };
    let dual = if dual_factor == 0.0 {
        Expr::zero()
    } else {
        Expr::Scaled {
            factor: dual_factor,
            of: Box::new(real.clone()),
        }
    };
    CurveSpec::new(real, dual)
}

fn helix(dual_factor: f64) -> DualCurve {
    helix_spec(dual_factor).build().unwrap()
}

// cos(1 + 0.5ε) = (0.54030230586813972, -0.42073549240394825)
#[test]
fn acos_inverts_forward_cosine() {
    let x = ds(0.540_302_305_868_139_7, -0.420_735_492_403_948_25);
    let th = x.acos(1e-9).unwrap();
    assert!(th.approx_eq(&ds(1.0, 0.5), 1e-12, 1e-12), "{th:?}");
}

#[test]
fn normalize_divides_by_dual_norm() {
    let r = DualVec3::from_arrays([3.0, 0.0, 0.0], [1.0, 2.0, 3.0]).normalize().unwrap();
    let want = DualVec3::from_arrays([1.0, 0.0, 0.0], [0.0, 2.0 / 3.0, 1.0]);
    let (e_re, e_du) = (*r.vec() - want).part_norms();
    assert!(e_re < 1e-15 && e_du < 1e-15);
    assert!(r.re().dot(&r.du()).abs() < 1e-15);
}

#[test]
fn dual_angle_of_skew_perpendicular_lines() {
    for q in [0.5, 1.0, 2.5] {
        let z = UnitDualVec3::from_arrays([0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let l = UnitDualVec3::from_arrays([1.0, 0.0, 0.0], [0.0, 0.0, -q]).unwrap();
        let th = dual_angle(&z, &l).unwrap();
        assert!(th.approx_eq(&ds(FRAC_PI_2, q), 1e-14, 1e-14), "{th:?}");

        let g = line_pair_geometry(
            &Line3::through(Vector3::zeros(), Vector3::z()).unwrap(),
            &Line3::through(Vector3::new(0.0, q, 0.0), Vector3::x()).unwrap(),
        );
        assert!(close(g.angle, FRAC_PI_2, 1e-15) && close(g.distance, q, 1e-15));
    }
}

#[test]
fn helix_dual_arc_length() {
    let l0 = dual_arc_length(&helix(0.0), 0.0, 2.0).unwrap();
    assert!(l0.approx_eq(&ds(10.0, 0.0), 1e-10, 1e-12), "{l0:?}");
    let l1 = dual_arc_length(&helix(0.1), 0.0, 2.0).unwrap();
    assert!(l1.approx_eq(&ds(10.0, 1.0), 1e-10, 1e-10), "{l1:?}");
}

#[test]
fn helix_frame_at_origin() {
    let f = frenet(&helix(0.0), 0.0).unwrap();
    assert!(f.kappa.approx_eq(&ds(0.12, 0.0), 1e-14, 1e-14));
    assert!(f.tau.approx_eq(&ds(0.16, 0.0), 1e-14, 1e-14));
    let want = [
        Vector3::new(0.0, 0.6, 0.8),
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(0.0, -0.8, 0.6),
    ];
    for (v, w) in [f.t_vec, f.n_vec, f.b_vec].iter().zip(want) {
        assert!((v.re() - w).norm() < 1e-14, "{:?} vs {w:?}", v.re());
        assert!(v.du().norm() < 1e-14);
    }
}

#[test]
fn scaled_dual_part_scales_curvatures() {
    let f = frenet(&helix(0.1), 0.0).unwrap();
    assert!(f.kappa.approx_eq(&ds(0.12, -0.012), 1e-13, 1e-13), "{:?}", f.kappa);
    assert!(f.tau.approx_eq(&ds(0.16, -0.016), 1e-13, 1e-13), "{:?}", f.tau);
    // same values from finite differences of the tabulated dual parts
    let fd = frenet(&helix(0.1).with_finite_differences(), 1.0).unwrap();
    assert!(fd.kappa.approx_eq(&ds(0.12, -0.012), 1e-6, 1e-6), "{:?}", fd.kappa);
    assert!(fd.tau.approx_eq(&ds(0.16, -0.016), 1e-6, 1e-6), "{:?}", fd.tau);
}

#[test]
fn arc_length_reparameterized_helix() {
    let (c, arc) = reparameterize_by_arclength(&helix(0.0)).unwrap();
    assert!(close(arc.length(), 10.0 * PI, 1e-9));
    for s in [0.0, 1.0, 7.5, 20.0, 31.0] {
        let p = c.eval(s).unwrap();
        let want = Vector3::new(3.0 * (s / 5.0).cos(), 3.0 * (s / 5.0).sin(), 0.8 * s);
        assert!((p.re - want).norm() < 1e-8, "s={s}: {:?}", p.re);
    }
}

#[test]
fn dual_circle_with_constant_offset_is_planar() {
    let spec = CurveSpec::new(
        Expr::Circle { radius: 2.0 },
        Expr::Line {
            point: [0.3, -0.2, 0.5],
            direction: [0.0; 3],
        },
    );
    let c = spec.build().unwrap();
    let tol = Tolerances::default();
    assert!(classify_planar(&c, &tol).unwrap().is_planar);
    assert!(!classify_straight_line(&c, &tol).unwrap().is_line);
}

fn constant(re: f64, du: f64) -> Arc<ScalarProfile> {
    Arc::new(ScalarProfile::Const { re, du })
}

// x = sin(ks)/k, y = (1 - cos ks)/k; d/dk at k = 1, s = π gives (-π, -2)
#[test]
fn synthesized_dual_circle_endpoint() {
    let p = FrenetProfile::new(constant(1.0, 0.1), constant(0.0, 0.0), (0.0, PI)).unwrap();
    let c = integrate_frenet(&p, 1e-3).unwrap();
    let end = c.eval(PI).unwrap();
    assert!((end.re - Vector3::new(0.0, 2.0, 0.0)).norm() < 1e-6, "{:?}", end.re);
    assert!((end.du - Vector3::new(-0.1 * PI, -0.2, 0.0)).norm() < 1e-6, "{:?}", end.du);
}

#[test]
fn synthesized_helix_round_trip() {
    let p = FrenetProfile::new(constant(0.12, 0.0), constant(0.16, 0.0), (0.0, 10.0 * PI)).unwrap();
    let c = integrate_frenet(&p, 1e-3).unwrap();
    for s in [1.0, 5.0, 15.0, 30.0] {
        let f = frenet(&c, s).unwrap();
        assert!(f.kappa.approx_eq(&ds(0.12, 0.0), 1e-7, 1e-7), "{:?}", f.kappa);
        assert!(f.tau.approx_eq(&ds(0.16, 0.0), 1e-7, 1e-7), "{:?}", f.tau);
    }
    // chord lengths of the radius 3, pitch 4 helix are invariant under rigid motion
    let chord = |d: f64| (18.0 * (1.0 - (d / 5.0).cos()) + (0.8 * d).powi(2)).sqrt();
    for (a, b) in [(0.0, 3.0), (2.0, 17.0), (10.0, 31.0)] {
        let d = (c.eval(b).unwrap().re - c.eval(a).unwrap().re).norm();
        assert!(close(d, chord(b - a), 1e-7), "{d} vs {}", chord(b - a));
    }
}

#[test]
fn partner_ode_holds_for_tangent_torsion() {
    let p = FrenetProfile::new(constant(1.0, 0.0), Arc::new(ScalarProfile::tan()), (-1.0, 1.0)).unwrap();
    let c1 = integrate_frenet(&p, 1e-3).unwrap();
    let r = check_partner_ode(&c1, ds(1.0, 0.0), &Tolerances::default()).unwrap();
    assert!(r.pass(), "{:?}", r.checks);
}

// τ₁ = tan(κ₁ s)/λ solves τ₁′ = (κ₁/λ)(1 + λ²τ₁²) exactly in dual arithmetic
#[test]
fn partner_ode_holds_for_dual_lifted_profile() {
    let (k1, lambda) = (ds(1.0, 0.2), ds(1.0, 0.1));
    let tau = ScalarProfile::Tan {
        scale: k1,
        shift: DualScalar::ZERO,
        factor: lambda.recip().unwrap(),
    };
    let p = FrenetProfile::new(constant(k1.re, k1.du), Arc::new(tau), (-0.8, 0.8)).unwrap();
    let c1 = integrate_frenet(&p, 1e-3).unwrap();
    let r = check_partner_ode(&c1, lambda, &Tolerances::default()).unwrap();
    assert!(r.pass(), "{:?}", r.checks);
    let wrong = check_partner_ode(&c1, ds(1.0, 0.0), &Tolerances::default()).unwrap();
    assert!(!wrong.pass());
}

#[test]
fn circle_offset_through_center_degenerates() {
    let r = 2.0;
    let c = CurveSpec::new(Expr::Circle { radius: r }, Expr::zero()).build().unwrap();
    // the principal normal points at the center, so α - λn hits it for λ = -r
    let e = partner_from_mannheim(&c, ds(-r, 0.0)).unwrap_err();
    assert!(matches!(e, Error::DegeneratePartner { .. }), "{e:?}");
    let twice = partner_from_mannheim(&c, ds(r, 0.0)).unwrap();
    let (a, b) = twice.domain();
    for i in 0..=8 {
        let t = a + (b - a) * i as f64 / 8.0;
        assert!(close(twice.eval(t).unwrap().re.norm(), 2.0 * r, 1e-8));
    }
}

#[test]
fn helix_offset_is_concentric_helix() {
    let c1 = partner_from_mannheim(&helix(0.0), ds(3.0, 0.0)).unwrap();
    let (a, b) = c1.domain();
    for i in 0..=10 {
        let p = c1.eval(a + (b - a) * i as f64 / 10.0).unwrap().re;
        assert!(close(p.xy().norm(), 6.0, 1e-8), "{p:?}");
    }
}

#[test]
fn helix_satisfies_mannheim_condition_at_its_radius() {
    let r = check_mannheim_condition(&helix(0.0), ds(3.0, 0.0), &Tolerances::default()).unwrap();
    let c = &r.checks[0];
    assert!(c.pass && c.max_residual_re < 1e-12 && c.max_residual_du < 1e-12, "{c:?}");
    let off = check_mannheim_condition(&helix(0.0), ds(2.0, 0.0), &Tolerances::default()).unwrap();
    assert!(close(off.checks[0].max_residual_re, 0.04, 1e-12));
}

#[test]
fn circle_satisfies_mannheim_condition_at_its_radius() {
    let c = CurveSpec::new(Expr::Circle { radius: 1.5 }, Expr::zero()).build().unwrap();
    let r = check_mannheim_condition(&c, ds(1.5, 0.0), &Tolerances::default()).unwrap();
    assert!(r.pass(), "{:?}", r.checks);
}

#[test]
fn generated_pair_recovers_offset_and_curvature() {
    let opts = PairOptions::default();
    let pair = generate_pair(ds(1.0, 0.0), Arc::new(ScalarProfile::tan()), (-1.0, 1.0), 1e-3, &opts).unwrap();
    assert!(pair.lambda.approx_eq(&ds(1.0, 0.0), 1e-6, 1e-6), "{:?}", pair.lambda);
    for s in &pair.samples {
        let f1 = frenet(&pair.curve_c1, s.t1).unwrap();
        assert!(f1.kappa.approx_eq(&ds(1.0, 0.0), 1e-6, 1e-6), "{:?}", f1.kappa);
    }
}

#[test]
fn generated_dual_pair_is_valid() {
    // (tan s, 0.1 sec² s) is tan(s + 0.1ε)
    let tau = ScalarProfile::Tan {
        scale: DualScalar::ONE,
        shift: ds(0.0, 0.1),
        factor: DualScalar::ONE,
    };
    let opts = PairOptions::default();
    let pair = generate_pair(ds(1.0, 0.25), Arc::new(tau), (-1.0, 1.0), 1e-3, &opts).unwrap();
    assert!(pair.lambda.approx_eq(&ds(1.0, 0.25), 1e-6, 1e-6), "{:?}", pair.lambda);
}

#[test]
fn concentric_helices_are_not_a_pair() {
    let c1 = partner_from_mannheim(&helix(0.0), ds(3.0, 0.0)).unwrap();
    let check = pair_check(&helix(0.0), &c1, &PairOptions::default()).unwrap();
    assert!(check.pair.is_none());
    assert!(!check.report.pass());
}

#[test]
fn generated_pair_passes_every_check() {
    let pair = generate_pair(
        ds(1.0, 0.0),
        Arc::new(ScalarProfile::tan()),
        (-1.0, 1.0),
        1e-3,
        &PairOptions::default(),
    )
    .unwrap();
    let r = verify_theorems(&pair).unwrap();
    assert!(r.pass(), "{:?}", r.failed());
    for c in &r.checks {
        assert!(c.max_residual_re < 1e-6 && c.max_residual_du < 1e-6, "{c:?}");
    }
    // θ̃ = -s̃₁ along this pair, so dθ̃/ds̃₁ = -1 = -κ̃₁
    for s in &pair.samples {
        assert!(close(s.theta.re, -s.t1, 1e-6), "{} vs {}", s.theta.re, s.t1);
    }
    assert!(r.check("cor4").unwrap().pass);
    assert!(!r.diagnostic("cor4_printed").unwrap().pass);
    assert!(!osculating_ratio(&pair).unwrap().is_constant);
}

// c(s): line through (0,0,hs) along (cos s, sin s, 0)
fn helicoid_curve(h: f64) -> DualCurve {
    CurveSpec::new(
        Expr::Circle { radius: 1.0 },
        Expr::Moment {
            point: Box::new(Expr::Line {
                point: [0.0; 3],
                direction: [0.0, 0.0, h],
            }),
            direction: Box::new(Expr::Circle { radius: 1.0 }),
        },
    )
    .with_domain(0.0, 2.0 * PI)
    .build()
    .unwrap()
}

#[test]
fn helicoid_patch_and_mesh() {
    let h = 0.5;
    let c = helicoid_curve(h);
    let grid: Vec<f64> = (0..=40).map(|i| 2.0 * PI * i as f64 / 40.0).collect();
    let patch = dual_curve_to_ruled(&c, &grid, (-1.0, 1.0)).unwrap();
    for (i, &s) in grid.iter().enumerate() {
        for u in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let p = patch.point(i, u);
            assert!((p.y * s.cos() - p.x * s.sin()).abs() < 1e-10);
            assert!(close(p.z, h * s, 1e-10));
        }
    }

    let back = ruled_to_dual_samples(&patch).unwrap();
    for (v, &s) in back.iter().zip(&grid) {
        let (e_re, e_du) = (*v.vec() - c.eval(s).unwrap()).part_norms();
        assert!(e_re < 1e-10 && e_du < 1e-10, "s={s}");
    }

    let mesh = export_mesh(&patch, 9).unwrap();
    assert_eq!(mesh.vertices, 41 * 9);
    assert_eq!(mesh.triangles, 2 * 40 * 8);
    let mut seen = 0;
    for line in mesh.obj.lines().filter(|l| l.starts_with("v ")) {
        let x: Vec<f64> = line[2..].split_whitespace().map(|t| t.parse().unwrap()).collect();
        let s = x[2] / h;
        assert!((x[1] * s.cos() - x[0] * s.sin()).abs() < 1e-9, "{line}");
        seen += 1;
    }
    assert_eq!(seen, mesh.vertices);
}

#[test]
fn straight_line_partner_is_planar() {
    let c = CurveSpec::new(
        Expr::Line {
            point: [0.0, 0.0, 0.0],
            direction: [0.0, 0.0, 1.0],
        },
        Expr::zero(),
    )
    .with_domain(0.0, 1.0)
    .build()
    .unwrap();
    let tol = Tolerances::default();
    let c1 = partner_of_straight_line(&c, ds(2.0, 0.5), None, &tol).unwrap();
    let planar = classify_planar(&c1, &tol).unwrap();
    assert!(planar.is_planar, "{planar:?}");
}
