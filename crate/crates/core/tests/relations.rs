//! Published identities of dual numbers and dual curves, checked as stated.

use std::sync::Arc;

use dualfrenet::curve::{classify_planar, classify_straight_line, frenet, CurveSpec, Expr};
use dualfrenet::mannheim::{generate_pair, mannheim_from_partner, osculating_ratio, partner_from_mannheim, PairOptions};
use dualfrenet::synthesis::{integrate_frenet, FrenetProfile, ScalarProfile};
use dualfrenet::{DualScalar, DualVec3, Error, Tolerances};

fn ds(re: f64, du: f64) -> DualScalar {
    DualScalar::new(re, du)
}

#[test]
fn pure_dual_numbers_are_zero_divisors() {
    assert_eq!(ds(0.0, 5.0) * ds(0.0, 7.0), DualScalar::ZERO);
    let e = ds(1.0, 0.0).div(ds(0.0, 1.0)).unwrap_err();
    assert!(matches!(e, Error::PureDualDivisor { .. }));
}

#[test]
fn sine_and_cosine_expansions() {
    assert_eq!(ds(0.0, 3.0).sin(), ds(0.0, 3.0));
    assert_eq!(ds(0.0, 3.0).cos(), ds(1.0, 0.0));
    for (x, xs) in [(0.3, -1.2), (2.0, 0.7), (-1.1, 4.0)] {
        let s = ds(x, xs).sin();
        let c = ds(x, xs).cos();
        assert!(s.approx_eq(&ds(f64::sin(x), xs * f64::cos(x)), 1e-15, 1e-15));
        assert!(c.approx_eq(&ds(f64::cos(x), -xs * f64::sin(x)), 1e-15, 1e-15));
    }
}

#[test]
fn vector_with_zero_real_part_has_no_norm() {
    let v = DualVec3::from_arrays([0.0; 3], [1.0, 1.0, 1.0]);
    assert!(matches!(v.normalize(), Err(Error::ZeroRealPart { .. })));
}

#[test]
fn straight_line_has_no_curvature() {
    let line = CurveSpec::new(
        Expr::Line {
            point: [1.0, 0.0, 2.0],
            direction: [0.0, 3.0, 4.0],
        },
        Expr::Line {
            point: [0.0, 1.0, 0.0],
            direction: [1.0, 0.0, 0.0],
        },
    )
    .with_domain(0.0, 1.0)
    .build()
    .unwrap();
    assert!(matches!(frenet(&line, 0.5), Err(Error::VanishingCurvature { .. })));
    let tol = Tolerances::default();
    assert!(classify_straight_line(&line, &tol).unwrap().is_line);
    let helix = CurveSpec::new(Expr::Helix { radius: 3.0, pitch: 4.0 }, Expr::zero()).build().unwrap();
    assert!(!classify_straight_line(&helix, &tol).unwrap().is_line);
}

#[test]
fn offset_constant_is_never_pure_dual() {
    let lambda = ds(0.0, 1.0);
    let tan = Arc::new(ScalarProfile::tan());
    let e = generate_pair(lambda, tan, (-1.0, 1.0), 1e-3, &PairOptions::default()).unwrap_err();
    assert!(matches!(e, Error::PureDualLambda { .. }), "{e:?}");
    let helix = CurveSpec::new(Expr::Helix { radius: 3.0, pitch: 4.0 }, Expr::zero()).build().unwrap();
    assert!(matches!(partner_from_mannheim(&helix, lambda), Err(Error::PureDualLambda { .. })));
    assert!(matches!(mannheim_from_partner(&helix, lambda), Err(Error::PureDualLambda { .. })));
}

#[test]
fn constant_curvature_curve_is_planar_iff_torsion_vanishes() {
    let tol = Tolerances::default();
    let kappa = Arc::new(ScalarProfile::constant(ds(1.0, 0.1)));
    let flat = FrenetProfile::new(kappa.clone(), Arc::new(ScalarProfile::constant(DualScalar::ZERO)), (0.0, 3.0)).unwrap();
    let c = integrate_frenet(&flat, 1e-3).unwrap();
    assert!(classify_planar(&c, &tol).unwrap().is_planar);

    let twisted = FrenetProfile::new(kappa, Arc::new(ScalarProfile::constant(ds(0.2, 0.0))), (0.0, 3.0)).unwrap();
    let c = integrate_frenet(&twisted, 1e-3).unwrap();
    assert!(!classify_planar(&c, &tol).unwrap().is_planar);
}

// α̃₁ - M̃ = (1/κ̃ + σλ̃)ñ with ñ = σb̃₁
#[test]
fn partner_point_to_osculating_center() {
    let pair = generate_pair(
        ds(1.0, 0.0),
        Arc::new(ScalarProfile::tan()),
        (-1.0, 1.0),
        1e-3,
        &PairOptions::default(),
    )
    .unwrap();
    let osc = osculating_ratio(&pair).unwrap();
    for (s, o) in pair.samples.iter().zip(&osc.samples) {
        assert_eq!(s.t, o.t);
        let want = (1.0 / s.frame.kappa.re + pair.sigma * pair.lambda.re).abs();
        assert!((o.dist_a1_m.re - want).abs() < 1e-6, "{} vs {want}", o.dist_a1_m.re);
    }
}
