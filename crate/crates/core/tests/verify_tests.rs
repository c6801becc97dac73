mod common;

use quasimin::families::{control_flat_plane, control_graph, make_e42, make_s42_trig, E42Kind};
use quasimin::immersion::{Immersion, Rect};
use quasimin::linalg::{IndefiniteSpace, Vector};
use quasimin::numerics::Expr;
use quasimin::space_forms::SpaceForm;
use quasimin::verify::{
    certify_positive_relative_nullity, certify_quasi_minimal, certify_surface, curvature_residuals,
    curvature_residuals_with_step, Check, Grid2D, Tolerances,
};

use common::config;

fn analytic_e42(domain: Rect) -> quasimin::families::GeneratedSurface {
    let zero = Expr::Const(0.0).into_fn();
    let one = Expr::Const(1.0).into_fn();
    make_e42(E42Kind::I, zero, one, (-1.0, 0.0), None, domain).unwrap()
}

fn grid20() -> Grid2D {
    Grid2D::new(20, 20).unwrap()
}

#[test]
fn analytic_e42_is_quasi_minimal() {
    let surface = analytic_e42(Rect::new([0.5, 2.0], [-1.0, 1.0]).unwrap());
    let r = certify_quasi_minimal(&surface.immersion, grid20(), &Tolerances::default());
    assert!(r.pass, "{}", r.summary());
    assert_eq!(r.points.len(), 400);
    for p in &r.points {
        // H = -(1/(2s)) (1, 0, 0, 1).
        let h = p.mean_curvature.as_ref().unwrap();
        let want = -1.0 / (2.0 * p.s);
        for (k, w) in [want, 0.0, 0.0, want].into_iter().enumerate() {
            assert!((h[k] - w).abs() <= 1e-7 * want.abs(), "({}, {}): {h:?}", p.s, p.t);
        }
    }
}

#[test]
fn flat_plane_fails_with_vanishing_h() {
    let surface = control_flat_plane(Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap());
    let tol = Tolerances::default();
    let r = certify_quasi_minimal(&surface.immersion, grid20(), &tol);
    assert!(!r.pass);
    let v = r.property(Check::QuasiMinimal).unwrap();
    assert_eq!(v.failed, 400);
    assert!(r
        .points
        .iter()
        .all(|p| p.failures.iter().any(|f| f.reason == "H = 0")));

    let n = certify_positive_relative_nullity(&surface.immersion, grid20(), &tol);
    let summary = n.nullity.unwrap();
    assert_eq!((summary.min, summary.max), (2, 2));
    assert_eq!(summary.degenerate_points, 400);
    assert!(!summary.exactly_one);
}

#[test]
fn trig_profile_with_exponential_has_zero_h() {
    // b = e^t solves b'' - b = 0; built directly, bypassing the admissibility scan.
    let map = |s: f64, t: f64| {
        let (c, sn) = (s.cos(), s.sin());
        let bc = t.exp() * c;
        Vector::from_slice(IndefiniteSpace::E52, &[bc, c * t.sinh(), sn, c * t.cosh(), bc])
    };
    let domain = Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap();
    let f = Immersion::from_fn(map, SpaceForm::SPHERE, domain);
    let r = certify_quasi_minimal(&f, Grid2D::new(8, 8).unwrap(), &Tolerances::default());
    assert!(!r.pass);
    assert_eq!(r.property(Check::QuasiMinimal).unwrap().failed, 64);
    assert!(make_s42_trig(Expr::named("exp").unwrap().into_fn(), domain).is_err());
}

#[test]
fn generic_graph_has_no_relative_nullity() {
    let surface = control_graph(Rect::new([-0.5, 0.5], [-0.5, 0.5]).unwrap());
    let r = certify_positive_relative_nullity(&surface.immersion, grid20(), &Tolerances::default());
    assert!(!r.pass);
    let n = r.nullity.unwrap();
    assert_eq!((n.min, n.max), (0, 0));
}

#[test]
fn curvature_residual_examples() {
    let flat = control_flat_plane(Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap());
    assert!(curvature_residuals(&flat.immersion, 0.2, -0.3).unwrap().max() <= 1e-9);

    let e42 = analytic_e42(Rect::new([0.5, 2.0], [-1.0, 1.0]).unwrap());
    let r = curvature_residuals(&e42.immersion, 1.0, 0.0).unwrap();
    assert!(r.max() <= 1e-4, "{r:?}");

    let trig = make_s42_trig(
        Expr::poly(&[0.0, 1.0]).into_fn(),
        Rect::new([-1.0, 1.0], [0.5, 1.5]).unwrap(),
    )
    .unwrap();
    let r = curvature_residuals(&trig.immersion, 0.3, 1.0).unwrap();
    assert!(r.max() <= 1e-4, "{r:?}");
}

#[test]
fn curvature_residuals_shrink_under_step_halving() {
    let cfg = config("s42-hyp-quadratic");
    let f = cfg.build().unwrap().immersion;
    let coarse = curvature_residuals_with_step(&f, 0.3, 1.2, 0.08).unwrap();
    let fine = curvature_residuals_with_step(&f, 0.3, 1.2, 0.04).unwrap();
    for (c, f, what) in [
        (coarse.gauss, fine.gauss, "gauss"),
        (coarse.codazzi, fine.codazzi, "codazzi"),
    ] {
        assert!(c > 1e-8, "{what} already at roundoff");
        assert!(c >= 4.0 * f, "{what}: {c:e} -> {f:e}");
    }
}

#[test]
fn skipped_points_are_listed_and_do_not_fail() {
    // The grid crosses s + m = 0 at s = 0.
    let surface = analytic_e42(Rect::new([-1.0, 1.0], [-1.0, 1.0]).unwrap());
    let r = certify_surface(&surface, Grid2D::new(9, 5).unwrap(), &Tolerances::default());
    assert!(!r.skipped.is_empty());
    assert!(r
        .skipped
        .iter()
        .all(|p| p.s.abs() <= 0.05 && p.reason.contains("s + m(t)")));
    assert_eq!(r.skipped.len() + r.points.len(), 45);
    assert!(r.pass, "{}", r.summary());
}

#[test]
fn aggregate_pass_requires_every_point() {
    for name in [
        "e42-ii-cosh",
        "s42-trig-wave",
        "control-graph",
        "control-flat-plane",
    ] {
        let cfg = config(name);
        let surface = cfg.build().unwrap();
        let r = certify_surface(&surface, Grid2D::new(6, 6).unwrap(), &cfg.tolerances);
        assert_eq!(r.pass, r.points.iter().all(|p| p.passed()), "{name}");
        assert_eq!(r.pass, r.properties.iter().all(|p| p.pass), "{name}");
    }
}
