use paraplex::linespace::{self, LinePoint};
use paraplex::products::{build_product, closed_form_curvature, SurfaceFactor};
use paraplex::report::ReportBuilder;
use paraplex::tensor::curvature;
use paraplex::topology::{obstruction_report, TopologicalProfile, Verdict};
use proptest::prelude::*;

fn disc() -> impl Strategy<Value = (f64, f64)> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| (r * a.cos(), r * a.sin()))
}

fn line() -> impl Strategy<Value = LinePoint> {
    (disc(), -3.0..3.0f64, -3.0..3.0f64).prop_map(|(xi, a, b)| LinePoint::new(xi, (a, b)))
}

fn coord() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0..2.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn conformal_chart_roundtrip(l in line()) {
        let back = linespace::from_conformal(&linespace::to_conformal(&l).unwrap());
        prop_assert!((back.xi - l.xi).modulus() < 1e-10);
        prop_assert!((back.eta - l.eta).modulus() < 1e-9);
    }

    #[test]
    fn pluecker_relation_vanishes(s in coord(), t in coord()) {
        let d: f64 = s.iter().zip(&t).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assume!(d > 1e-3);
        let px = linespace::pluecker(s, t).unwrap();
        prop_assert!(px.relation().abs() < 1e-12);
    }

    #[test]
    fn line_space_curvature_identities(l in line()) {
        let c = curvature(&linespace::metric_g(), &l.chart()).unwrap();
        prop_assert!(c.symmetry_residual() < 1e-9);
        prop_assert!(c.weyl_trace_residual() < 1e-9);
        prop_assert!(c.scalar.abs() < 1e-8);
        prop_assert!(c.weyl_sq.abs() < 1e-8);
        prop_assert!(c.einstein_max() > 1e-3);
    }

    #[test]
    fn constant_products_match_closed_form(
        k1 in -2.0..2.0f64,
        k2 in -2.0..2.0f64,
        eps in prop::sample::select(vec![1.0, -1.0]),
        p in prop::array::uniform4(-0.3..0.3f64),
    ) {
        let g = build_product(SurfaceFactor::constant(k1), SurfaceFactor::constant(k2), eps).unwrap();
        let c = curvature(&g.metric, &p).unwrap();
        let f = closed_form_curvature(k1, k2, eps);
        prop_assert!((c.scalar - f.scalar).abs() < 1e-8);
        prop_assert!((c.ricci_sq - f.ricci_sq).abs() < 1e-8);
        prop_assert!((c.weyl_sq - f.weyl_factor * f.weyl_shape).abs() < 1e-7);
    }

    #[test]
    fn unobstructed_profiles_are_divisible(chi in -40i64..40, tau in -40i64..40) {
        let r = obstruction_report(&TopologicalProfile::new("x", chi, tau));
        prop_assert_eq!(r.hitchin_thorpe, 2 * chi >= 3 * tau.abs());
        if r.verdict == Verdict::NoObstruction {
            prop_assert_eq!(tau, 0);
            prop_assert_eq!(chi.rem_euclid(4), 0);
            prop_assert!(chi >= 0);
        }
        if r.neutral_conditions {
            prop_assert_eq!((chi - tau).rem_euclid(2), 0);
        }
    }

    #[test]
    fn scaled_checks_stay_consistent(residual in 0.0..1.0f64, tol in 1e-6..1.0f64, scale in 1e-3..1e3f64) {
        let mut b = ReportBuilder::new(scale);
        b.at_most("p.a", "", "", residual, tol);
        b.at_least("p.b", "", "", residual, tol);
        b.holds("p.c", "", "", residual < tol);
        let r = b.finish("pde", 0, 0.0);
        prop_assert!(r.checks.iter().all(|c| c.consistent()));
        prop_assert_eq!(r.check("p.a").unwrap().pass, residual <= tol * scale);
        prop_assert_eq!(r.check("p.b").unwrap().pass, residual >= tol / scale);
        prop_assert_eq!(r.check("p.c").unwrap().pass, residual < tol);
        prop_assert_eq!(r.summary.passed + r.summary.failed, 3);
    }
}
