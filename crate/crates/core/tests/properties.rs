use std::time::Instant;

use proptest::prelude::*;

use fracjordan::quadforms::kernel::angular_kernel;
use fracjordan::quadforms::{fractional_form, QuadratureSpec};
use fracjordan::specialfn::{li_const, ExponentTriple};
use fracjordan::testfuncs::{weighted_norm, RadialProfile};
use fracjordan::transforms::SampledProfile;
use fracjordan::verify::{
    kernel_numerator, Condition, Relation, ReportParams, Side, VerificationReport,
};

fn admissible() -> impl Strategy<Value = (f64, f64, u32)> {
    (1u32..=6, 0.05f64..0.95, 0.05f64..0.95).prop_map(|(n, s, t)| {
        let a = s * 2f64.min(n as f64);
        let b = t * (n as f64 - a);
        (a, b, n)
    })
}

proptest! {
    #[test]
    fn kernel_numerator_nonnegative((a, b, n) in admissible(), ln_y in -8.0f64..8.0) {
        let f = kernel_numerator(ln_y.exp(), a, b, n);
        prop_assert!(f >= 0.0, "f = {f}");
        if ln_y.abs() > 1e-3 && b < n as f64 - a - 1e-3 {
            prop_assert!(f > 0.0);
        }
    }

    #[test]
    fn ground_state_constant_is_positive_below_critical((a, b, n) in admissible()) {
        let l = li_const(a, b, n).unwrap();
        prop_assert!(l > 0.0);
        prop_assert!(li_const(a, n as f64 - a, n).unwrap() == 0.0);
    }

    #[test]
    fn angular_kernel_symmetry_and_scaling(
        r in 0.01f64..10.0, s in 0.01f64..10.0, lam in 0.1f64..10.0, a in 0.1f64..1.9, n in 1u32..6,
    ) {
        prop_assume!((r - s).abs() > 1e-6 * r.max(s));
        let k = angular_kernel(r, s, a, n).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!((k - angular_kernel(s, r, a, n).unwrap()).abs() <= 1e-13 * k);
        let scaled = angular_kernel(lam * r, lam * s, a, n).unwrap();
        // rounding lam * r and lam * s perturbs r - s by about eps * r
        let condition = 1.0 + (n as f64 + a) * r.max(s) / (r - s).abs();
        prop_assert!((scaled - lam.powf(-(n as f64 + a)) * k).abs() <= 1e-13 * condition * scaled);
    }

    #[test]
    fn weighted_norm_is_quadratic(c in -3.0f64..3.0, s in -0.5f64..2.0, n in 1u32..5) {
        prop_assume!(c.abs() > 1e-3);
        let base = RadialProfile::gaussian_poly(vec![1.0, 0.0, 0.5]).unwrap();
        let scaled = RadialProfile::gaussian_poly(vec![c, 0.0, 0.5 * c]).unwrap();
        let w0 = weighted_norm(&base, s, n).unwrap();
        let w1 = weighted_norm(&scaled, s, n).unwrap();
        prop_assert!((w1 - c * c * w0).abs() <= 1e-12 * w1);
    }

    #[test]
    fn report_verdict_is_rederivable(
        lhs in -10.0f64..10.0, rhs in -10.0f64..10.0, tol in 0.0f64..0.5, abs_tol in 0.0f64..1.0,
        rel in 0usize..3, extra in proptest::option::of((-1.0f64..1.0, -1.0f64..1.0)),
    ) {
        let relation = [Relation::Agree, Relation::AtLeast, Relation::Above][rel];
        let conditions: Vec<Condition> = extra
            .map(|(x, y)| vec![Condition::at_least("extra", x, y, 0.1)])
            .unwrap_or_default();
        let params = ReportParams { a: Some(1.0), b: Some(1.0), n: 3, profile: None, spec: None };
        let r = VerificationReport::new(
            "property", params, Side::exact(lhs, "x"), Side::exact(rhs, "y"),
            relation, tol, abs_tol, conditions, Vec::new(), Instant::now(),
        );
        prop_assert_eq!(r.passed, r.verdict());
        let expected = match relation {
            Relation::Agree => r.rel_discrepancy <= tol || r.abs_discrepancy <= abs_tol,
            Relation::AtLeast => lhs >= rhs - abs_tol,
            Relation::Above => lhs - rhs > abs_tol,
        } && r.conditions.iter().all(|c| c.satisfied);
        prop_assert_eq!(r.passed, expected);
        let back: VerificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn sampled_interpolation_reproduces_cubics_in_log_radius(
        c in proptest::array::uniform4(-1.0f64..1.0), rho in 0.011f64..99.0,
    ) {
        let f = |x: f64| { let t = x.ln(); c[0] + t * (c[1] + t * (c[2] + t * c[3])) };
        let nodes: Vec<f64> = (0..41).map(|i| 10f64.powf(-2.0 + 0.1 * i as f64)).collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        let s = SampledProfile::new(nodes, values, 3).unwrap();
        prop_assert!((s.interpolate(rho).unwrap() - f(rho)).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fractional_form_is_nonnegative(
        c0 in -2.0f64..2.0, c2 in -2.0f64..2.0, a in 0.2f64..1.8, n in 1u32..4,
    ) {
        prop_assume!(c0.abs() + c2.abs() > 1e-2);
        let p = RadialProfile::gaussian_poly(vec![c0, 0.0, c2]).unwrap();
        let f = fractional_form(&p, a, n, &QuadratureSpec::default()).unwrap();
        prop_assert!(f.value > -f.error_estimate);
    }

    #[test]
    fn jordan_form_positive_on_random_even_profiles(
        c0 in -2.0f64..2.0, c2 in -2.0f64..2.0, c4 in -2.0f64..2.0, (a, b, n) in admissible(),
    ) {
        prop_assume!(c0.abs() + c2.abs() + c4.abs() > 1e-2);
        prop_assume!(a > 0.0 && b > 0.0);
        let t = ExponentTriple::new(a, b, n).unwrap();
        let p = RadialProfile::gaussian_poly(vec![c0, 0.0, c2, 0.0, c4]).unwrap();
        let j = fracjordan::quadforms::jordan_form(&p, &t, &QuadratureSpec::default()).unwrap();
        prop_assert!(j.value > -j.error_estimate, "{j:?}");
    }
}
