use proptest::prelude::*;

use sharpconvex_core::convexity::{ee6_margin, ee6_ratio_gap, phi, phi_upper_end};
use sharpconvex_core::logsobolev::{entropy, LogSobParams};
use sharpconvex_core::spherical_means::sphere_mean_of;
use sharpconvex_core::ultraspherical::nu_norm;
use sharpconvex_core::Integrator;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_mean_exchange_symmetry(n in 2u32..8, beta in -0.9f64..3.0, a in 0.01f64..5.0, x in 0.01f64..5.0) {
        let integ = Integrator::default();
        let ax = sphere_mean_of(&integ, n, beta, a, x).unwrap();
        let xa = sphere_mean_of(&integ, n, beta, x, a).unwrap();
        prop_assert!(close(ax, xa, 1e-10), "{} vs {}", ax, xa);
    }

    #[test]
    fn sphere_mean_scaling(n in 2u32..8, beta in -0.9f64..3.0, a in 0.01f64..3.0, c in 0.1f64..10.0) {
        let integ = Integrator::default();
        let base = sphere_mean_of(&integ, n, beta, a, 1.0).unwrap();
        let scaled = sphere_mean_of(&integ, n, beta, c * a, c).unwrap();
        prop_assert!(close(scaled, c.powf(beta) * base, 1e-10));
    }

    #[test]
    fn ee6_margin_is_denominator_times_gap(q in 0.0f64..2.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let denom = 1.0 - y + q * (1.0 - x) * (x - y);
        prop_assume!(denom > 1e-3);
        prop_assert!((ee6_margin(q, x, y) - denom * ee6_ratio_gap(q, x, y)).abs() < 1e-13);
    }

    #[test]
    fn phi_nonnegative_on_interval(p in 0.05f64..1.0, s in 0.0f64..1.0) {
        let t = 1.0 + s * (phi_upper_end(p) - 1.0);
        prop_assert!(phi(p, t).unwrap() >= -1e-14);
    }

    #[test]
    fn nu_norm_even_in_b(m in -1.0f64..6.0, e in 0.2f64..8.0, b in 0.0f64..20.0) {
        let integ = Integrator::default();
        let plus = nu_norm(&integ, m, e, b).unwrap();
        let minus = nu_norm(&integ, m, e, -b).unwrap();
        prop_assert!(close(plus, minus, 1e-12));
    }

    #[test]
    fn nu_norm_monotone_in_r(m in -1.0f64..6.0, e in 1.0f64..8.0, b in 0.01f64..20.0, r in 0.0f64..0.99) {
        let integ = Integrator::default();
        let lo = nu_norm(&integ, m, e, r * b).unwrap();
        let hi = nu_norm(&integ, m, e, b).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn entropy_nonnegative(lambda in 0.0f64..6.0, s in 0.2f64..10.0, bt in 0.0f64..5.0) {
        let integ = Integrator::default();
        let params = LogSobParams::new(lambda, s, bt).unwrap();
        prop_assert!(entropy(&integ, &params).unwrap() >= -1e-12);
    }

    #[test]
    fn tail_and_cdf_sum_to_one(lambda in 0.0f64..6.0, u in -1.0f64..1.0) {
        let integ = Integrator::default();
        let total = integ.tail(lambda, u).unwrap() + integ.cdf(lambda, u).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
