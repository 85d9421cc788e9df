use sharpconvex_core::ultraspherical::{
    check_hyp, default_b_grid, hyp_margin, necessary_r, r_star, HypTuple,
};
use sharpconvex_core::Integrator;

const CASES: [(f64, f64, f64); 5] = [(-1.0, 2.0, 4.0), (0.0, 1.0, 2.0), (0.0, 2.0, 4.0), (1.0, 2.0, 8.0), (2.0, 4.0, 6.0)];

#[test]
fn two_point_bonami_constant() {
    // Bonami-Beckner on {-1, 1}: sqrt((p - 1) / (q - 1))
    assert!((necessary_r(-1.0, 2.0, 4.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((necessary_r(-1.0, 3.0, 5.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn holds_below_and_fails_above_necessary_r() {
    let integ = Integrator::default();
    let grid = default_b_grid();
    for (m, p, q) in CASES {
        let nec = necessary_r(m, p, q).unwrap();
        let below = check_hyp(&integ, &HypTuple::new(m, p, q, 0.97 * nec).unwrap(), &grid, 1e-9).unwrap();
        assert!(below.pass, "({m},{p},{q}) at 0.97 r_nec: {below:?}");
        // the violation shows up on the grid itself, not only in the analytic small-b term
        let above = HypTuple::new(m, p, q, 1.03 * nec).unwrap();
        let margin = hyp_margin(&integ, &above, 0.02).unwrap();
        assert!(margin < 0.0, "({m},{p},{q}) at 1.03 r_nec: margin {margin}");
    }
}

#[test]
fn r_star_brackets_necessary_r() {
    let integ = Integrator::default();
    let grid = default_b_grid();
    for (m, p, q) in CASES {
        let nec = necessary_r(m, p, q).unwrap();
        let r = r_star(&integ, m, p, q, 1e-3, &grid, 1e-9).unwrap();
        assert!((r - nec).abs() <= 2e-3, "({m},{p},{q}): r* {r} vs {nec}");
    }
}
