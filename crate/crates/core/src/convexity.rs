//! The sharp sphere inequality
//! `int |x - a z|^p dsigma(z) >= (|x|^2 + lambda a^2)^(p/2)` for `p in (0, 2]`
//! with best constant `lambda = (n + p - 2) / n`, and the auxiliary bounds
//! used to establish it.

use alloc::vec::Vec;

use crate::math::{abs, exp, ln, ln_1p, powf, sqrt};
use crate::quadrature::{Integrator, LinearForm};
use crate::spherical_means::sphere_mean_of;
use crate::{Error, Result, VerifyReport};

/// Small radii used to extrapolate `lambda*(a)` to `a -> 0`.
pub const RICHARDSON_RADII: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn check_np(n: u32, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("dimension n must be at least 2", n as f64));
    }
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::domain("exponent p must lie in (0, 2]", p));
    }
    Ok(())
}

/// Parameters of one grid verification of the sphere inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremParams {
    pub n: u32,
    pub p: f64,
    pub lambda: f64,
    pub a_grid: Vec<f64>,
}

impl TheoremParams {
    pub fn new(n: u32, p: f64, lambda: f64, a_grid: Vec<f64>) -> Result<Self> {
        check_np(n, p)?;
        if !lambda.is_finite() {
            return Err(Error::domain("lambda must be finite", lambda));
        }
        if a_grid.is_empty() || a_grid.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::argument("a-grid must be nonempty, positive and finite"));
        }
        Ok(TheoremParams { n, p, lambda, a_grid })
    }
}

/// Numerical best constant over a radius grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestConstantResult {
    /// Minimum of `lambda*(a)` over the grid.
    pub value: f64,
    /// Grid radius attaining `value`.
    pub argmin: f64,
    /// Richardson extrapolation of `lambda*(a)` to `a -> 0`.
    pub limit_at_zero: f64,
    /// Resolution of the estimate: the extrapolation error estimate or the
    /// gap between the smallest-radius grid value and the limit, whichever
    /// is larger.
    pub tolerance: f64,
}

/// `(n + p - 2) / n`.
pub fn sharp_lambda(n: u32, p: f64) -> Result<f64> {
    check_np(n, p)?;
    Ok((n as f64 + p - 2.0) / n as f64)
}

/// `sphere_mean(n, p, a, 1) - (1 + lambda a^2)^(p/2)`.
pub fn theorem_margin(integ: &Integrator, n: u32, p: f64, lambda: f64, a: f64) -> Result<f64> {
    let lhs = sphere_mean_of(integ, n, p, a, 1.0)?;
    Ok(lhs - powf(1.0 + lambda * a * a, 0.5 * p))
}

/// Grid check of the sphere inequality at `|x| = 1`. Grid points that fail
/// are recomputed at doubled rule order before the verdict is formed.
pub fn verify_theorem(
    integ: &Integrator,
    params: &TheoremParams,
    tolerance: f64,
) -> Result<VerifyReport> {
    let TheoremParams { n, p, lambda, ref a_grid } = *params;
    let mut margins = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        margins.push((a, theorem_margin(integ, n, p, lambda, a)?));
    }
    let mut order = integ.order();
    if margins.iter().any(|&(_, m)| !(m >= -tolerance)) {
        let fine = integ.doubled();
        order = fine.order();
        for entry in margins.iter_mut() {
            if !(entry.1 >= -tolerance) {
                entry.1 = theorem_margin(&fine, n, p, lambda, entry.0)?;
            }
        }
    }
    Ok(VerifyReport::from_margins(margins, tolerance, order))
}

/// `sphere_mean(n, p, a, 1) - 1`, without cancellation for small `a`.
fn sphere_mean_excess(integ: &Integrator, n: u32, p: f64, a: f64) -> Result<f64> {
    if a >= 0.5 {
        return Ok(sphere_mean_of(integ, n, p, a, 1.0)? - 1.0);
    }
    let lambda = 0.5 * (n as f64 - 2.0);
    let half = 0.5 * p;
    let form = LinearForm::new((1.0 + a) * (1.0 + a), (1.0 - a) * (1.0 - a));
    integ.mean_of_form(lambda, form, true, |x, _| {
        // (1 - 2 a t + a^2)^(p/2) - 1
        let u = a * (a - 2.0 * x.t);
        libm::expm1(half * ln_1p(u))
    })
}

/// Largest lambda admissible at radius `a`: `((I(a))^(2/p) - 1) / a^2`.
pub fn lambda_star(integ: &Integrator, n: u32, p: f64, a: f64) -> Result<f64> {
    check_np(n, p)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("radius must be positive", a));
    }
    let excess = sphere_mean_excess(integ, n, p, a)?;
    Ok(libm::expm1((2.0 / p) * ln_1p(excess)) / (a * a))
}

/// Two-level Richardson extrapolation of `lambda*(a)` (even in `a`) to `a = 0`
/// from the radii in [`RICHARDSON_RADII`]; returns `(limit, error estimate)`.
pub fn lambda_star_limit(integ: &Integrator, n: u32, p: f64) -> Result<(f64, f64)> {
    let [a1, a2, a3] = RICHARDSON_RADII;
    let l1 = lambda_star(integ, n, p, a1)?;
    let l2 = lambda_star(integ, n, p, a2)?;
    let l3 = lambda_star(integ, n, p, a3)?;
    // halving a divides the a^2 error term by 4 and the a^4 term by 16
    let r12 = (4.0 * l2 - l1) / 3.0;
    let r23 = (4.0 * l3 - l2) / 3.0;
    let limit = (16.0 * r23 - r12) / 15.0;
    Ok((limit, abs(limit - r23)))
}

/// Inverts the inequality on `a_grid`; the grid must reach down to `1e-3`
/// and up to `10`.
pub fn best_lambda(integ: &Integrator, n: u32, p: f64, a_grid: &[f64]) -> Result<BestConstantResult> {
    check_np(n, p)?;
    let lo = a_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = a_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if a_grid.is_empty() || !(lo > 0.0) || lo > 1e-3 * (1.0 + 1e-12) || hi < 10.0 * (1.0 - 1e-12) {
        return Err(Error::argument("a-grid must be positive and span at least [1e-3, 10]"));
    }
    let mut value = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut at_smallest = f64::NAN;
    for &a in a_grid {
        let l = lambda_star(integ, n, p, a)?;
        if a == lo {
            at_smallest = l;
        }
        if l < value {
            value = l;
            argmin = a;
        }
    }
    let (limit_at_zero, extrapolation_err) = lambda_star_limit(integ, n, p)?;
    let tolerance = extrapolation_err.max(abs(at_smallest - limit_at_zero)).max(1e-12);
    Ok(BestConstantResult { value, argmin, limit_at_zero, tolerance })
}

fn check_small_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain("exponent p must lie in (0, 1]", p));
    }
    Ok(())
}

/// `1 + p (p + 1) int_0^a int_0^t t^{-2} u^2 max(1, u)^{p-2} du dt`, in closed form.
pub fn n3_bound(p: f64, a: f64) -> Result<f64> {
    check_small_p(p)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain("radius must be finite and nonnegative", a));
    }
    if a <= 1.0 {
        Ok(1.0 + p * (p + 1.0) * a * a / 6.0)
    } else {
        Ok(powf(a, p) + p * (2.0 - p) / (3.0 * a) + (p - 1.0) * p / 2.0)
    }
}

/// `(1 + (p + 1) a^2 / 3)^(p/2)`, the n = 3 target of the sphere inequality.
pub fn n3_target(p: f64, a: f64) -> f64 {
    powf(1.0 + (p + 1.0) * a * a / 3.0, 0.5 * p)
}

/// `t^(p/2) + p (2 - p) / (3 sqrt t) - p (1 - p) / 2 - (1 + (p + 1) t / 3)^(p/2)`.
pub fn phi(p: f64, t: f64) -> Result<f64> {
    check_small_p(p)?;
    if !(t > 0.0) {
        return Err(Error::domain("phi needs t > 0", t));
    }
    Ok(powf(t, 0.5 * p) + p * (2.0 - p) / (3.0 * sqrt(t))
        - p * (1.0 - p) / 2.0
        - powf(1.0 + (p + 1.0) * t / 3.0, 0.5 * p))
}

/// Right end `3 / (2 - p)` of the interval on which `phi` is used.
pub fn phi_upper_end(p: f64) -> f64 {
    3.0 / (2.0 - p)
}

/// Second-order Taylor lower bound for `h(a, 1) = sphere_mean(n, p - 2, a, 1)`:
/// `(1 + a^2)^(p/2 - 1) (1 + (4 - p)(2 - p) a^2 / (2 n (1 + a^2)^2))`.
///
/// With `zeta = 2 - p` this is `(1+a^2)^(-zeta/2)` plus the `cosh s >= 1 + s^2/2`
/// correction `2 a^2 Gamma(zeta/2 + 2) / (n Gamma(zeta/2)) (1+a^2)^(-zeta/2-2)`.
pub fn psi(n: u32, p: f64, a: f64) -> f64 {
    let s = 1.0 + a * a;
    powf(s, 0.5 * p - 1.0) * (1.0 + (4.0 - p) * (2.0 - p) * a * a / (2.0 * n as f64 * s * s))
}

/// `x^q (1 - y + q (1 - x)(x - y))`.
pub fn ee6_left_factor(q: f64, x: f64, y: f64) -> f64 {
    crate::math::pow_nonneg(x, q) * (1.0 - y + q * (1.0 - x) * (x - y))
}

/// `x^q (1 - y + q (1 - x)(x - y)) - (1 - y - (1 - y^2)(1 - x))`.
pub fn ee6_margin(q: f64, x: f64, y: f64) -> f64 {
    ee6_left_factor(q, x, y) - (1.0 - y - (1.0 - y * y) * (1.0 - x))
}

/// `x^q - (1 - y - (1 - y^2)(1 - x)) / (1 - y + q (1 - x)(x - y))`.
pub fn ee6_ratio_gap(q: f64, x: f64, y: f64) -> f64 {
    crate::math::pow_nonneg(x, q)
        - (1.0 - y - (1.0 - y * y) * (1.0 - x)) / (1.0 - y + q * (1.0 - x) * (x - y))
}

/// `phi(t) >= 0` on `[1 + 1e-6, 3/(2-p) - 1e-6]` sampled at `count` points.
pub fn verify_phi_nonnegative(p: f64, count: usize, tolerance: f64) -> Result<VerifyReport> {
    check_small_p(p)?;
    let ts = crate::grid::linspace(1.0 + 1e-6, phi_upper_end(p) - 1e-6, count)?;
    let mut margins = Vec::with_capacity(ts.len());
    for t in ts {
        margins.push((t, phi(p, t)?));
    }
    Ok(VerifyReport::from_margins(margins, tolerance, 0))
}

/// `sphere_mean(3, p, a, 1) >= n3_bound(p, a)` on `a_grid`.
pub fn verify_n3_bound(
    integ: &Integrator,
    p: f64,
    a_grid: &[f64],
    tolerance: f64,
) -> Result<VerifyReport> {
    check_small_p(p)?;
    let mut margins = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        margins.push((a, sphere_mean_of(integ, 3, p, a, 1.0)? - n3_bound(p, a)?));
    }
    Ok(VerifyReport::from_margins(margins, tolerance, integ.order()))
}

/// The n = 3 chain: `n3_bound >= (1 + (p+1) a^2 / 3)^(p/2)` for
/// `a^2 < 3/(2-p)`, and `sphere_mean(3, p, a, 1) >= a^p` beyond.
pub fn verify_n3_chain(
    integ: &Integrator,
    p: f64,
    a_grid: &[f64],
    tolerance: f64,
) -> Result<VerifyReport> {
    check_small_p(p)?;
    let cut = phi_upper_end(p);
    let mut margins = Vec::with_capacity(2 * a_grid.len());
    for &a in a_grid {
        if a * a < cut {
            margins.push((a, n3_bound(p, a)? - n3_target(p, a)));
        } else {
            margins.push((a, sphere_mean_of(integ, 3, p, a, 1.0)? - powf(a, p)));
            margins.push((a, powf(a, p) - n3_target(p, a)));
        }
    }
    Ok(VerifyReport::from_margins(margins, tolerance, integ.order()))
}

/// `psi(n, p, a) <= sphere_mean(n, p - 2, a, 1)` on `a_grid`.
pub fn verify_psi_lower_bound(
    integ: &Integrator,
    n: u32,
    p: f64,
    a_grid: &[f64],
    tolerance: f64,
) -> Result<VerifyReport> {
    check_np(n, p)?;
    let mut margins = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        margins.push((a, sphere_mean_of(integ, n, p - 2.0, a, 1.0)? - psi(n, p, a)));
    }
    Ok(VerifyReport::from_margins(margins, tolerance, integ.order()))
}

/// Worst point of a three-parameter grid check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ee6Witness {
    pub q: f64,
    pub x: f64,
    pub y: f64,
}

/// `ee6_margin >= 0` on `{1/2 <= y <= x <= 1}` (a `points x points` lattice)
/// for every `q` in `q_grid`. The report's `witness` is the worst `x`.
pub fn verify_ee6_region(
    q_grid: &[f64],
    points: usize,
    tolerance: f64,
) -> Result<(VerifyReport, Ee6Witness)> {
    let lattice = crate::grid::linspace(0.5, 1.0, points)?;
    let mut worst = Ee6Witness { q: f64::NAN, x: f64::NAN, y: f64::NAN };
    let mut worst_margin = f64::INFINITY;
    let mut margins = Vec::new();
    for &q in q_grid {
        for &y in &lattice {
            for &x in lattice.iter().filter(|&&x| x >= y) {
                let m = ee6_margin(q, x, y);
                if m < worst_margin {
                    worst_margin = m;
                    worst = Ee6Witness { q, x, y };
                }
                margins.push((x, m));
            }
        }
    }
    Ok((VerifyReport::from_margins(margins, tolerance, 0), worst))
}

/// `q -> ee6_left_factor(q, x, y)` is nonincreasing along `q_grid`
/// (sorted ascending) for every lattice point with `1/2 <= y <= x <= 1`.
pub fn verify_ee6_monotone_in_q(q_grid: &[f64], points: usize, tolerance: f64) -> Result<VerifyReport> {
    if q_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::argument("q-grid must be strictly increasing"));
    }
    let lattice = crate::grid::linspace(0.5, 1.0, points)?;
    let mut margins = Vec::new();
    for &y in &lattice {
        for &x in lattice.iter().filter(|&&x| x >= y) {
            for w in q_grid.windows(2) {
                margins.push((x, ee6_left_factor(w[0], x, y) - ee6_left_factor(w[1], x, y)));
            }
        }
    }
    Ok(VerifyReport::from_margins(margins, tolerance, 0))
}

/// ln of the Gamma-ratio `Gamma(zeta/2 + 2) / Gamma(zeta/2)` = `ln((zeta/2)(zeta/2 + 1))`.
pub fn psi_gamma_ratio(zeta: f64) -> Result<f64> {
    let h = 0.5 * zeta;
    let v = crate::specfun::ln_gamma(h + 2.0)? - crate::specfun::ln_gamma(h)?;
    Ok(exp(v))
}

/// `psi` rebuilt from its Gamma-function form, for cross-checking [`psi`].
pub fn psi_from_gamma(n: u32, p: f64, a: f64) -> Result<f64> {
    let zeta = 2.0 - p;
    if !(zeta > 0.0) {
        return Err(Error::domain("Gamma form needs p < 2", p));
    }
    let s = 1.0 + a * a;
    let base = exp(-0.5 * zeta * ln(s));
    let correction = 2.0 * a * a * psi_gamma_ratio(zeta)? / n as f64 * exp((-0.5 * zeta - 2.0) * ln(s));
    Ok(base + correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::logspace;

    #[test]
    fn sharp_lambda_values() {
        assert_eq!(sharp_lambda(2, 1.0).unwrap(), 0.5);
        assert_eq!(sharp_lambda(2, 2.0).unwrap(), 1.0);
        assert!((sharp_lambda(3, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(sharp_lambda(3, 0.0).is_err());
        assert!(sharp_lambda(3, 2.5).is_err());
    }

    #[test]
    fn theorem_examples() {
        let integ = Integrator::default();
        let m = theorem_margin(&integ, 2, 1.0, 0.5, 1.0).unwrap();
        assert!((m - (4.0 / core::f64::consts::PI - 1.5f64.sqrt())).abs() < 1e-10);
        for a in [0.01, 0.7, 3.0, 40.0] {
            assert!(theorem_margin(&integ, 5, 2.0, 1.0, a).unwrap().abs() < 1e-10);
        }
        let grid = logspace(1e-3, 1.0, 60).unwrap();
        let params = TheoremParams::new(2, 1.0, 0.55, grid).unwrap();
        let r = verify_theorem(&integ, &params, 1e-9).unwrap();
        assert!(!r.pass);
        assert!(r.witness > 0.0);
        // the violation already shows at the smallest radius
        assert!(theorem_margin(&integ, 2, 1.0, 0.55, 1e-2).unwrap() < -1e-9);
    }

    #[test]
    fn best_lambda_examples() {
        let integ = Integrator::default();
        let grid = logspace(1e-3, 10.0, 40).unwrap();
        let r = best_lambda(&integ, 2, 1.0, &grid).unwrap();
        assert!((r.limit_at_zero - 0.5).abs() < 1e-4);
        assert!(r.value <= r.limit_at_zero + r.tolerance);
        let r = best_lambda(&integ, 4, 2.0, &grid).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9 && (r.limit_at_zero - 1.0).abs() < 1e-9);
        let r = best_lambda(&integ, 3, 1.0, &grid).unwrap();
        assert!((r.limit_at_zero - 2.0 / 3.0).abs() < 1e-4);
        assert!(best_lambda(&integ, 3, 1.0, &[0.1, 10.0]).is_err());
    }

    #[test]
    fn n3_bound_piecewise() {
        assert_eq!(n3_bound(0.5, 0.0).unwrap(), 1.0);
        for p in [0.1, 0.5, 1.0] {
            let left = n3_bound(p, 1.0).unwrap();
            let right = n3_bound(p, 1.0 + 1e-12).unwrap();
            assert!((left - right).abs() < 1e-10);
        }
        assert!(n3_bound(1.5, 1.0).is_err());
    }

    #[test]
    fn phi_examples() {
        let v = phi(1.0, 1.0).unwrap();
        // 1 + 1/3 - (1 + 2/3)^{1/2}
        assert!((v - (4.0 / 3.0 - (5.0f64 / 3.0).sqrt())).abs() < 1e-14);
        for k in 1..=10 {
            let p = k as f64 / 10.0;
            assert!(phi(p, 1.0).unwrap() >= 0.0, "p = {p}");
        }
        assert!(phi(0.5, 0.0).is_err());
    }

    #[test]
    fn psi_examples() {
        for a in [0.0, 0.3, 2.0] {
            assert!((psi(5, 2.0, a) - 1.0).abs() < 1e-15);
        }
        let v = psi(4, 1.0, 1.0);
        assert!((v - 0.5f64.sqrt() * (1.0 + 3.0 / 32.0)).abs() < 1e-15);
        for (n, p, a) in [(4, 1.0, 1.0), (6, 0.3, 2.5), (3, 1.7, 0.2)] {
            assert!((psi_from_gamma(n, p, a).unwrap() - psi(n, p, a)).abs() < 1e-13);
        }
    }

    #[test]
    fn ee6_examples() {
        for q in [0.0, 0.5, 1.0] {
            for y in [0.5, 0.8] {
                assert!(ee6_margin(q, 1.0, y).abs() < 1e-15);
            }
        }
        let v = ee6_margin(2.0, 0.4, 0.3);
        assert!((v + 0.0228).abs() < 1e-14, "{v}");
        assert!((ee6_ratio_gap(2.0, 1.0, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn ee6_region_holds() {
        let qs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let (r, _) = verify_ee6_region(&qs, 40, 0.0).unwrap();
        assert!(r.pass, "{r:?}");
        let qs: Vec<f64> = (0..=20).map(|k| k as f64 / 10.0).collect();
        assert!(verify_ee6_monotone_in_q(&qs, 30, 1e-15).unwrap().pass);
    }
}
