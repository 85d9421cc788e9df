//! Norms of the linear polynomial `1 + b z` in `L^e(S^1, nu_m)` and the
//! hypercontractive inequality `||1 + r b z||_q <= ||1 + b z||_p` for all `b`.
//!
//! `nu_m = c_m |sin theta|^m dtheta` for `m > -1`; `m = -1` is the two-point
//! measure `(delta_{-1} + delta_1) / 2`, handled in closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{abs, powf, sin, sqrt};
use crate::quadrature::{adaptive_lebesgue, Integrator};
use crate::spherical_means::{reduced_mean, sphere_mean_of};
use crate::{Error, Result, VerifyReport};

/// Number of points of the default `b` grid.
pub const DEFAULT_B_POINTS: usize = 120;
/// Range of the default `b` grid (log-spaced).
pub const DEFAULT_B_RANGE: (f64, f64) = (1e-3, 1e3);
/// Points of the coarse `r` scan used when `q < 1`.
const QUASI_NORM_SCAN_POINTS: usize = 64;

/// The measure `nu_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltrasphericalMeasure {
    m: f64,
}

impl UltrasphericalMeasure {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= -1.0 && m.is_finite()) {
            return Err(Error::domain("ultraspherical index m must be >= -1", m));
        }
        Ok(UltrasphericalMeasure { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn is_two_point(&self) -> bool {
        self.m == -1.0
    }

    /// Index of the reduced measure `mu_{m/2}` on `[-1, 1]`.
    pub fn lambda(&self) -> f64 {
        0.5 * self.m
    }

    /// `||1 + b z||_{L^e(nu_m)}`.
    pub fn norm(&self, integ: &Integrator, exponent: f64, b: f64) -> Result<f64> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::domain("norm exponent must be positive", exponent));
        }
        if !b.is_finite() {
            return Err(Error::domain("coefficient b must be finite", b));
        }
        if b == 0.0 {
            return Ok(1.0);
        }
        if self.is_two_point() {
            let mean = 0.5 * (powf(abs(1.0 + b), exponent) + powf(abs(1.0 - b), exponent));
            return Ok(powf(mean, 1.0 / exponent));
        }
        // nu_m is even, so only |b| matters
        let mean = reduced_mean(integ, self.lambda(), exponent, abs(b), 1.0)?;
        Ok(powf(mean, 1.0 / exponent))
    }
}

/// `||1 + b z||_{L^exponent(S^1, nu_m)}`.
pub fn nu_norm(integ: &Integrator, m: f64, exponent: f64, b: f64) -> Result<f64> {
    UltrasphericalMeasure::new(m)?.norm(integ, exponent, b)
}

/// The same norm integrated over the angle,
/// `(2 c_m int_0^pi sin^m(theta) |1 + b e^{i theta}|^e dtheta)^(1/e)`, for `m >= 0`.
///
/// This route never touches the `t = cos theta` reduction or the Gauss rules.
pub fn nu_norm_by_angle(m: f64, exponent: f64, b: f64, tol: f64) -> Result<f64> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::domain("angle route needs m >= 0", m));
    }
    if !(exponent > 0.0) {
        return Err(Error::domain("norm exponent must be positive", exponent));
    }
    let norm = 2.0 * crate::specfun::c_m(m)?;
    let half = 0.5 * exponent;
    let integrand = |theta: f64| {
        // |1 + b e^{i theta}|^2, from whichever half-angle form is accurate
        let base = if theta < 0.5 * PI {
            let s = sin(0.5 * theta);
            (1.0 + b) * (1.0 + b) - 4.0 * b * s * s
        } else {
            let c = sin(0.5 * (PI - theta));
            (1.0 - b) * (1.0 - b) + 4.0 * b * c * c
        };
        norm * crate::math::pow_nonneg(sin(theta), m) * crate::math::pow_nonneg(base, half)
    };
    // split where the integrand may kink: theta = pi/2 (formula switch) only
    let left = adaptive_lebesgue(integrand, 0.0, 0.5 * PI, 0.5 * tol)?;
    let right = adaptive_lebesgue(integrand, 0.5 * PI, PI, 0.5 * tol)?;
    Ok(powf(left + right, 1.0 / exponent))
}

/// `|sphere_mean(n, p, a, 1)^(1/p) - ||1 + a z||_{L^p(nu_{n-2})}|`, with the
/// circle side integrated over the angle.
pub fn sphere_circle_equivalence_check(integ: &Integrator, n: u32, p: f64, a: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain("exponent p must be positive", p));
    }
    let sphere = powf(sphere_mean_of(integ, n, p, a, 1.0)?, 1.0 / p);
    let circle = nu_norm_by_angle(n as f64 - 2.0, p, a, 1e-13)?;
    Ok(abs(sphere - circle))
}

/// `sqrt((p + m) / (q + m))`, the largest `r` compatible with `b -> 0`.
pub fn necessary_r(m: f64, p: f64, q: f64) -> Result<f64> {
    if !(p + m > 0.0) {
        return Err(Error::domain("necessary bound needs p + m > 0", p + m));
    }
    if !(q + m > 0.0) {
        return Err(Error::domain("necessary bound needs q + m > 0", q + m));
    }
    Ok(sqrt((p + m) / (q + m)))
}

/// Coefficient `C` in `||1 + b z||_p = 1 + C b^2 + o(b^2)`: `(m + p) / (2 (m + 2))`.
pub fn small_b_coefficient(m: f64, p: f64) -> Result<f64> {
    if !(m >= -1.0) {
        return Err(Error::domain("ultraspherical index m must be >= -1", m));
    }
    Ok((m + p) / (2.0 * (m + 2.0)))
}

/// A candidate `(m, p, q, r)` for the hypercontractive inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypTuple {
    pub m: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl HypTuple {
    pub fn new(m: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        UltrasphericalMeasure::new(m)?;
        if !(p > 0.0 && p <= q && q.is_finite()) {
            return Err(Error::argument("need 0 < p <= q < infinity"));
        }
        if !r.is_finite() {
            return Err(Error::domain("r must be finite", r));
        }
        Ok(HypTuple { m, p, q, r })
    }
}

/// The default `b` grid: 120 log-spaced points in `[1e-3, 1e3]`.
pub fn default_b_grid() -> Vec<f64> {
    let (lo, hi) = DEFAULT_B_RANGE;
    crate::grid::logspace(lo, hi, DEFAULT_B_POINTS).expect("static grid is valid")
}

/// `||1 + b z||_p - ||1 + r b z||_q` at one `b`.
pub fn hyp_margin(integ: &Integrator, t: &HypTuple, b: f64) -> Result<f64> {
    let measure = UltrasphericalMeasure::new(t.m)?;
    let b = abs(b);
    Ok(measure.norm(integ, t.p, b)? - measure.norm(integ, t.q, abs(t.r) * b)?)
}

/// Margin of the second-order coefficients, `C(m, p) - r^2 C(m, q)`.
fn small_b_margin(t: &HypTuple) -> Result<f64> {
    Ok(small_b_coefficient(t.m, t.p)? - t.r * t.r * small_b_coefficient(t.m, t.q)?)
}

/// Checks the hypercontractive inequality on `b_grid` (only `|b|` and `|r|`
/// matter), plus the analytic `b -> 0` coefficient comparison (witness 0)
/// and the `b -> infinity` limit `1 - |r| >= 0` (witness `+inf`).
pub fn check_hyp(
    integ: &Integrator,
    t: &HypTuple,
    b_grid: &[f64],
    tolerance: f64,
) -> Result<VerifyReport> {
    if b_grid.is_empty() {
        return Err(Error::argument("b-grid is empty"));
    }
    let mut margins = Vec::with_capacity(b_grid.len() + 2);
    margins.push((0.0, small_b_margin(t)?));
    for &b in b_grid {
        margins.push((abs(b), hyp_margin(integ, t, b)?));
    }
    margins.push((f64::INFINITY, 1.0 - abs(t.r)));
    Ok(VerifyReport::from_margins(margins, tolerance, integ.order()))
}

/// Short-circuiting form of [`check_hyp`] used as the bisection predicate.
pub fn hyp_holds(integ: &Integrator, t: &HypTuple, b_grid: &[f64], tolerance: f64) -> Result<bool> {
    if small_b_margin(t)? < -tolerance || 1.0 - abs(t.r) < -tolerance {
        return Ok(false);
    }
    for &b in b_grid {
        if !(hyp_margin(integ, t, b)? >= -tolerance) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `r in [0, 1]` (to within `precision`) for which the
/// hypercontractive inequality holds on `b_grid`.
///
/// For `q >= 1` the norm is convex and even in `r`, so the predicate is
/// monotone and plain bisection is used; for `q < 1` a coarse scan locates
/// the first failure before bisecting.
pub fn r_star(
    integ: &Integrator,
    m: f64,
    p: f64,
    q: f64,
    precision: f64,
    b_grid: &[f64],
    tolerance: f64,
) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&precision) {
        return Err(Error::argument("precision must lie in [1e-6, 1e-2]"));
    }
    let holds = |r: f64| -> Result<bool> {
        hyp_holds(integ, &HypTuple::new(m, p, q, r)?, b_grid, tolerance)
    };
    if !holds(0.0)? {
        return Err(Error::Internal("hypercontractivity fails at r = 0"));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if q >= 1.0 {
        if holds(1.0)? {
            return Ok(1.0);
        }
    } else {
        let step = 1.0 / QUASI_NORM_SCAN_POINTS as f64;
        let mut failed = None;
        for k in 1..=QUASI_NORM_SCAN_POINTS {
            let r = (k as f64 * step).min(1.0);
            if !holds(r)? {
                failed = Some(r);
                break;
            }
            lo = r;
        }
        match failed {
            Some(r) => hi = r,
            None => return Ok(1.0),
        }
    }
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Evidence label for one scanned tuple. A ratio near 1 is consistent with
/// the necessary bound being sharp there; it is not a proof.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanStatus {
    ConsistentWithSharpness,
    BelowNecessaryBound,
    Failed(Error),
}

impl ScanStatus {
    pub fn label(&self) -> &'static str {
        match self {
            ScanStatus::ConsistentWithSharpness => "consistent with sharpness",
            ScanStatus::BelowNecessaryBound => "below necessary bound",
            ScanStatus::Failed(_) => "failed",
        }
    }
}

/// One row of [`scan_region`]. Numeric fields are NaN when the cell failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub m: f64,
    pub p: f64,
    pub q: f64,
    pub r_star: f64,
    pub necessary_r: f64,
    pub ratio: f64,
    pub status: ScanStatus,
}

/// Evaluates one `(m, p, q)` cell.
pub fn scan_cell(
    integ: &Integrator,
    m: f64,
    p: f64,
    q: f64,
    precision: f64,
    b_grid: &[f64],
    tolerance: f64,
) -> ScanRow {
    let outcome = necessary_r(m, p, q).and_then(|nec| {
        r_star(integ, m, p, q, precision, b_grid, tolerance).map(|rs| (rs, nec))
    });
    match outcome {
        Ok((rs, nec)) => {
            let ratio = rs / nec;
            let status = if rs >= nec - precision * (1.0 + 1e-9) {
                ScanStatus::ConsistentWithSharpness
            } else {
                ScanStatus::BelowNecessaryBound
            };
            ScanRow { m, p, q, r_star: rs, necessary_r: nec, ratio, status }
        }
        Err(e) => ScanRow {
            m,
            p,
            q,
            r_star: f64::NAN,
            necessary_r: f64::NAN,
            ratio: f64::NAN,
            status: ScanStatus::Failed(e),
        },
    }
}

/// The `(m, p, q)` cells of a scan in grid order, keeping only `p <= q`
/// and `p + m > 0`.
pub fn scan_cells(m_grid: &[f64], p_grid: &[f64], q_grid: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut cells = Vec::new();
    for &m in m_grid {
        for &p in p_grid {
            for &q in q_grid {
                if p <= q && p + m > 0.0 {
                    cells.push((m, p, q));
                }
            }
        }
    }
    cells
}

/// Sequential scan over the grid product; failed cells are recorded and the
/// scan continues.
pub fn scan_region(
    integ: &Integrator,
    m_grid: &[f64],
    p_grid: &[f64],
    q_grid: &[f64],
    precision: f64,
    b_grid: &[f64],
    tolerance: f64,
) -> Vec<ScanRow> {
    scan_cells(m_grid, p_grid, q_grid)
        .into_iter()
        .map(|(m, p, q)| scan_cell(integ, m, p, q, precision, b_grid, tolerance))
        .collect()
}

/// Second moment of `Re z` under `nu_m`, `c_m int cos^2 |sin|^m = 1 - c_m / c_{m+2}`.
pub fn second_moment(m: f64) -> Result<f64> {
    Ok(1.0 - crate::specfun::c_ratio(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let integ = Integrator::default();
        assert!((nu_norm(&integ, 0.0, 2.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((nu_norm(&integ, -1.0, 2.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(nu_norm(&integ, 1.0, 1.0, 0.0).unwrap(), 1.0);
        assert!(nu_norm(&integ, -1.5, 1.0, 0.5).is_err());
        assert!(nu_norm(&integ, 0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn evenness() {
        let integ = Integrator::default();
        for &(m, e, b) in &[(0.0, 1.0, 0.7), (2.5, 3.3, 4.0), (-1.0, 1.5, 0.2), (-0.5, 0.8, 1.0)] {
            let plus = nu_norm(&integ, m, e, b).unwrap();
            let minus = nu_norm(&integ, m, e, -b).unwrap();
            assert!((plus - minus).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_route_agrees() {
        let integ = Integrator::default();
        for &(m, e, b) in &[(0.0, 1.0, 0.5), (1.0, 1.7, 2.3), (3.0, 1.0, 1.0), (2.0, 6.0, 0.9)] {
            let t_route = nu_norm(&integ, m, e, b).unwrap();
            let angle = nu_norm_by_angle(m, e, b, 1e-13).unwrap();
            assert!((t_route - angle).abs() < 1e-10, "{m} {e} {b}: {t_route} vs {angle}");
        }
    }

    #[test]
    fn equivalence_examples() {
        let integ = Integrator::default();
        assert!(sphere_circle_equivalence_check(&integ, 3, 1.0, 0.5).unwrap() < 1e-9);
        assert!(sphere_circle_equivalence_check(&integ, 2, 2.0, 1.0).unwrap() < 1e-9);
        assert!(sphere_circle_equivalence_check(&integ, 5, 1.7, 2.3).unwrap() < 1e-9);
    }

    #[test]
    fn necessary_r_values() {
        assert!((necessary_r(0.0, 1.0, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((necessary_r(-1.0, 2.0, 4.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(necessary_r(1.3, 2.0, 2.0).unwrap(), 1.0);
        assert!(necessary_r(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn small_b_coefficients() {
        assert_eq!(small_b_coefficient(0.0, 2.0).unwrap(), 0.5);
        assert!((small_b_coefficient(-1.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(small_b_coefficient(2.0, 6.0).unwrap(), 1.0);
        let integ = Integrator::default();
        for &(m, p) in &[(2.0, 6.0), (0.0, 1.0), (-1.0, 2.5), (1.5, 0.7)] {
            let h = 1e-3;
            let fd = (nu_norm(&integ, m, p, h).unwrap() - 1.0) / (h * h);
            assert!((fd - small_b_coefficient(m, p).unwrap()).abs() < 1e-5, "{m} {p}: {fd}");
        }
    }

    #[test]
    fn check_hyp_examples() {
        let integ = Integrator::default();
        let grid = default_b_grid();
        let zero = HypTuple::new(1.0, 1.5, 3.0, 0.0).unwrap();
        assert!(check_hyp(&integ, &zero, &grid, 1e-9).unwrap().pass);
        let weissler = HypTuple::new(0.0, 1.0, 2.0, 0.5f64.sqrt()).unwrap();
        assert!(check_hyp(&integ, &weissler, &grid, 1e-9).unwrap().pass);
        let over = HypTuple::new(0.0, 1.0, 2.0, 0.75).unwrap();
        let r = check_hyp(&integ, &over, &grid, 1e-9).unwrap();
        assert!(!r.pass);
        assert!(r.witness < 1e-2, "witness {}", r.witness);
        assert!(HypTuple::new(0.0, 2.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn r_star_two_point_and_identity() {
        let integ = Integrator::default();
        let grid = default_b_grid();
        let r = r_star(&integ, -1.0, 2.0, 4.0, 1e-4, &grid, 1e-9).unwrap();
        assert!((r - (1.0f64 / 3.0).sqrt()).abs() < 1e-3, "{r}");
        assert_eq!(r_star(&integ, 0.5, 3.0, 3.0, 1e-4, &grid, 1e-9).unwrap(), 1.0);
        assert!(r_star(&integ, 0.5, 3.0, 3.0, 0.5, &grid, 1e-9).is_err());
    }

    #[test]
    fn quasi_norm_scan_path() {
        let integ = Integrator::default();
        let grid = crate::grid::logspace(1e-3, 1e3, 40).unwrap();
        let r = r_star(&integ, 0.0, 0.5, 0.8, 1e-3, &grid, 1e-9).unwrap();
        let nec = necessary_r(0.0, 0.5, 0.8).unwrap();
        assert!(r <= nec + 1e-3 && r > 0.0);
    }

    #[test]
    fn scan_skips_and_records() {
        let integ = Integrator::default();
        let grid = crate::grid::logspace(1e-3, 1e3, 30).unwrap();
        let rows = scan_region(&integ, &[-1.0], &[1.0, 2.0, 3.0], &[2.0], 1e-3, &grid, 1e-9);
        // (p, q) = (3, 2) and p + m = 0 are skipped
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].p, 2.0);
        // evaluated directly, a p + m = 0 cell records the failure
        let row = scan_cell(&integ, -1.0, 1.0, 2.0, 1e-3, &grid, 1e-9);
        assert!(matches!(row.status, ScanStatus::Failed(_)));
        let rows = scan_region(&integ, &[0.0], &[2.0], &[2.0], 1e-3, &grid, 1e-9);
        assert_eq!(rows[0].ratio, 1.0);
        assert_eq!(rows[0].status, ScanStatus::ConsistentWithSharpness);
    }

    #[test]
    fn second_moment_matches_rule() {
        let integ = Integrator::default();
        for m in [0.0, 1.0, 4.5] {
            let rule_value = integ.mean(0.5 * m, |t| t * t).unwrap();
            assert!((second_moment(m).unwrap() - rule_value).abs() < 1e-13);
        }
    }
}
