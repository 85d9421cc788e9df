//! The log-Sobolev chain for `g(t) = 1 + 2 b t + b^2` under `mu_lambda`:
//! entropy, the Mueller-Weissler bound, its rewritten form, the moment
//! inequality behind it, the measure comparison, and the sign structure of
//! the tail differences `h(u)` and `phi(r)`.
//!
//! Margins here are relative, `(rhs - lhs) / max(1, |lhs|, |rhs|)`, since both
//! sides grow like `(1 + b)^(2 s)`.

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::math::{abs, cos, ln, pow_nonneg, powf, sin, sqrt};
use crate::quadrature::{adaptive_lebesgue, Integrator, LinearForm};
use crate::{Error, Result, VerifyReport};

/// Default `lambda` grid.
pub const DEFAULT_LAMBDAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];
/// Default `s` grid (inside the regime `s > 3`).
pub const DEFAULT_S_VALUES: [f64; 5] = [3.01, 3.5, 4.0, 6.0, 10.0];
/// Default coefficient grid.
pub const DEFAULT_BTILDES: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0];

/// Sign threshold for tail differences.
const SIGN_NOISE: f64 = 1e-10;
/// Looser threshold separating genuine sign changes from quadrature noise.
const AMBIGUOUS_NOISE: f64 = 1e-7;
/// Step of the central differences of `h`.
const H_STEP: f64 = 1e-4;
/// `|h'|` below this counts as zero when locating its sign changes.
const H_PRIME_NOISE: f64 = 1e-7;

/// `(lambda, s, b)` with `g(t) = 1 + 2 b t + b^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSobParams {
    pub lambda: f64,
    pub s: f64,
    pub btilde: f64,
}

impl LogSobParams {
    pub fn new(lambda: f64, s: f64, btilde: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain("lambda must be finite and >= 0", lambda));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::domain("s must be finite and positive", s));
        }
        if !(btilde >= 0.0 && btilde.is_finite()) {
            return Err(Error::domain("coefficient must be finite and >= 0", btilde));
        }
        Ok(LogSobParams { lambda, s, btilde })
    }

    fn form(&self) -> LinearForm {
        affine_square(self.btilde)
    }
}

/// `1 + 2 b t + b^2` as a [`LinearForm`].
fn affine_square(b: f64) -> LinearForm {
    LinearForm::new((1.0 - b) * (1.0 - b), (1.0 + b) * (1.0 + b))
}

fn is_polynomial_power(e: f64) -> bool {
    e >= 0.0 && crate::math::fract(e) == 0.0
}

/// `int g^e w(t) dmu_lambda` for `g = 1 + 2 b t + b^2`.
fn power_moment<W: Fn(f64) -> f64>(
    integ: &Integrator,
    lambda: f64,
    b: f64,
    e: f64,
    w: W,
) -> Result<f64> {
    let form = affine_square(b);
    if form.root_clearance() == 0.0 && e + lambda - 0.5 <= -1.0 {
        return Err(Error::domain("power of g is not integrable", e));
    }
    integ.mean_of_form(lambda, form, is_polynomial_power(e), |x, g| pow_nonneg(g, e) * w(x.t))
}

fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / 1f64.max(abs(lhs)).max(abs(rhs))
}

/// `Ent(g^s) = int g^s ln g^s dmu_lambda - I ln I`, `I = int g^s dmu_lambda`.
pub fn entropy(integ: &Integrator, params: &LogSobParams) -> Result<f64> {
    let LogSobParams { lambda, s, btilde } = *params;
    if btilde == 0.0 {
        return Ok(0.0);
    }
    let total = power_moment(integ, lambda, btilde, s, |_| 1.0)?;
    let ln_total = ln(total);
    // G ln(G / I) - G + I >= 0 pointwise; it integrates to the entropy
    let ent = integ.mean_of_form(lambda, params.form(), false, |_, g| {
        if g <= 0.0 {
            return total;
        }
        let big = powf(g, s);
        big * (s * ln(g) - ln_total) - big + total
    })?;
    Ok(ent.max(0.0))
}

/// One-point report with `witness = btilde`.
fn single(params: &LogSobParams, margin: f64, integ: &Integrator, tol: f64) -> VerifyReport {
    VerifyReport::from_margins([(params.btilde, margin)], tol, integ.order())
}

/// Both sides of the Mueller-Weissler bound
/// `Ent <= s^2 / (4 (lambda + 1)) int (g')^2 g^(s-2) dmu_{lambda+1}`.
pub fn mw_sides(integ: &Integrator, params: &LogSobParams) -> Result<(f64, f64)> {
    let LogSobParams { lambda, s, btilde } = *params;
    let ent = entropy(integ, params)?;
    if btilde == 0.0 {
        return Ok((ent, 0.0));
    }
    let dirichlet = 4.0 * btilde * btilde * power_moment(integ, lambda + 1.0, btilde, s - 2.0, |_| 1.0)?;
    Ok((ent, s * s / (4.0 * (lambda + 1.0)) * dirichlet))
}

pub fn verify_mw(integ: &Integrator, params: &LogSobParams, tol: f64) -> Result<VerifyReport> {
    let (lhs, rhs) = mw_sides(integ, params)?;
    Ok(single(params, relative_margin(lhs, rhs), integ, tol))
}

fn require_s_above_one(params: &LogSobParams) -> Result<()> {
    if !(params.s > 1.0) {
        return Err(Error::domain("this inequality needs s > 1", params.s));
    }
    Ok(())
}

/// Both sides of `Ent <= s^2 / (s + lambda) int g^(s-1) (b t + b^2) dmu_lambda`.
pub fn log_ineq_sides(integ: &Integrator, params: &LogSobParams) -> Result<(f64, f64)> {
    require_s_above_one(params)?;
    let LogSobParams { lambda, s, btilde } = *params;
    let ent = entropy(integ, params)?;
    if btilde == 0.0 {
        return Ok((ent, 0.0));
    }
    let moment = power_moment(integ, lambda, btilde, s - 1.0, |t| btilde * t + btilde * btilde)?;
    Ok((ent, s * s / (s + lambda) * moment))
}

pub fn verify_log_ineq(integ: &Integrator, params: &LogSobParams, tol: f64) -> Result<VerifyReport> {
    let (lhs, rhs) = log_ineq_sides(integ, params)?;
    Ok(single(params, relative_margin(lhs, rhs), integ, tol))
}

/// Both sides of
/// `int g^(s-1) t dmu_lambda / (s - 1) <= int g^(s-1) (t + b) dmu_lambda / (s + lambda)`.
pub fn in02_sides(integ: &Integrator, params: &LogSobParams) -> Result<(f64, f64)> {
    require_s_above_one(params)?;
    let LogSobParams { lambda, s, btilde } = *params;
    if btilde == 0.0 {
        return Ok((0.0, 0.0));
    }
    let with_t = power_moment(integ, lambda, btilde, s - 1.0, |t| t)?;
    let plain = power_moment(integ, lambda, btilde, s - 1.0, |_| 1.0)?;
    Ok((with_t / (s - 1.0), (with_t + btilde * plain) / (s + lambda)))
}

pub fn verify_in02(integ: &Integrator, params: &LogSobParams, tol: f64) -> Result<VerifyReport> {
    let (lhs, rhs) = in02_sides(integ, params)?;
    Ok(single(params, relative_margin(lhs, rhs), integ, tol))
}

/// The integration by parts linking the two measures:
/// `(s - 1) / (4 (lambda + 1)) int (g')^2 g^(s-2) dmu_{lambda+1}` and
/// `b int g^(s-1) t dmu_lambda`. Returns both sides.
pub fn integration_by_parts_sides(integ: &Integrator, params: &LogSobParams) -> Result<(f64, f64)> {
    require_s_above_one(params)?;
    let LogSobParams { lambda, s, btilde } = *params;
    let shifted = power_moment(integ, lambda + 1.0, btilde, s - 2.0, |_| 1.0)?;
    let left = (s - 1.0) / (4.0 * (lambda + 1.0)) * 4.0 * btilde * btilde * shifted;
    let right = btilde * power_moment(integ, lambda, btilde, s - 1.0, |t| t)?;
    Ok((left, right))
}

/// Both sides of `int F^(s-1) dmu_lambda >= int F^(s-2) dmu_{lambda+1}`,
/// `F = 1 + 2 a t + a^2`, as `(lhs, rhs)`.
pub fn moment_comparison_sides(integ: &Integrator, lambda: f64, s: f64, a: f64) -> Result<(f64, f64)> {
    if !(lambda >= 0.0) {
        return Err(Error::domain("lambda must be >= 0", lambda));
    }
    if !(s >= 3.0 && s.is_finite()) {
        return Err(Error::domain("moment comparison needs s >= 3", s));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("moment comparison needs a > 0", a));
    }
    let lhs = power_moment(integ, lambda, a, s - 1.0, |_| 1.0)?;
    let rhs = power_moment(integ, lambda + 1.0, a, s - 2.0, |_| 1.0)?;
    Ok((lhs, rhs))
}

/// Checks the measure comparison at `a` and at `1 / a`; `a > 1` reduces to
/// `1 / a < 1` by homogeneity, so both points are reported.
pub fn verify_moment_comparison(
    integ: &Integrator,
    lambda: f64,
    s: f64,
    a: f64,
    tol: f64,
) -> Result<VerifyReport> {
    let mut margins = Vec::with_capacity(2);
    for point in [a, 1.0 / a] {
        let (lhs, rhs) = moment_comparison_sides(integ, lambda, s, point)?;
        // here the larger side is the left one
        margins.push((point, relative_margin(rhs, lhs)));
    }
    Ok(VerifyReport::from_margins(margins, tol, integ.order()))
}

/// `int F^(s-2) dmu_lambda - (1 + a^2)^(s-2)`, nonnegative by Jensen for `s >= 3`.
pub fn jensen_margin(integ: &Integrator, lambda: f64, s: f64, a: f64) -> Result<f64> {
    let mean = power_moment(integ, lambda, a, s - 2.0, |_| 1.0)?;
    Ok(mean - powf(1.0 + a * a, s - 2.0))
}

/// `(int (1 + 2 c t + c^2)^s dmu_lambda)^(1/s)` with `c = b / sqrt(s + lambda)`.
pub fn rescaled_norm(integ: &Integrator, lambda: f64, b: f64, s: f64) -> Result<f64> {
    if b == 0.0 {
        return Ok(1.0);
    }
    let c = abs(b) / sqrt(s + lambda);
    Ok(powf(power_moment(integ, lambda, c, s, |_| 1.0)?, 1.0 / s))
}

/// Checks that `s -> rescaled_norm(lambda, b, s)` is nonincreasing along an
/// increasing `s_grid` in `(3, inf)`; margin `N(s_i) - N(s_{i+1})`, witness `s_{i+1}`.
pub fn verify_norm_monotone_in_s(
    integ: &Integrator,
    lambda: f64,
    b: f64,
    s_grid: &[f64],
    tol: f64,
) -> Result<VerifyReport> {
    if s_grid.len() < 2 {
        return Err(Error::argument("s-grid needs at least two points"));
    }
    if s_grid.iter().any(|&s| !(s > 3.0)) || s_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::argument("s-grid must be increasing and inside (3, inf)"));
    }
    let values = s_grid
        .iter()
        .map(|&s| rescaled_norm(integ, lambda, b, s))
        .collect::<Result<Vec<_>>>()?;
    let margins = values
        .windows(2)
        .zip(&s_grid[1..])
        .map(|(w, &s)| (s, (w[0] - w[1]) / w[0].max(1.0)));
    Ok(VerifyReport::from_margins(margins, tol, integ.order()))
}

/// Margins of the chain at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRow {
    pub params: LogSobParams,
    pub entropy: f64,
    pub mw: f64,
    pub log_ineq: f64,
    pub in02: f64,
}

/// Grids for [`verify_chain_on_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogSobGrid {
    pub lambdas: Vec<f64>,
    pub s_values: Vec<f64>,
    pub btildes: Vec<f64>,
}

impl Default for LogSobGrid {
    fn default() -> Self {
        LogSobGrid {
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            s_values: DEFAULT_S_VALUES.to_vec(),
            btildes: DEFAULT_BTILDES.to_vec(),
        }
    }
}

impl LogSobGrid {
    pub fn points(&self) -> Result<Vec<LogSobParams>> {
        let mut out = Vec::new();
        for &lambda in &self.lambdas {
            for &s in &self.s_values {
                for &b in &self.btildes {
                    out.push(LogSobParams::new(lambda, s, b)?);
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates the three chain inequalities at one point.
pub fn chain_row(integ: &Integrator, params: &LogSobParams) -> Result<ChainRow> {
    let (ent, mw_rhs) = mw_sides(integ, params)?;
    let (_, log_rhs) = log_ineq_sides(integ, params)?;
    let (in_lhs, in_rhs) = in02_sides(integ, params)?;
    Ok(ChainRow {
        params: *params,
        entropy: ent,
        mw: relative_margin(ent, mw_rhs),
        log_ineq: relative_margin(ent, log_rhs),
        in02: relative_margin(in_lhs, in_rhs),
    })
}

/// Aggregate of the chain over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub mw: VerifyReport,
    pub log_ineq: VerifyReport,
    pub in02: VerifyReport,
    pub min_entropy: f64,
    /// Points where the Mueller-Weissler bound and the moment inequality
    /// pass but the rewritten bound does not.
    pub chain_violations: usize,
}

impl ChainSummary {
    pub fn pass(&self) -> bool {
        self.mw.pass && self.log_ineq.pass && self.in02.pass && self.chain_violations == 0
            && self.min_entropy >= 0.0
    }
}

/// Folds rows (in order) into a summary; witnesses are row indices.
pub fn summarize_chain(rows: &[ChainRow], tol: f64, quad_order: usize) -> ChainSummary {
    let pick = |f: fn(&ChainRow) -> f64| {
        VerifyReport::from_margins(
            rows.iter().enumerate().map(|(i, r)| (i as f64, f(r))),
            tol,
            quad_order,
        )
    };
    let chain_violations = rows
        .iter()
        .filter(|r| r.mw >= -tol && r.in02 >= -tol && !(r.log_ineq >= -tol))
        .count();
    ChainSummary {
        mw: pick(|r| r.mw),
        log_ineq: pick(|r| r.log_ineq),
        in02: pick(|r| r.in02),
        min_entropy: rows.iter().map(|r| r.entropy).fold(f64::INFINITY, f64::min),
        chain_violations,
    }
}

/// Sequential evaluation of the chain over `grid`.
pub fn verify_chain_on_grid(
    integ: &Integrator,
    grid: &LogSobGrid,
    tol: f64,
) -> Result<(Vec<ChainRow>, ChainSummary)> {
    let rows = grid
        .points()?
        .iter()
        .map(|p| chain_row(integ, p))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize_chain(&rows, tol, integ.order());
    Ok((rows, summary))
}

/// `h(u) = mu_lambda(t > u) - mu_{lambda+1}(t > u)`.
pub fn h(integ: &Integrator, lambda: f64, u: f64) -> Result<f64> {
    Ok(integ.tail(lambda, u)? - integ.tail(lambda + 1.0, u)?)
}

/// What [`h_structure`] found.
#[derive(Debug, Clone, PartialEq)]
pub struct HStructureReport {
    pub lambda: f64,
    /// `max |h|` over `u in {-1, 0, 1}`.
    pub zero_residual: f64,
    /// `-h` on `u <= 0`, `h` on `u >= 0`.
    pub sign: VerifyReport,
    /// `max |h(u) + h(-u)|` over the grid.
    pub antisymmetry: f64,
    /// `max |tail + cdf - 1|` over the grid, for both measures.
    pub tail_route_discrepancy: f64,
    /// Estimated sign changes of `h'`.
    pub derivative_sign_changes: Vec<f64>,
    /// `sqrt(1 / (2 (lambda + 1)))`.
    pub expected_root: f64,
    pub derivative_ok: bool,
    pub pass: bool,
}

/// Default `u` grid: 201 equispaced points on `[-1, 1]`.
pub fn default_u_grid() -> Vec<f64> {
    crate::grid::linspace(-1.0, 1.0, 201).expect("static grid is valid")
}

/// Checks zeros, sign pattern, antisymmetry and the turning points of `h`.
pub fn h_structure(integ: &Integrator, lambda: f64, u_grid: &[f64]) -> Result<HStructureReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be finite and >= 0", lambda));
    }
    if u_grid.len() < 2 || u_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::argument("u-grid must be increasing with at least two points"));
    }
    if u_grid.iter().any(|u| abs(*u) > 1.0) {
        return Err(Error::argument("u-grid must lie in [-1, 1]"));
    }
    let mut zero_residual: f64 = 0.0;
    for u in [-1.0, 0.0, 1.0] {
        zero_residual = zero_residual.max(abs(h(integ, lambda, u)?));
    }
    let mut margins = Vec::with_capacity(u_grid.len());
    let mut antisymmetry: f64 = 0.0;
    let mut discrepancy: f64 = 0.0;
    for &u in u_grid {
        let value = h(integ, lambda, u)?;
        margins.push((u, if u <= 0.0 { -value } else { value }));
        antisymmetry = antisymmetry.max(abs(value + h(integ, lambda, -u)?));
        for l in [lambda, lambda + 1.0] {
            discrepancy = discrepancy.max(abs(integ.tail(l, u)? + integ.cdf(l, u)? - 1.0));
        }
    }
    let sign = VerifyReport::from_margins(margins, SIGN_NOISE, integ.order());

    // h' by central differences away from the endpoints
    let mut derivative = Vec::new();
    for &u in u_grid {
        if abs(u) > 1.0 - 2.0 * H_STEP {
            continue;
        }
        let d = (h(integ, lambda, u + H_STEP)? - h(integ, lambda, u - H_STEP)?) / (2.0 * H_STEP);
        if abs(d) > H_PRIME_NOISE {
            derivative.push((u, d));
        }
    }
    let mut changes = Vec::new();
    let mut brackets = Vec::new();
    for w in derivative.windows(2) {
        if (w[0].1 > 0.0) != (w[1].1 > 0.0) {
            changes.push(0.5 * (w[0].0 + w[1].0));
            brackets.push(0.5 * (w[1].0 - w[0].0));
        }
    }
    let expected_root = sqrt(1.0 / (2.0 * (lambda + 1.0)));
    let derivative_ok = changes.len() == 2
        && changes
            .iter()
            .zip(&brackets)
            .all(|(c, half)| abs(abs(*c) - expected_root) <= half + 1e-12);
    let pass = zero_residual <= SIGN_NOISE
        && sign.pass
        && antisymmetry <= SIGN_NOISE
        && discrepancy <= SIGN_NOISE
        && derivative_ok;
    Ok(HStructureReport {
        lambda,
        zero_residual,
        sign,
        antisymmetry,
        tail_route_discrepancy: discrepancy,
        derivative_sign_changes: changes,
        expected_root,
        derivative_ok,
        pass,
    })
}

/// `phi(r) = mu_lambda(F > r) - mu_{lambda+1}(F > r)`, `F(t) = 1 + 2 a t + a^2`.
pub fn phi_r(integ: &Integrator, lambda: f64, a: f64, r: f64) -> Result<f64> {
    // F > r  iff  t > (r - 1 - a^2) / (2 a)
    h(integ, lambda, (r - 1.0 - a * a) / (2.0 * a))
}

/// What [`phi_r_single_sign_change`] found.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSignReport {
    pub lambda: f64,
    pub a: f64,
    /// Sign transitions among values above the noise level.
    pub transitions: usize,
    /// Midpoint of the bracket of the first `-` to `+` transition.
    pub crossing: Option<f64>,
    /// `int_0^{(1+a)^2} phi(r) dr` by adaptive quadrature of `phi` (angle substitution).
    pub integral_quadrature: f64,
    /// The same integral as `int F dmu_lambda - int F dmu_{lambda+1}`.
    pub integral_moments: f64,
    /// Extra transitions exist but all involve values within quadrature noise.
    pub indeterminate: bool,
    pub pass: bool,
}

/// Default `r` grid: 241 equispaced points on `[0, (1 + a)^2]`.
pub fn default_r_grid(a: f64) -> Vec<f64> {
    crate::grid::linspace(0.0, (1.0 + a) * (1.0 + a), 241).expect("static grid is valid")
}

fn count_transitions(values: &[(f64, f64)], noise: f64) -> (usize, Option<f64>, bool) {
    let mut last: Option<(f64, bool)> = None;
    let mut transitions = 0;
    let mut crossing = None;
    let mut wrong_direction = false;
    for &(r, v) in values {
        if abs(v) <= noise {
            continue;
        }
        let positive = v > 0.0;
        if let Some((r0, prev)) = last {
            if prev != positive {
                transitions += 1;
                if prev {
                    wrong_direction = true;
                } else if crossing.is_none() {
                    crossing = Some(0.5 * (r0 + r));
                }
            }
        }
        last = Some((r, positive));
    }
    (transitions, crossing, wrong_direction)
}

/// Checks that `phi` is `<= 0` then `>= 0` along `r_grid` with at most one
/// transition, and that it integrates to zero.
pub fn phi_r_single_sign_change(
    integ: &Integrator,
    lambda: f64,
    a: f64,
    r_grid: &[f64],
) -> Result<PhiSignReport> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain("phi sign analysis needs a in (0, 1)", a));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be finite and >= 0", lambda));
    }
    if r_grid.is_empty() {
        return Err(Error::argument("r-grid is empty"));
    }
    let values = r_grid
        .iter()
        .map(|&r| phi_r(integ, lambda, a, r).map(|v| (r, v)))
        .collect::<Result<Vec<_>>>()?;
    let (strict, crossing, strict_wrong) = count_transitions(&values, SIGN_NOISE);
    let (loose, _, loose_wrong) = count_transitions(&values, AMBIGUOUS_NOISE);
    let indeterminate = (strict > 1 || strict_wrong) && loose <= 1 && !loose_wrong;

    // phi vanishes outside [(1 - a)^2, (1 + a)^2]; with r = 1 + a^2 + 2 a cos(theta)
    // the endpoint square-root behaviour of the tails is smoothed out
    let failure = RefCell::new(None);
    let integrand = |theta: f64| match phi_r(integ, lambda, a, 1.0 + a * a + 2.0 * a * cos(theta)) {
        Ok(v) => 2.0 * a * v * sin(theta),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let half = 0.5 * core::f64::consts::PI;
    let integral_quadrature = adaptive_lebesgue(&integrand, 0.0, half, 1e-11)?
        + adaptive_lebesgue(&integrand, half, 2.0 * half, 1e-11)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let form = affine_square(a);
    let first = |l: f64| integ.mean_of_form(l, form, true, |_, f| f);
    let integral_moments = first(lambda)? - first(lambda + 1.0)?;

    let structure_ok = (strict <= 1 && !strict_wrong) || indeterminate;
    let pass = structure_ok && abs(integral_quadrature) <= 1e-8 && abs(integral_moments) <= 1e-12;
    Ok(PhiSignReport {
        lambda,
        a,
        transitions: strict,
        crossing,
        integral_quadrature,
        integral_moments,
        indeterminate,
        pass,
    })
}
