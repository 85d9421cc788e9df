//! Gauss rules and adaptive quadrature for the probability measures
//! `dmu_lambda(t) = 2 c_{2 lambda} (1 - t^2)^(lambda - 1/2) dt` on `[-1, 1]`.
//!
//! Rules are Gauss rules for the symmetric Jacobi weight with
//! `alpha = beta = lambda - 1/2`, built from the orthonormal three-term
//! recurrence of `mu_lambda` and normalised to unit mass.
//!
//! Integrands that may be singular at (or just beyond) an endpoint are
//! evaluated through [`Abscissa`], which carries `1 - t` and `1 + t`
//! computed without cancellation, so a graded mesh can resolve features at
//! distances far below the spacing of `f64` near `+-1`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};
use core::f64::consts::PI;

use crate::math::{abs, cos, ln_1p, pow_nonneg, powf, sqrt};
use crate::specfun::reduced_density_constant;
use crate::{Error, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 10_000;
/// Default rule order for inequality verification.
pub const DEFAULT_ORDER: usize = 256;
/// Default absolute tolerance for the adaptive path.
pub const DEFAULT_ADAPTIVE_TOL: f64 = 1e-11;
/// Agreement required between the order-N and order-2N rules.
pub const DEFAULT_SELF_CHECK_TOL: f64 = 1e-10;

const NEWTON_MAX_ITER: usize = 100;
const ADAPTIVE_PANEL_ORDER: usize = 16;
const ADAPTIVE_MAX_PANELS: usize = 200_000;
const ADAPTIVE_MAX_DEPTH: usize = 60;
const GRADED_MIN_LEVELS: usize = 12;
const GRADED_MAX_LEVELS: usize = 960;
/// 2N ln(rho) must exceed this for the Gauss path to be trusted.
const GAUSS_CONVERGENCE_EXPONENT: f64 = 50.0;

/// A point of `[-1, 1]` together with its distances to both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub t: f64,
    pub one_minus_t: f64,
    pub one_plus_t: f64,
}

impl Abscissa {
    pub fn new(t: f64) -> Self {
        Abscissa { t, one_minus_t: 1.0 - t, one_plus_t: 1.0 + t }
    }

    fn from_upper(d: f64) -> Self {
        Abscissa { t: 1.0 - d, one_minus_t: d, one_plus_t: 2.0 - d }
    }

    fn from_lower(d: f64) -> Self {
        Abscissa { t: d - 1.0, one_minus_t: 2.0 - d, one_plus_t: d }
    }
}

/// An affine function of `t`, stored by its values at `t = -1` and `t = 1`
/// so that it can be evaluated accurately near either endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForm {
    at_minus_one: f64,
    at_plus_one: f64,
}

impl LinearForm {
    pub fn new(at_minus_one: f64, at_plus_one: f64) -> Self {
        LinearForm { at_minus_one, at_plus_one }
    }

    pub fn slope(&self) -> f64 {
        0.5 * (self.at_plus_one - self.at_minus_one)
    }

    pub fn eval(&self, x: Abscissa) -> f64 {
        let slope = self.slope();
        if x.one_minus_t <= x.one_plus_t {
            self.at_plus_one - slope * x.one_minus_t
        } else {
            self.at_minus_one + slope * x.one_plus_t
        }
    }

    /// Distance from `[-1, 1]` to the zero of the form; zero when the zero
    /// lies inside the interval or on its boundary, infinite for constants.
    pub fn root_clearance(&self) -> f64 {
        let slope = self.slope();
        if slope == 0.0 {
            return if self.at_plus_one == 0.0 { 0.0 } else { f64::INFINITY };
        }
        let (lo, hi) = (self.at_minus_one, self.at_plus_one);
        if (lo > 0.0 && hi > 0.0) || (lo < 0.0 && hi < 0.0) {
            abs(lo).min(abs(hi)) / abs(slope)
        } else {
            0.0
        }
    }
}

/// Gauss rule for `mu_lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    lambda: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn new(lambda: f64, order: usize) -> Result<Self> {
        build_rule(lambda, order)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.integrate_at(|x| f(x.t))
    }

    pub fn integrate_at<F: Fn(Abscissa) -> f64>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(Abscissa::new(t));
            if !v.is_finite() {
                return Err(Error::Evaluation { node: t, value: v });
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

/// Sum of `weights[i] * f(nodes[i])`.
pub fn integrate<F: Fn(f64) -> f64>(rule: &QuadRule, f: F) -> Result<f64> {
    rule.integrate(f)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > -0.5 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("mu_lambda needs lambda > -1/2", lambda))
    }
}

/// `beta_k` of the monic recurrence `p_{k+1} = t p_k - beta_k p_{k-1}` for mu_lambda.
fn recurrence_beta(lambda: f64, k: usize) -> f64 {
    if k == 1 {
        return 1.0 / (2.0 * (lambda + 1.0));
    }
    let k = k as f64;
    k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0))
}

struct Recurrence {
    // offdiag[k] = sqrt(beta_k), k >= 1
    offdiag: Vec<f64>,
}

impl Recurrence {
    fn new(lambda: f64, order: usize) -> Self {
        let mut offdiag = Vec::with_capacity(order + 1);
        offdiag.push(0.0);
        for k in 1..=order {
            offdiag.push(sqrt(recurrence_beta(lambda, k)));
        }
        Recurrence { offdiag }
    }

    /// Returns `(q_n(t), q_n'(t), sum_{k<n} q_k(t)^2)` for the orthonormal family.
    fn eval(&self, n: usize, t: f64) -> (f64, f64, f64) {
        let mut q_prev = 0.0;
        let mut q = 1.0;
        let mut dq_prev = 0.0;
        let mut dq = 0.0;
        let mut sum_sq = 0.0;
        for k in 0..n {
            sum_sq += q * q;
            let b_next = self.offdiag[k + 1];
            let b_k = self.offdiag[k];
            let q_next = (t * q - b_k * q_prev) / b_next;
            let dq_next = (q + t * dq - b_k * dq_prev) / b_next;
            q_prev = q;
            q = q_next;
            dq_prev = dq;
            dq = dq_next;
        }
        (q, dq, sum_sq)
    }

    /// Number of Jacobi-matrix eigenvalues below `x` (Sturm count).
    fn count_below(&self, n: usize, x: f64) -> usize {
        let mut count = 0;
        let mut d = -x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if d == 0.0 { f64::EPSILON * 1e-3 } else { d };
            d = -x - self.offdiag[i] * self.offdiag[i] / denom;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

fn newton_root(rec: &Recurrence, n: usize, mut x: f64) -> f64 {
    for _ in 0..NEWTON_MAX_ITER {
        let (q, dq, _) = rec.eval(n, x);
        if dq == 0.0 || !dq.is_finite() {
            break;
        }
        let step = q / dq;
        x -= step;
        if abs(step) <= 4.0 * f64::EPSILON * abs(x).max(1e-3) {
            break;
        }
    }
    x
}

fn roots_by_bisection(rec: &Recurrence, n: usize, half: usize) -> Vec<f64> {
    // k-th largest root (k = 0, 1, ...) is eigenvalue n - 1 - k in ascending order
    (0..half)
        .map(|k| {
            let target = n - k;
            let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if rec.count_below(n, mid) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            newton_root(rec, n, 0.5 * (lo + hi))
        })
        .collect()
}

fn roots_are_valid(roots: &[f64]) -> bool {
    roots.iter().all(|&x| x.is_finite() && x > 0.0 && x < 1.0)
        && roots.windows(2).all(|w| w[0] > w[1])
}

/// Builds the order-`order` Gauss rule for `mu_lambda`.
///
/// Nodes are the zeros of the degree-`order` ultraspherical polynomial,
/// found by Newton iteration from asymptotic guesses (with a Sturm-sequence
/// bisection fallback); weights are Christoffel numbers `1 / sum q_k^2`,
/// rescaled to sum to one.
pub fn build_rule(lambda: f64, order: usize) -> Result<QuadRule> {
    check_lambda(lambda)?;
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::argument(alloc::format!(
            "rule order must lie in [2, {MAX_ORDER}], got {order}"
        )));
    }
    let n = order;
    let rec = Recurrence::new(lambda, n);
    let half = n / 2;
    let alpha = lambda - 0.5;

    let mut positive: Vec<f64> = (1..=half)
        .map(|k| {
            let theta = PI * (k as f64 - 0.25 + 0.5 * alpha) / (n as f64 + lambda);
            newton_root(&rec, n, cos(theta))
        })
        .collect();
    if !roots_are_valid(&positive) {
        positive = roots_by_bisection(&rec, n, half);
        if !roots_are_valid(&positive) {
            return Err(Error::Internal("Gauss node construction failed"));
        }
    }

    let christoffel = |x: f64| {
        let (_, _, sum_sq) = rec.eval(n, x);
        1.0 / sum_sq
    };

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in &positive {
        nodes.push(-x);
        weights.push(christoffel(x));
    }
    if n % 2 == 1 {
        nodes.push(0.0);
        weights.push(christoffel(0.0));
    }
    for &x in positive.iter().rev() {
        nodes.push(x);
        weights.push(christoffel(x));
    }

    let total: f64 = weights.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::Internal("Gauss weights overflowed"));
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(QuadRule { lambda, nodes, weights })
}

/// Gauss-Legendre panels for the adaptive driver.
struct PanelIntegrator<'a, F> {
    gl: &'a QuadRule,
    f: F,
    panels: Cell<usize>,
}

impl<'a, F: Fn(f64) -> Result<f64>> PanelIntegrator<'a, F> {
    fn new(gl: &'a QuadRule, f: F) -> Self {
        PanelIntegrator { gl, f, panels: Cell::new(0) }
    }

    fn panel(&self, lo: f64, hi: f64) -> Result<f64> {
        let used = self.panels.get() + 1;
        if used > ADAPTIVE_MAX_PANELS {
            return Err(Error::Convergence { estimate: f64::NAN, error: f64::INFINITY });
        }
        self.panels.set(used);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (&x, &w) in self.gl.nodes().iter().zip(self.gl.weights()) {
            sum += w * (self.f)(mid + half * x)?;
        }
        Ok(sum * (hi - lo))
    }

    /// Recursive bisection; returns `(value, error estimate)`.
    fn adapt(&self, lo: f64, hi: f64, whole: f64, tol: f64, depth: usize) -> Result<(f64, f64)> {
        let mid = 0.5 * (lo + hi);
        let left = self.panel(lo, mid)?;
        let right = self.panel(mid, hi)?;
        let refined = left + right;
        let err = abs(refined - whole);
        if err <= tol.max(64.0 * f64::EPSILON * abs(refined)) || mid <= lo || mid >= hi {
            return Ok((refined, err));
        }
        if depth >= ADAPTIVE_MAX_DEPTH {
            return Err(Error::Convergence { estimate: refined, error: err });
        }
        let (lv, le) = self.adapt(lo, mid, left, 0.5 * tol, depth + 1)?;
        let (rv, re) = self.adapt(mid, hi, right, 0.5 * tol, depth + 1)?;
        Ok((lv + rv, le + re))
    }

    fn integrate(&self, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
        if hi <= lo {
            return Ok((0.0, 0.0));
        }
        let whole = self.panel(lo, hi)?;
        self.adapt(lo, hi, whole, tol, 0)
    }
}

fn finite_at(t: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { node: t, value: v })
    }
}

/// Integral over `d in [0, reach]` measured from an endpoint, where the
/// density behaves like `d^alpha`. Panels `[h/2, h]` are added until the
/// substitution estimate on `[0, h]` is consistent with its refinement.
fn graded_piece<F: Fn(Abscissa) -> f64>(
    gl: &QuadRule,
    lambda: f64,
    norm: f64,
    reach: f64,
    to_abscissa: fn(f64) -> Abscissa,
    f: &F,
    tol: f64,
) -> Result<(f64, f64)> {
    if reach <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let alpha = lambda - 0.5;
    let full = |d: f64| -> Result<f64> {
        let x = to_abscissa(d);
        let v = norm * pow_nonneg(d, alpha) * pow_nonneg(2.0 - d, alpha) * f(x);
        finite_at(x.t, v)
    };
    let panels = PanelIntegrator::new(gl, full);
    let exponent = 1.0 / (alpha + 1.0);
    // int_0^h d^alpha phi(d) dd = h^(alpha+1)/(alpha+1) int_0^1 phi(h v^(1/(alpha+1))) dv
    let endpoint = |h: f64| -> Result<f64> {
        let mut sum = 0.0;
        for (&x, &w) in gl.nodes().iter().zip(gl.weights()) {
            let v = 0.5 * (x + 1.0);
            let d = h * powf(v, exponent);
            let at = to_abscissa(d);
            let val = norm * pow_nonneg(2.0 - d, alpha) * f(at);
            sum += w * finite_at(at.t, val)?;
        }
        Ok(sum * powf(h, alpha + 1.0) / (alpha + 1.0))
    };

    let mut total = 0.0;
    let mut err = 0.0;
    let mut h = reach;
    let mut end_h = endpoint(h)?;
    for level in 0..GRADED_MAX_LEVELS {
        let panel_tol = 0.25 * tol * powf(0.5, (level + 1) as f64);
        let (panel, panel_err) = panels.integrate(0.5 * h, h, panel_tol)?;
        let end_half = endpoint(0.5 * h)?;
        let mismatch = abs(end_h - (panel + end_half));
        total += panel;
        err += panel_err;
        if level + 1 >= GRADED_MIN_LEVELS
            && mismatch <= (0.125 * tol).max(64.0 * f64::EPSILON * abs(total))
        {
            return Ok((total + end_half, err + mismatch));
        }
        h *= 0.5;
        end_h = end_half;
    }
    Err(Error::Convergence { estimate: total + end_h, error: f64::INFINITY })
}

/// `int f dmu_lambda` over `[-1, 1]` to absolute tolerance `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(lambda: f64, f: F, tol: f64) -> Result<f64> {
    adaptive_integrate_at(lambda, |x| f(x.t), tol)
}

/// As [`adaptive_integrate`], with the integrand receiving accurate endpoint distances.
pub fn adaptive_integrate_at<F: Fn(Abscissa) -> f64>(lambda: f64, f: F, tol: f64) -> Result<f64> {
    adaptive_integrate_between(lambda, -1.0, 1.0, f, tol)
}

/// `int_{lower}^{upper} f dmu_lambda` by recursive subdivision, graded
/// geometrically toward whichever endpoints `+-1` the range touches.
pub fn adaptive_integrate_between<F: Fn(Abscissa) -> f64>(
    lambda: f64,
    lower: f64,
    upper: f64,
    f: F,
    tol: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    if !(tol > 0.0) {
        return Err(Error::argument("tolerance must be positive"));
    }
    if !(-1.0 <= lower && lower <= upper && upper <= 1.0) {
        return Err(Error::argument("integration range must satisfy -1 <= lower <= upper <= 1"));
    }
    if lower == upper {
        return Ok(0.0);
    }
    let gl = build_rule(0.5, ADAPTIVE_PANEL_ORDER)?;
    let norm = reduced_density_constant(lambda)?;
    let alpha = lambda - 0.5;

    let pieces: &[(f64, f64)] = &if lower < 0.0 && upper > 0.0 {
        [(lower, 0.0), (0.0, upper)]
    } else {
        [(lower, upper), (0.0, 0.0)]
    };
    let live = pieces.iter().filter(|(a, b)| b > a).count().max(1);
    let piece_tol = tol / live as f64;

    let mut value = 0.0;
    let mut err = 0.0;
    for &(a, b) in pieces {
        if b <= a {
            continue;
        }
        let (v, e) = if b == 1.0 {
            graded_piece(&gl, lambda, norm, 1.0 - a, Abscissa::from_upper, &f, piece_tol)?
        } else if a == -1.0 {
            graded_piece(&gl, lambda, norm, 1.0 + b, Abscissa::from_lower, &f, piece_tol)?
        } else {
            let inner = |t: f64| -> Result<f64> {
                let x = Abscissa::new(t);
                let v = norm * pow_nonneg(x.one_minus_t * x.one_plus_t, alpha) * f(x);
                finite_at(t, v)
            };
            PanelIntegrator::new(&gl, inner).integrate(a, b, piece_tol)?
        };
        value += v;
        err += e;
    }
    if err > tol.max(1e3 * f64::EPSILON * abs(value)) {
        return Err(Error::Convergence { estimate: value, error: err });
    }
    Ok(value)
}

/// Plain `int_lo^hi f(x) dx` by adaptive Gauss-Legendre bisection.
pub fn adaptive_lebesgue<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::argument("need finite bounds and positive tolerance"));
    }
    let gl = build_rule(0.5, ADAPTIVE_PANEL_ORDER)?;
    let (a, b, sign) = if lo <= hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
    let g = |x: f64| finite_at(x, f(x));
    let (v, _) = PanelIntegrator::new(&gl, g).integrate(a, b, tol)?;
    Ok(sign * v)
}

/// Whether an order-`order` Gauss rule converges to full precision for an
/// integrand whose only singularity sits `clearance` beyond `[-1, 1]`.
pub fn gauss_resolves(clearance: f64, order: usize) -> bool {
    if clearance.is_infinite() {
        return true;
    }
    if !(clearance > 0.0) {
        return false;
    }
    // Bernstein ellipse through the singularity: rho = 1 + d + sqrt(d^2 + 2d)
    let ln_rho = ln_1p(clearance + sqrt(clearance * clearance + 2.0 * clearance));
    2.0 * order as f64 * ln_rho >= GAUSS_CONVERGENCE_EXPONENT
}

/// Tunables of an [`Integrator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub order: usize,
    pub adaptive_tol: f64,
    pub self_check_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            order: DEFAULT_ORDER,
            adaptive_tol: DEFAULT_ADAPTIVE_TOL,
            self_check_tol: DEFAULT_SELF_CHECK_TOL,
        }
    }
}

/// Caches Gauss rules and routes integrals between the Gauss path and the
/// adaptive path.
///
/// Not `Sync`: parallel drivers create one integrator per worker.
#[derive(Debug, Default)]
pub struct Integrator {
    config: IntegratorConfig,
    rules: RefCell<BTreeMap<(u64, usize), Arc<QuadRule>>>,
}

impl Clone for Integrator {
    fn clone(&self) -> Self {
        Integrator::new(self.config)
    }
}

impl Integrator {
    pub fn new(config: IntegratorConfig) -> Self {
        Integrator { config, rules: RefCell::new(BTreeMap::new()) }
    }

    pub fn with_order(order: usize) -> Self {
        Integrator::new(IntegratorConfig { order, ..IntegratorConfig::default() })
    }

    pub fn config(&self) -> IntegratorConfig {
        self.config
    }

    pub fn order(&self) -> usize {
        self.config.order
    }

    /// Same settings at twice the rule order.
    pub fn doubled(&self) -> Integrator {
        Integrator::new(IntegratorConfig {
            order: (2 * self.config.order).min(MAX_ORDER),
            ..self.config
        })
    }

    pub fn rule(&self, lambda: f64, order: usize) -> Result<Arc<QuadRule>> {
        let key = (lambda.to_bits(), order);
        if let Some(rule) = self.rules.borrow().get(&key) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(build_rule(lambda, order)?);
        self.rules.borrow_mut().insert(key, Arc::clone(&rule));
        Ok(rule)
    }

    /// Gauss-rule mean of a smooth integrand at the configured order.
    pub fn mean<F: Fn(f64) -> f64>(&self, lambda: f64, f: F) -> Result<f64> {
        self.rule(lambda, self.config.order)?.integrate(f)
    }

    /// `int f(t, g(t)) dmu_lambda(t)` where `g` is affine and `f` may be
    /// singular where `g` vanishes.
    ///
    /// The Gauss path (order N, confirmed at order 2N) is used when `smooth`
    /// is set or the zero of `g` is far enough from `[-1, 1]`; otherwise, or
    /// when the two orders disagree, the graded adaptive path runs with a
    /// tolerance scaled by the magnitude of the result.
    pub fn mean_of_form<F>(&self, lambda: f64, form: LinearForm, smooth: bool, f: F) -> Result<f64>
    where
        F: Fn(Abscissa, f64) -> f64,
    {
        check_lambda(lambda)?;
        let order = self.config.order;
        let g = |x: Abscissa| f(x, form.eval(x));
        let mut scale = 1.0_f64;
        if smooth || gauss_resolves(form.root_clearance(), order) {
            let coarse = self.rule(lambda, order)?.integrate_at(g)?;
            let fine = self.rule(lambda, (2 * order).min(MAX_ORDER))?.integrate_at(g)?;
            let scale_here = abs(fine).max(1.0);
            if abs(coarse - fine) <= self.config.self_check_tol * scale_here {
                return Ok(fine);
            }
            scale = scale_here;
        } else if let Ok(estimate) = self.rule(lambda, order)?.integrate_at(g) {
            scale = abs(estimate).max(1.0);
        }
        adaptive_integrate_at(lambda, g, self.config.adaptive_tol * scale)
    }

    /// `mu_lambda(t > u)`, by quadrature of the density over `[u, 1]`.
    pub fn tail(&self, lambda: f64, u: f64) -> Result<f64> {
        if u <= -1.0 {
            return Ok(1.0);
        }
        if u >= 1.0 {
            return Ok(0.0);
        }
        adaptive_integrate_between(lambda, u, 1.0, |_| 1.0, 1e-13)
    }

    /// `mu_lambda(t <= u)`, by quadrature of the density over `[-1, u]`.
    pub fn cdf(&self, lambda: f64, u: f64) -> Result<f64> {
        if u <= -1.0 {
            return Ok(0.0);
        }
        if u >= 1.0 {
            return Ok(1.0);
        }
        adaptive_integrate_between(lambda, -1.0, u, |_| 1.0, 1e-13)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_moment(lambda: f64, k: usize) -> f64 {
        // E[t^{2k}] = prod_{j<k} (2j+1)/(2j+2 lambda+2)
        (0..k).fold(1.0, |acc, j| {
            let j = j as f64;
            acc * (2.0 * j + 1.0) / (2.0 * j + 2.0 * lambda + 2.0)
        })
    }

    #[test]
    fn rule_invariants() {
        for &lambda in &[-0.4, 0.0, 0.5, 1.0, 2.5, 10.0] {
            for &n in &[2usize, 3, 8, 33, 256] {
                let rule = build_rule(lambda, n).unwrap();
                let sum: f64 = rule.weights().iter().sum();
                assert!((sum - 1.0).abs() < 1e-13, "lambda {lambda} n {n}");
                assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
                for i in 0..n {
                    assert!((rule.nodes()[i] + rule.nodes()[n - 1 - i]).abs() < 1e-12);
                    assert!((rule.weights()[i] - rule.weights()[n - 1 - i]).abs() < 1e-12);
                    assert!(rule.weights()[i] > 0.0);
                }
                assert!(rule.integrate(|t| t).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn second_moments() {
        let r = build_rule(0.5, 4).unwrap();
        assert!((r.integrate(|t| t * t).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let r = build_rule(0.0, 8).unwrap();
        assert!((r.integrate(|t| t * t).unwrap() - 0.5).abs() < 1e-14);
        for m in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let r = build_rule(m / 2.0, 16).unwrap();
            assert!((r.integrate(|t| t * t).unwrap() - 1.0 / (m + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_for_high_even_moments() {
        for &lambda in &[-0.3, 0.0, 0.5, 1.5, 4.0] {
            let n = 12;
            let rule = build_rule(lambda, n).unwrap();
            for k in 0..n {
                let got = rule.integrate(|t| t.powi(2 * k as i32)).unwrap();
                let want = even_moment(lambda, k);
                assert!((got - want).abs() < 1e-13, "lambda {lambda} k {k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(build_rule(-0.5, 8), Err(Error::Domain { .. })));
        assert!(matches!(build_rule(0.5, 1), Err(Error::Argument(_))));
        assert!(matches!(build_rule(0.5, MAX_ORDER + 1), Err(Error::Argument(_))));
    }

    #[test]
    fn large_order_builds() {
        let rule = build_rule(0.5, MAX_ORDER).unwrap();
        assert!((rule.integrate(|t| t * t).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nonfinite_integrand_reports_node() {
        let rule = build_rule(0.5, 3).unwrap();
        match rule.integrate(|t| if t == 0.0 { f64::NAN } else { 1.0 }) {
            Err(Error::Evaluation { node, .. }) => assert_eq!(node, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adaptive_matches_closed_forms() {
        let v = adaptive_integrate(0.5, |t| (2.0 - 2.0 * t).powf(0.25), 1e-11).unwrap();
        assert!((v - 2f64.powf(1.5) * 0.4).abs() < 1e-10, "{v}");
        let v = adaptive_integrate(1.0, |t| t * t, 1e-11).unwrap();
        assert!((v - 0.25).abs() < 1e-11);
        for &lambda in &[-0.45, 0.0, 0.5, 3.0] {
            let v = adaptive_integrate(lambda, |_| 1.0, 1e-12).unwrap();
            assert!((v - 1.0).abs() < 1e-11, "lambda {lambda}: {v}");
        }
    }

    #[test]
    fn adaptive_resolves_endpoint_singularity() {
        // int (1 - t)^{-1/2} dmu_{1/2} = (1/2) int_0^2 d^{-1/2} dd = sqrt(2)
        let v = adaptive_integrate_at(0.5, |x| x.one_minus_t.powf(-0.5), 1e-11).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn tails_and_cdf_agree() {
        let integ = Integrator::default();
        for &lambda in &[0.0, 0.5, 1.0, 2.0] {
            for &u in &[-0.9, -0.3, 0.0, 0.25, 0.7, 0.999] {
                let tail = integ.tail(lambda, u).unwrap();
                let cdf = integ.cdf(lambda, u).unwrap();
                assert!((tail + cdf - 1.0).abs() < 1e-10, "lambda {lambda} u {u}");
            }
        }
        // uniform measure at lambda = 1/2
        assert!((integ.tail(0.5, 0.5).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn linear_form_clearance() {
        // (x - a)^2 + 2 a x (1 - t) with x = 1, a = 0.9
        let form = LinearForm::new(1.9 * 1.9, 0.01);
        assert!((form.root_clearance() - 0.01 / 1.8).abs() < 1e-15);
        assert_eq!(LinearForm::new(4.0, 0.0).root_clearance(), 0.0);
        assert_eq!(LinearForm::new(2.0, 2.0).root_clearance(), f64::INFINITY);
        let x = Abscissa::from_upper(1e-30);
        assert_eq!(form.eval(x), 0.01 - form.slope() * 1e-30);
    }

    #[test]
    fn lebesgue_integral() {
        let v = adaptive_lebesgue(|x| x.sqrt(), 0.0, 4.0, 1e-12).unwrap();
        assert!((v - 16.0 / 3.0).abs() < 1e-10);
        let v = adaptive_lebesgue(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }
}
