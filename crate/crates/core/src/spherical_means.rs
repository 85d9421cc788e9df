//! Spherical means `I = int_{S^{n-1}} |x - a z|^beta dsigma(z)`.
//!
//! Only `|x|` matters, and with `lambda = (n - 2) / 2` the mean reduces to
//! `int_{-1}^{1} (|x|^2 - 2 a |x| t + a^2)^(beta/2) dmu_lambda(t)`.

use crate::math::{abs, powf};
use crate::quadrature::{Integrator, LinearForm};
use crate::{Error, Result, VerifyReport};

/// Parameters of one spherical mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMeanQuery {
    pub n: u32,
    pub beta: f64,
    pub a: f64,
    pub xnorm: f64,
}

impl SphereMeanQuery {
    pub fn new(n: u32, beta: f64, a: f64, xnorm: f64) -> Result<Self> {
        let q = SphereMeanQuery { n, beta, a, xnorm };
        q.validate()?;
        Ok(q)
    }

    pub fn lambda(&self) -> f64 {
        0.5 * (self.n as f64 - 2.0)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain("dimension n must be at least 2", self.n as f64));
        }
        check_radii(self.beta, self.a, self.xnorm)?;
        if self.a == self.xnorm && self.a > 0.0 && self.beta <= -(self.n as f64 - 1.0) {
            return Err(Error::domain(
                "sphere mean diverges for a = |x| and beta <= -(n - 1)",
                self.beta,
            ));
        }
        Ok(())
    }
}

fn check_radii(beta: f64, a: f64, xnorm: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::domain("exponent must be finite", beta));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::domain("radius a must be finite and nonnegative", a));
    }
    if !(xnorm >= 0.0 && xnorm.is_finite()) {
        return Err(Error::domain("|x| must be finite and nonnegative", xnorm));
    }
    Ok(())
}

fn is_even_power(beta: f64) -> bool {
    beta >= 0.0 && crate::math::fract(0.5 * beta) == 0.0
}

/// `int (x^2 - 2 a x t + a^2)^(beta/2) dmu_lambda(t)` for real `lambda > -1/2`.
pub(crate) fn reduced_mean(
    integ: &Integrator,
    lambda: f64,
    beta: f64,
    a: f64,
    xnorm: f64,
) -> Result<f64> {
    check_radii(beta, a, xnorm)?;
    if beta == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 || xnorm == 0.0 {
        let r = a.max(xnorm);
        if r == 0.0 && beta < 0.0 {
            return Err(Error::domain("sphere mean diverges at a = |x| = 0 for beta < 0", beta));
        }
        return Ok(powf(r, beta));
    }
    if a == xnorm && 0.5 * beta + lambda - 0.5 <= -1.0 {
        return Err(Error::domain("integrand is not integrable at t = 1", beta));
    }
    let form = LinearForm::new((xnorm + a) * (xnorm + a), (xnorm - a) * (xnorm - a));
    let half = 0.5 * beta;
    integ.mean_of_form(lambda, form, is_even_power(beta), |_, g| powf(g.max(0.0), half))
}

/// Mean of `|x - a z|^beta` over the normalised sphere `S^{n-1}`.
pub fn sphere_mean(integ: &Integrator, q: &SphereMeanQuery) -> Result<f64> {
    q.validate()?;
    reduced_mean(integ, q.lambda(), q.beta, q.a, q.xnorm)
}

/// Convenience wrapper around [`sphere_mean`].
pub fn sphere_mean_of(integ: &Integrator, n: u32, beta: f64, a: f64, xnorm: f64) -> Result<f64> {
    sphere_mean(integ, &SphereMeanQuery::new(n, beta, a, xnorm)?)
}

/// `I''(0)` for `a -> int |x - a z|^p dsigma` at `|x| = 1`: `p (p - 2) / n + p`.
pub fn second_derivative_at_zero(n: u32, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("dimension n must be at least 2", n as f64));
    }
    if !(p > 0.0) {
        return Err(Error::domain("exponent p must be positive", p));
    }
    Ok(p * (p - 2.0) / n as f64 + p)
}

/// Whether `|x|^q` is subharmonic on `R^n \ {0}`, i.e. `q (n + q - 2) >= 0`.
pub fn is_subharmonic_exponent(n: u32, q: f64) -> bool {
    q * (n as f64 + q - 2.0) >= 0.0
}

/// Checks the mean-value bound `int |x - a z|^q dsigma >= max(a, |x|)^q`
/// over `a_grid`; margin is `mean - max(a, |x|)^q`.
pub fn verify_subharmonic_bound(
    integ: &Integrator,
    n: u32,
    q: f64,
    a_grid: &[f64],
    xnorm: f64,
    tolerance: f64,
) -> Result<VerifyReport> {
    if !is_subharmonic_exponent(n, q) {
        return Err(Error::argument("exponent is not subharmonic in this dimension"));
    }
    if a_grid.is_empty() {
        return Err(Error::argument("a-grid is empty"));
    }
    let mut margins = alloc::vec::Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let query = SphereMeanQuery::new(n, q, a, xnorm)
            .map_err(|_| Error::argument("grid point violates integrability"))?;
        let mean = sphere_mean(integ, &query)?;
        margins.push((a, mean - powf(a.max(xnorm), q)));
    }
    Ok(VerifyReport::from_margins(margins, tolerance, integ.order()))
}

/// Central second difference of `a -> sphere_mean(n, p, a, 1)` at 0 (even extension).
pub fn second_derivative_by_differences(integ: &Integrator, n: u32, p: f64, h: f64) -> Result<f64> {
    let i0 = 1.0;
    let ih = sphere_mean_of(integ, n, p, abs(h), 1.0)?;
    // I(-h) = I(h) by the symmetry z -> -z
    Ok((2.0 * ih - 2.0 * i0) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn n3_closed_form(beta: f64, a: f64) -> f64 {
        ((1.0 + a).powf(beta + 2.0) - (1.0 - a).abs().powf(beta + 2.0)) / (2.0 * a * (beta + 2.0))
    }

    #[test]
    fn examples() {
        let integ = Integrator::default();
        for n in 2..8 {
            assert!((sphere_mean_of(&integ, n, 2.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
        }
        let v = sphere_mean_of(&integ, 3, 1.0, 0.5, 1.0).unwrap();
        assert!((v - 13.0 / 12.0).abs() < 1e-12);
        let v = sphere_mean_of(&integ, 2, 1.0, 1.0, 1.0).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn n3_closed_form_including_near_coincident() {
        let integ = Integrator::default();
        for &beta in &[-1.0, 0.5, 1.0, 1.5, 2.0] {
            for &a in &[0.1, 0.5, 0.99, 1.01, 2.0, 5.0] {
                let got = sphere_mean_of(&integ, 3, beta, a, 1.0).unwrap();
                let want = n3_closed_form(beta, a);
                assert!((got - want).abs() < 1e-10, "beta {beta} a {a}: {got} vs {want}");
            }
            if beta > -2.0 {
                // a = 1 limit: 2^{beta+2} / (2 (beta + 2))
                let got = sphere_mean_of(&integ, 3, beta, 1.0, 1.0).unwrap();
                let want = 2f64.powf(beta + 2.0) / (2.0 * (beta + 2.0));
                assert!((got - want).abs() < 1e-10, "beta {beta} at a = 1");
            }
        }
    }

    #[test]
    fn degenerate_shortcuts() {
        let integ = Integrator::default();
        assert_eq!(sphere_mean_of(&integ, 5, 0.0, 3.0, 3.0).unwrap(), 1.0);
        assert!((sphere_mean_of(&integ, 4, 1.5, 0.0, 2.0).unwrap() - 2f64.powf(1.5)).abs() < 1e-15);
        assert_eq!(sphere_mean_of(&integ, 4, -1.0, 2.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn divergent_configuration_is_rejected() {
        let integ = Integrator::default();
        assert!(matches!(
            sphere_mean_of(&integ, 3, -2.0, 1.0, 1.0),
            Err(Error::Domain { .. })
        ));
        assert!(SphereMeanQuery::new(1, 1.0, 1.0, 1.0).is_err());
        assert!(SphereMeanQuery::new(3, 1.0, -1.0, 1.0).is_err());
        // off the sphere the same exponent is fine
        assert!(sphere_mean_of(&integ, 3, -2.0, 0.5, 1.0).is_ok());
    }

    #[test]
    fn second_derivative_formula_and_differences() {
        assert_eq!(second_derivative_at_zero(2, 2.0).unwrap(), 2.0);
        assert!((second_derivative_at_zero(3, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let integ = Integrator::default();
        let fd = second_derivative_by_differences(&integ, 4, 0.5, 1e-4).unwrap();
        let exact = second_derivative_at_zero(4, 0.5).unwrap();
        assert!((fd - exact).abs() < 1e-5, "{fd} vs {exact}");
        assert!(second_derivative_at_zero(3, 0.0).is_err());
    }

    #[test]
    fn first_derivative_vanishes() {
        let integ = Integrator::default();
        let h = 1e-4;
        let (n, p, lambda) = (5, 1.3, 1.5);
        let plus = sphere_mean_of(&integ, n, p, h, 1.0).unwrap();
        // I(-h): |x + h z|^2 = (1 + h)^2 at t = 1 and (1 - h)^2 at t = -1
        let form = LinearForm::new((1.0 - h) * (1.0 - h), (1.0 + h) * (1.0 + h));
        let minus = integ
            .mean_of_form(lambda, form, false, |_, g| g.powf(0.5 * p))
            .unwrap();
        assert!(((plus - minus) / (2.0 * h)).abs() <= 1e-8);
    }

    #[test]
    fn subharmonic_classification() {
        assert!(is_subharmonic_exponent(3, -1.0));
        assert!(is_subharmonic_exponent(2, 1.0));
        assert!(!is_subharmonic_exponent(4, -1.0));
        assert!(is_subharmonic_exponent(4, -2.0));
        assert!(is_subharmonic_exponent(5, 0.0));
    }

    #[test]
    fn subharmonic_bound_examples() {
        let integ = Integrator::default();
        let r = verify_subharmonic_bound(&integ, 3, -1.0, &[2.0], 1.0, 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.worst_margin.abs() < 1e-12);
        let r = verify_subharmonic_bound(&integ, 2, 2.0, &[0.5], 1.0, 1e-9).unwrap();
        assert!(r.pass && (r.worst_margin - 0.25).abs() < 1e-12);
        let r = verify_subharmonic_bound(&integ, 5, 0.0, &[0.3, 1.0, 4.0], 1.0, 1e-9).unwrap();
        assert!(r.pass && r.worst_margin == 0.0);
        assert!(verify_subharmonic_bound(&integ, 4, -1.0, &[2.0], 1.0, 1e-9).is_err());
    }
}
