//! Log-Gamma and the normalisation constants of the ultraspherical measures
//! `dnu_m = c_m |sin theta|^m dtheta` on the unit circle.

use core::f64::consts::PI;

use crate::math::{exp, ln, sin};
use crate::{Error, Result};

// Lanczos coefficients for g = 10.900511 (Pugh, 11 terms).
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2 sqrt(e / pi))
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620782237635245222345518445781647212251852647761210;
const LN_PI: f64 = 1.144729885849400174143427351353058711647294812915311;
/// ln Gamma(1/2) = ln sqrt(pi)
const LN_SQRT_PI: f64 = 0.572364942924700087071713675676529355823647406457655;

/// Positive argument of the Gamma function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GammaArg(f64);

impl GammaArg {
    pub fn new(x: f64) -> Result<Self> {
        if x > 0.0 && x.is_finite() {
            Ok(GammaArg(x))
        } else {
            Err(Error::domain("Gamma argument must be positive and finite", x))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn ln_gamma(self) -> f64 {
        ln_gamma_positive(self.0)
    }
}

/// Natural logarithm of Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    GammaArg::new(x).map(GammaArg::ln_gamma)
}

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |s, (i, &c)| s + c / (x + i as f64 - 1.0))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        LN_PI - ln(sin(PI * x)) - ln_gamma_positive(1.0 - x)
    } else {
        ln(lanczos_sum(x))
            + LN_TWO_SQRT_E_OVER_PI
            + (x - 0.5) * (ln(x - 0.5 + LANCZOS_G) - 1.0)
    }
}

/// ln c_m with c_m = Gamma(m/2 + 1) / (2 Gamma(1/2) Gamma(m/2 + 1/2)).
pub fn ln_c_m(m: f64) -> Result<f64> {
    if !(m > -1.0) || !m.is_finite() {
        return Err(Error::domain("c_m needs m > -1", m));
    }
    Ok(ln_gamma_positive(0.5 * m + 1.0)
        - core::f64::consts::LN_2
        - LN_SQRT_PI
        - ln_gamma_positive(0.5 * m + 0.5))
}

/// Normalisation constant of nu_m, so that c_m * int_0^{2 pi} |sin t|^m dt = 1.
pub fn c_m(m: f64) -> Result<f64> {
    ln_c_m(m).map(exp)
}

/// c_m / c_{m+2}; analytically (m+1)/(m+2).
pub fn c_ratio(m: f64) -> Result<f64> {
    Ok(exp(ln_c_m(m)? - ln_c_m(m + 2.0)?))
}

/// Density constant of mu_lambda on [-1, 1], i.e. 2 c_{2 lambda}.
pub fn reduced_density_constant(lambda: f64) -> Result<f64> {
    Ok(exp(ln_c_m(2.0 * lambda)? + core::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn ln_gamma_trivial_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        assert!(close(ln_gamma(0.5).unwrap(), 0.5723649429247001, 1e-14));
        assert!(close(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-14));
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(ln_gamma(-2.5), Err(Error::Domain { .. })));
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_high_precision_reference() {
        // 30-digit reference values
        let cases = [
            (0.1, 2.2527126517342059599),
            (0.001, 6.9071788853838536825),
            (1e-10, 23.025850929882735274),
            (1.5, -0.12078223763524522235),
            (2.5, 0.28468287047291915963),
            (7.3, 7.1478925230222490328),
            (50.0, 144.56574394634488601),
            (100.5, 361.43554046777762156),
            (170.0, 701.43726380873708535),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "ln_gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn recurrence_holds() {
        for x in [0.1, 0.5, 1.0, 2.0, 7.3, 50.0] {
            let lhs = ln_gamma(x + 1.0).unwrap() - ln_gamma(x).unwrap() - x.ln();
            assert!(lhs.abs() <= 1e-12, "x = {x}: {lhs}");
        }
    }

    #[test]
    fn c_m_values() {
        assert!(close(c_m(0.0).unwrap(), 1.0 / (2.0 * PI), 1e-14));
        assert!(close(c_m(1.0).unwrap(), 0.25, 1e-14));
        assert!(close(c_m(2.0).unwrap(), 1.0 / PI, 1e-14));
        assert!(close(c_m(5.0).unwrap(), 0.46875, 1e-14));
        assert!(close(c_m(10.0).unwrap(), 0.6467248481194477136, 1e-13));
        assert!(matches!(c_m(-1.0), Err(Error::Domain { .. })));
        assert!(c_m(-1.5).is_err());
    }

    #[test]
    fn c_ratio_identity() {
        assert!(close(c_ratio(0.0).unwrap(), 0.5, 1e-13));
        assert!(close(c_ratio(1.0).unwrap(), 2.0 / 3.0, 1e-13));
        assert!(close(c_ratio(10.0).unwrap(), 11.0 / 12.0, 1e-13));
        for m in [-0.9, -0.5, 0.3, 2.0, 7.7, 40.0] {
            let want = (m + 1.0) / (m + 2.0);
            assert!(close(c_ratio(m).unwrap(), want, 1e-13), "m = {m}");
        }
    }

    #[test]
    fn large_m_constants_stay_finite() {
        let c = c_m(300.0).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }
}
