//! Thin wrappers over `libm` so the numerical modules read like ordinary
//! `f64` code without `std`.

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// `x^e` for `x >= 0` that maps `0^0` to 1 and tiny negative roundoff to 0.
#[inline]
pub(crate) fn pow_nonneg(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        powf(x.max(0.0), e)
    }
}

#[inline]
pub(crate) fn fract(x: f64) -> f64 {
    x - libm::trunc(x)
}
