//! Parameter grids used by the verifiers.

use alloc::vec::Vec;

use crate::math::{exp, ln};
use crate::{Error, Result};

/// Spacing of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        GridSpec { start, stop, count, spacing: Spacing::Linear }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        GridSpec { start, stop, count, spacing: Spacing::Log }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Linear => linspace(self.start, self.stop, self.count),
            Spacing::Log => logspace(self.start, self.stop, self.count),
        }
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(Error::argument("grid needs a positive count and finite bounds"));
    }
    if count == 1 {
        return Ok(alloc::vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    out[count - 1] = stop;
    Ok(out)
}

pub fn logspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0) {
        return Err(Error::argument("log grid bounds must be positive"));
    }
    let mut out: Vec<f64> = linspace(ln(start), ln(stop), count)?
        .into_iter()
        .map(exp)
        .collect();
    out[0] = start;
    if count > 1 {
        out[count - 1] = stop;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = logspace(1e-3, 1e2, 400).unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[399], 1e2);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linspace(0.0, 1.0, 11).unwrap();
        assert_eq!(l[10], 1.0);
        assert!((l[3] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(linspace(0.0, 1.0, 0).is_err());
        assert!(logspace(0.0, 1.0, 3).is_err());
        assert_eq!(linspace(2.0, 5.0, 1).unwrap(), alloc::vec![2.0]);
    }
}
