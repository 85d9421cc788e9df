/// Outcome of verifying an inequality over a parameter grid.
///
/// `worst_margin` is the smallest margin seen and `witness` the grid
/// parameter attaining it (first one in grid order on ties).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub pass: bool,
    pub worst_margin: f64,
    pub witness: f64,
    pub grid_size: usize,
    pub quad_order: usize,
    pub tolerance: f64,
}

impl VerifyReport {
    /// Reduces `(parameter, margin)` pairs in order. An empty sequence passes
    /// vacuously with an infinite margin.
    pub fn from_margins<I>(margins: I, tolerance: f64, quad_order: usize) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut worst_margin = f64::INFINITY;
        let mut witness = f64::NAN;
        let mut grid_size = 0;
        for (param, margin) in margins {
            grid_size += 1;
            // NaN margins count as failures
            if margin < worst_margin || (margin.is_nan() && !worst_margin.is_nan()) {
                worst_margin = margin;
                witness = param;
            }
        }
        VerifyReport {
            pass: worst_margin >= -tolerance,
            worst_margin,
            witness,
            grid_size,
            quad_order,
            tolerance,
        }
    }

    /// Combines two reports over disjoint grids.
    pub fn merge(self, other: VerifyReport) -> VerifyReport {
        let (worst_margin, witness) = if other.worst_margin < self.worst_margin
            || (other.worst_margin.is_nan() && !self.worst_margin.is_nan())
        {
            (other.worst_margin, other.witness)
        } else {
            (self.worst_margin, self.witness)
        };
        let tolerance = self.tolerance.min(other.tolerance);
        VerifyReport {
            pass: self.pass && other.pass && worst_margin >= -tolerance,
            worst_margin,
            witness,
            grid_size: self.grid_size + other.grid_size,
            quad_order: self.quad_order.max(other.quad_order),
            tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_first_worst() {
        let r = VerifyReport::from_margins([(1.0, 0.5), (2.0, -0.1), (3.0, -0.1)], 1e-9, 256);
        assert!(!r.pass);
        assert_eq!(r.witness, 2.0);
        assert_eq!(r.grid_size, 3);
    }

    #[test]
    fn tolerance_absorbs_noise() {
        let r = VerifyReport::from_margins([(1.0, -1e-12), (2.0, 3.0)], 1e-9, 256);
        assert!(r.pass);
        assert_eq!(r.witness, 1.0);
    }

    #[test]
    fn nan_fails() {
        let r = VerifyReport::from_margins([(1.0, 1.0), (2.0, f64::NAN)], 1e-9, 256);
        assert!(!r.pass);
        assert_eq!(r.witness, 2.0);
    }
}
