//! Figure data: `phi` and `phi'` for the n = 3 argument, and the gap in the
//! polynomial inequality used for n >= 4.

use std::io;
use std::path::Path;

use sharpconvex_core::convexity::{ee6_ratio_gap, phi, phi_upper_end};
use sharpconvex_core::grid::linspace;

/// Exponents plotted in the first figure.
pub const FIG1_P: [f64; 7] = [0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0];
/// Samples of `t` per exponent on `[1, 3 / (2 - p)]`.
pub const FIG1_POINTS: usize = 200;
/// Central-difference step for `phi'`.
pub const FIG1_STEP: f64 = 1e-6;
/// `y` values of the second figure.
pub const FIG2_Y: [f64; 2] = [0.5, 0.3];
/// Samples of `x` on `[0, 1]`.
pub const FIG2_POINTS: usize = 500;

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

/// Rows `(p, t, phi, phi_prime)`.
pub fn fig1_rows() -> Vec<[f64; 4]> {
    let mut rows = Vec::new();
    for &p in &FIG1_P {
        let ts = linspace(1.0, phi_upper_end(p), FIG1_POINTS).expect("static grid");
        for t in ts {
            let value = phi(p, t).expect("p in (0, 1], t >= 1");
            let ahead = phi(p, t + FIG1_STEP).expect("t > 0");
            let behind = phi(p, t - FIG1_STEP).expect("t > 0");
            rows.push([p, t, value, (ahead - behind) / (2.0 * FIG1_STEP)]);
        }
    }
    rows
}

/// `q` values `1, 1.1, ..., 2`.
pub fn fig2_q() -> Vec<f64> {
    (0..=10).map(|k| 1.0 + k as f64 / 10.0).collect()
}

/// Rows `(y, q, x, value)`.
pub fn fig2_rows() -> Vec<[f64; 4]> {
    let xs = linspace(0.0, 1.0, FIG2_POINTS).expect("static grid");
    let mut rows = Vec::new();
    for &y in &FIG2_Y {
        for q in fig2_q() {
            for &x in &xs {
                rows.push([y, q, x, ee6_ratio_gap(q, x, y)]);
            }
        }
    }
    rows
}

fn write_rows(path: &Path, header: [&str; 4], rows: &[[f64; 4]]) -> io::Result<usize> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt(*v)))?;
    }
    w.flush()?;
    Ok(rows.len())
}

pub fn write_fig1(path: &Path) -> io::Result<usize> {
    write_rows(path, ["p", "t", "phi", "phi_prime"], &fig1_rows())
}

pub fn write_fig2(path: &Path) -> io::Result<usize> {
    write_rows(path, ["y", "q", "x", "value"], &fig2_rows())
}
