//! The acceptance suite: eleven end-to-end criteria with fixed grids and
//! tolerances. Used by `selftest` and by the `acceptance` test target.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharpconvex_core::convexity::{
    best_lambda, ee6_margin, sharp_lambda, verify_ee6_region, verify_n3_bound, verify_n3_chain,
    verify_phi_nonnegative, verify_theorem, TheoremParams,
};
use sharpconvex_core::grid::{linspace, logspace};
use sharpconvex_core::logsobolev::{
    self, default_r_grid, default_u_grid, h_structure, phi_r_single_sign_change,
};
use sharpconvex_core::spherical_means::sphere_mean_of;
use sharpconvex_core::ultraspherical::{
    check_hyp, default_b_grid, necessary_r, r_star, sphere_circle_equivalence_check, HypTuple,
};
use sharpconvex_core::{Error, IntegratorConfig, Result};

use crate::commands::logsobolev_report;
use crate::parallel::par_map;

/// Settings shared by all criteria.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptanceContext {
    pub config: IntegratorConfig,
}

/// One criterion of the suite.
#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub check: fn(&AcceptanceContext) -> Result<Verdict>,
}

/// Pass/fail with a one-line explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

/// A criterion's verdict with timing.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {} ({:.1} s): {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

const SPHERE_NS: [u32; 4] = [2, 3, 4, 5];
const SPHERE_PS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

fn np_grid() -> Vec<(u32, f64)> {
    SPHERE_NS.iter().flat_map(|&n| SPHERE_PS.iter().map(move |&p| (n, p))).collect()
}

fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn p2_identity(ctx: &AcceptanceContext) -> Result<Verdict> {
    let a_grid = logspace(1e-2, 1e2, 20)?;
    let cells: Vec<(u32, f64)> =
        (2..=10).flat_map(|n| a_grid.iter().map(move |&a| (n, a))).collect();
    let errors = collect(par_map(&cells, ctx.config, |integ, &(n, a)| {
        let v = sphere_mean_of(integ, n, 2.0, a, 1.0)?;
        Ok((v - (1.0 + a * a)).abs() / (1.0 + a * a))
    }))?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(Verdict::new(worst <= 1e-12, format!("max relative error {worst:.2e} over {} cells", cells.len())))
}

fn n3_closed_form(ctx: &AcceptanceContext) -> Result<Verdict> {
    let ps = [-1.0, 0.5, 1.0, 1.5, 2.0];
    let radii = [0.1, 0.5, 0.99, 1.01, 2.0, 5.0];
    let cells: Vec<(f64, f64)> = ps.iter().flat_map(|&p| radii.iter().map(move |&a| (p, a))).collect();
    let errors = collect(par_map(&cells, ctx.config, |integ, &(p, a)| {
        let exact = ((1.0 + a).powf(p + 2.0) - (1.0 - a).abs().powf(p + 2.0)) / (2.0 * a * (p + 2.0));
        Ok((sphere_mean_of(integ, 3, p, a, 1.0)? - exact).abs())
    }))?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(Verdict::new(worst <= 1e-10, format!("max abs error {worst:.2e}")))
}

fn second_moment(ctx: &AcceptanceContext) -> Result<Verdict> {
    let integ = sharpconvex_core::Integrator::new(ctx.config);
    let mut worst: f64 = 0.0;
    for m in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let v = integ.mean(0.5 * m, |t| t * t)?;
        worst = worst.max((v - 1.0 / (m + 2.0)).abs());
    }
    Ok(Verdict::new(worst <= 1e-12, format!("max abs error {worst:.2e}")))
}

fn sharp_constants(ctx: &AcceptanceContext) -> Result<Verdict> {
    let a_grid = logspace(1e-3, 10.0, 60)?;
    let cells = np_grid();
    let results = collect(par_map(&cells, ctx.config, |integ, &(n, p)| {
        let best = best_lambda(integ, n, p, &a_grid)?;
        Ok((best.limit_at_zero - sharp_lambda(n, p)?).abs())
    }))?;
    let (worst_at, worst) = cells
        .iter()
        .zip(&results)
        .fold(((0, 0.0), 0.0), |acc, (c, &e)| if e > acc.1 { (*c, e) } else { acc });
    let bonami = best_lambda(&sharpconvex_core::Integrator::new(ctx.config), 2, 1.0, &a_grid)?;
    Ok(Verdict::new(
        worst <= 1e-4,
        format!(
            "max |limit - (n+p-2)/n| = {worst:.2e} at (n,p)={worst_at:?}; (2,1) limit {:.8}",
            bonami.limit_at_zero
        ),
    ))
}

fn theorem_verification(ctx: &AcceptanceContext) -> Result<Verdict> {
    let a_grid = logspace(1e-3, 1e2, 400)?;
    let mut cells = Vec::new();
    for (n, p) in np_grid() {
        for shift in [0.0, 0.05] {
            for &a in &a_grid {
                cells.push((n, p, shift, a));
            }
        }
    }
    let margins = collect(par_map(&cells, ctx.config, |integ, &(n, p, shift, a)| {
        let lambda = sharp_lambda(n, p)? + shift;
        verify_theorem(integ, &TheoremParams::new(n, p, lambda, vec![a])?, 1e-9)
    }))?;
    let mut worst_sharp = f64::INFINITY;
    let mut missing_failures = Vec::new();
    let mut largest_witness: f64 = 0.0;
    for (n, p) in np_grid() {
        let mut first_failure = None;
        for (cell, r) in cells.iter().zip(&margins) {
            if cell.0 != n || cell.1 != p {
                continue;
            }
            if cell.2 == 0.0 {
                worst_sharp = worst_sharp.min(r.worst_margin);
            } else if !r.pass && first_failure.is_none() {
                first_failure = Some(cell.3);
            }
        }
        match first_failure {
            Some(a) => largest_witness = largest_witness.max(a),
            None => missing_failures.push((n, p)),
        }
    }
    let pass = worst_sharp >= -1e-9 && missing_failures.is_empty();
    Ok(Verdict::new(
        pass,
        format!(
            "worst margin at sharp constant {worst_sharp:.2e}; constant + 0.05 fails for {}/{} (n,p), first witnesses at a <= {largest_witness:.2e}",
            np_grid().len() - missing_failures.len(),
            np_grid().len()
        ),
    ))
}

fn hyper_sharp_points(ctx: &AcceptanceContext) -> Result<Verdict> {
    let tuples = [(-1.0, 2.0, 4.0), (0.0, 1.0, 2.0), (0.0, 2.0, 4.0), (0.0, 6.0, 8.0), (1.0, 6.0, 8.0), (2.0, 6.0, 8.0)];
    let b_grid = default_b_grid();
    let found = collect(par_map(&tuples, ctx.config, |integ, &(m, p, q)| {
        Ok((r_star(integ, m, p, q, 1e-3, &b_grid, 1e-9)?, necessary_r(m, p, q)?))
    }))?;
    let worst = found.iter().map(|(r, n)| (r - n).abs()).fold(0.0, f64::max);
    let listing: Vec<String> = tuples
        .iter()
        .zip(&found)
        .map(|((m, p, q), (r, _))| format!("({m},{p},{q})->{r:.4}"))
        .collect();
    Ok(Verdict::new(worst <= 5e-3, format!("max |r* - sqrt((p+m)/(q+m))| = {worst:.2e}; {}", listing.join(" "))))
}

fn theorem_as_hypercontractivity(ctx: &AcceptanceContext) -> Result<Verdict> {
    let b_grid = default_b_grid();
    let cells: Vec<(u32, f64)> =
        (2..=6).flat_map(|n| SPHERE_PS.iter().map(move |&p| (n, p))).collect();
    let reports = collect(par_map(&cells, ctx.config, |integ, &(n, p)| {
        let m = n as f64 - 2.0;
        let tuple = HypTuple::new(m, p, 2.0, ((p + m) / n as f64).sqrt())?;
        check_hyp(integ, &tuple, &b_grid, 1e-9)
    }))?;
    let failed: Vec<_> = cells.iter().zip(&reports).filter(|(_, r)| !r.pass).map(|(c, _)| *c).collect();
    let worst = reports.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    Ok(Verdict::new(
        failed.is_empty(),
        format!("worst margin {worst:.2e}; failing (n,p): {failed:?}"),
    ))
}

fn log_sobolev_chain(ctx: &AcceptanceContext) -> Result<Verdict> {
    let report = logsobolev_report(
        ctx.config,
        &logsobolev::DEFAULT_LAMBDAS,
        &logsobolev::DEFAULT_S_VALUES,
        &logsobolev::DEFAULT_BTILDES,
        1e-9,
    )
    .map_err(|e| Error::Argument(e.to_string()))?;
    let fields: Vec<String> = report
        .summary
        .iter()
        .filter(|(k, _)| !k.starts_with("h_") && !k.starts_with("phi_"))
        .map(|(k, v)| format!("{k}={}", v.text()))
        .collect();
    let key_pass = |k: &str| {
        report.summary.iter().any(|(name, v)| name == k && *v == crate::report::Cell::Bool(true))
    };
    let pass = ["mw_pass", "log_pass", "in02_pass", "moment_pass", "norm_monotone_pass"]
        .iter()
        .all(|k| key_pass(k))
        && report.summary.iter().any(|(k, v)| k == "chain_violations" && *v == crate::report::Cell::Int(0));
    Ok(Verdict::new(pass, fields.join(" ")))
}

fn proof_internals(ctx: &AcceptanceContext) -> Result<Verdict> {
    let integ = sharpconvex_core::Integrator::new(ctx.config);
    let mut notes = Vec::new();
    let mut pass = true;

    let ps: Vec<f64> = (0..7).map(|k| 0.1 + 0.15 * k as f64).collect();
    let mut worst_phi = f64::INFINITY;
    for &p in &ps {
        let r = verify_phi_nonnegative(p, 2000, 1e-12)?;
        worst_phi = worst_phi.min(r.worst_margin);
        pass &= r.pass;
    }
    notes.push(format!("min phi {worst_phi:.3e}"));

    let a_grid = logspace(1e-2, 1e2, 200)?;
    let mut worst_n3 = f64::INFINITY;
    for p in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let lower = verify_n3_bound(&integ, p, &a_grid, 1e-9)?;
        let upper = verify_n3_chain(&integ, p, &a_grid, 1e-9)?;
        worst_n3 = worst_n3.min(lower.worst_margin).min(upper.worst_margin);
        pass &= lower.pass && upper.pass;
    }
    notes.push(format!("n=3 sandwich worst {worst_n3:.3e}"));

    let qs = linspace(0.0, 1.0, 11)?;
    let (region, w) = verify_ee6_region(&qs, 101, 1e-12)?;
    pass &= region.pass;
    notes.push(format!("ee6 region worst {:.3e} at (q,x,y)=({},{},{})", region.worst_margin, w.q, w.x, w.y));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_identity: f64 = 0.0;
    for _ in 0..10_000 {
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        let factored = (1.0 - x) * (x - y) * (2.0 * x * x + y - 1.0);
        worst_identity = worst_identity.max((ee6_margin(2.0, x, y) - factored).abs());
    }
    pass &= worst_identity <= 1e-12;
    notes.push(format!("q=2 factorization max error {worst_identity:.2e}"));

    let negative = ee6_margin(2.0, 0.4, 0.3);
    pass &= negative < 0.0;
    notes.push(format!("ee6(2,0.4,0.3)={negative:.4}"));
    Ok(Verdict::new(pass, notes.join("; ")))
}

fn sign_structure(ctx: &AcceptanceContext) -> Result<Verdict> {
    let lambdas = [0.0, 0.5, 1.0, 2.0];
    let u_grid = default_u_grid();
    let h = collect(par_map(&lambdas, ctx.config, |integ, &l| h_structure(integ, l, &u_grid)))?;
    let cells: Vec<(f64, f64)> =
        lambdas.iter().flat_map(|&l| [0.1, 0.5, 0.9].into_iter().map(move |a| (l, a))).collect();
    let phi = collect(par_map(&cells, ctx.config, |integ, &(l, a)| {
        phi_r_single_sign_change(integ, l, a, &default_r_grid(a))
    }))?;
    let h_ok = h.iter().filter(|r| r.pass).count();
    let phi_ok = phi.iter().filter(|r| r.pass).count();
    let indeterminate = phi.iter().filter(|r| r.indeterminate).count();
    let worst_zero = h.iter().map(|r| r.zero_residual).fold(0.0, f64::max);
    Ok(Verdict::new(
        h_ok == h.len() && phi_ok == phi.len(),
        format!(
            "h structure {h_ok}/{} (max |h| at -1,0,1: {worst_zero:.1e}); phi single sign change {phi_ok}/{} ({indeterminate} indeterminate)",
            h.len(),
            phi.len()
        ),
    ))
}

fn sphere_circle(ctx: &AcceptanceContext) -> Result<Verdict> {
    let mut cells = Vec::new();
    for n in [2u32, 3, 5] {
        for p in [1.0, 1.7, 2.0] {
            for a in [0.5, 1.0, 2.3] {
                cells.push((n, p, a));
            }
        }
    }
    let gaps = collect(par_map(&cells, ctx.config, |integ, &(n, p, a)| {
        sphere_circle_equivalence_check(integ, n, p, a)
    }))?;
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    Ok(Verdict::new(worst <= 1e-9, format!("max discrepancy {worst:.2e}")))
}

static CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "p=2 identity", check: p2_identity },
    Criterion { id: 2, name: "n=3 closed form", check: n3_closed_form },
    Criterion { id: 3, name: "second moment", check: second_moment },
    Criterion { id: 4, name: "sharp constants", check: sharp_constants },
    Criterion { id: 5, name: "theorem verification", check: theorem_verification },
    Criterion { id: 6, name: "hypercontractivity sharp points", check: hyper_sharp_points },
    Criterion { id: 7, name: "theorem as hypercontractivity", check: theorem_as_hypercontractivity },
    Criterion { id: 8, name: "log-Sobolev chain", check: log_sobolev_chain },
    Criterion { id: 9, name: "proof-internal functions", check: proof_internals },
    Criterion { id: 10, name: "h/phi sign structure", check: sign_structure },
    Criterion { id: 11, name: "sphere-circle equivalence", check: sphere_circle },
];

pub fn criteria() -> &'static [Criterion] {
    &CRITERIA
}

/// Runs one criterion; numerical errors count as failures.
pub fn run_one(ctx: &AcceptanceContext, c: &Criterion) -> Outcome {
    let start = Instant::now();
    let verdict = (c.check)(ctx).unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
    Outcome {
        id: c.id,
        name: c.name,
        pass: verdict.pass,
        detail: verdict.detail,
        elapsed: start.elapsed(),
    }
}

/// Runs the selected criteria (all when `only` is `None`) in numeric order.
pub fn run_selected(ctx: &AcceptanceContext, only: Option<&[u8]>) -> Vec<Outcome> {
    criteria()
        .iter()
        .filter(|c| only.map_or(true, |ids| ids.contains(&c.id)))
        .map(|c| run_one(ctx, c))
        .collect()
}
