//! Command implementations.

use std::fmt;
use std::path::PathBuf;

use sharpconvex_core::convexity::{
    best_lambda, lambda_star, sharp_lambda, verify_theorem, TheoremParams,
};
use sharpconvex_core::grid::logspace;
use sharpconvex_core::logsobolev::{
    self, chain_row, default_r_grid, default_u_grid, h_structure, integration_by_parts_sides,
    phi_r_single_sign_change, summarize_chain, verify_moment_comparison, verify_norm_monotone_in_s,
    LogSobParams,
};
use sharpconvex_core::ultraspherical::{
    check_hyp, default_b_grid, scan_cell, scan_cells, HypTuple, ScanStatus,
};
use sharpconvex_core::{Error, Integrator, VerifyReport};

use crate::acceptance::{self, AcceptanceContext};
use crate::config::{Command, ConfigError, RunConfig};
use crate::figures;
use crate::parallel::par_map;
use crate::report::{Cell, Report};

/// Default radius grid of `verify-theorem`.
pub const THEOREM_A_GRID: (f64, f64, usize) = (1e-3, 1e2, 400);
/// Default radius grid of `best-lambda`.
pub const BEST_LAMBDA_A_GRID: (f64, f64, usize) = (1e-3, 10.0, 60);
/// Default bisection precision of `r-star`.
pub const R_STAR_PRECISION: f64 = 1e-4;
/// Default bisection precision of `scan`.
pub const SCAN_PRECISION: f64 = 1e-3;
/// Radii of the `phi(r)` sign checks.
pub const PHI_RADII: [f64; 3] = [0.1, 0.5, 0.9];

/// Why a run did not produce a report.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numeric(Error),
    Io(std::io::Error),
}

impl RunError {
    /// Process exit status: 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid configuration: {e}"),
            RunError::Numeric(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numeric(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(ConfigError(msg.into()))
}

/// Runs the configured command and returns its report (not yet written).
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    match cfg.command {
        Command::VerifyTheorem => run_verify_theorem(cfg),
        Command::BestLambda => run_best_lambda(cfg),
        Command::RStar => run_r_star(cfg),
        Command::Scan => run_scan(cfg),
        Command::Logsobolev => run_logsobolev(cfg),
        Command::Figures => run_figures(cfg),
        Command::Selftest => run_selftest(cfg),
    }
}

fn dimension(cfg: &RunConfig) -> Result<u32, RunError> {
    let n = cfg.int("n").ok_or_else(|| config_err("--n is required"))?;
    u32::try_from(n).map_err(|_| config_err("--n must be a nonnegative integer"))
}

fn grid_or(cfg: &RunConfig, key: &str, default: (f64, f64, usize)) -> Result<Vec<f64>, RunError> {
    match cfg.grid(key) {
        Some(g) => Ok(g.to_vec()),
        None => Ok(logspace(default.0, default.1, default.2)?),
    }
}

fn run_verify_theorem(cfg: &RunConfig) -> Result<Report, RunError> {
    let n = dimension(cfg)?;
    let p = cfg.require_real("p")?;
    let sharp = sharp_lambda(n, p).map_err(|e| config_err(e.to_string()))?;
    let lambda = cfg.real("lambda").unwrap_or(sharp);
    let a_grid = grid_or(cfg, "a-grid", THEOREM_A_GRID)?;
    TheoremParams::new(n, p, lambda, a_grid.clone()).map_err(|e| config_err(e.to_string()))?;

    let tol = cfg.tolerance;
    let points = par_map(&a_grid, cfg.integrator_config(), |integ, &a| {
        verify_theorem(integ, &TheoremParams::new(n, p, lambda, vec![a])?, tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut report = Report::new(Command::VerifyTheorem, &["a", "margin", "pass", "quad_order"]);
    let mut total: Option<VerifyReport> = None;
    for (a, r) in a_grid.iter().zip(&points) {
        report.push_row(vec![(*a).into(), r.worst_margin.into(), r.pass.into(), r.quad_order.into()]);
        total = Some(match total {
            None => *r,
            Some(t) => t.merge(*r),
        });
    }
    let total = total.expect("grid is nonempty");
    report.note("n", n);
    report.note("p", p);
    report.note("lambda", lambda);
    report.note("sharp_lambda", sharp);
    report.note_verify("", &total);
    report.pass = total.pass;
    Ok(report)
}

fn run_best_lambda(cfg: &RunConfig) -> Result<Report, RunError> {
    let n = dimension(cfg)?;
    let p = cfg.require_real("p")?;
    let sharp = sharp_lambda(n, p).map_err(|e| config_err(e.to_string()))?;
    let a_grid = grid_or(cfg, "a-grid", BEST_LAMBDA_A_GRID)?;
    let integ = Integrator::new(cfg.integrator_config());
    let best = best_lambda(&integ, n, p, &a_grid).map_err(|e| match e {
        Error::Argument(msg) => config_err(msg),
        other => RunError::Numeric(other),
    })?;
    let values = par_map(&a_grid, cfg.integrator_config(), |integ, &a| lambda_star(integ, n, p, a))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let mut report = Report::new(Command::BestLambda, &["a", "lambda_star"]);
    for (a, l) in a_grid.iter().zip(values) {
        report.push_row(vec![(*a).into(), l.into()]);
    }
    report.note("n", n);
    report.note("p", p);
    report.note("value", best.value);
    report.note("argmin", best.argmin);
    report.note("limit_at_zero", best.limit_at_zero);
    report.note("tolerance", best.tolerance);
    report.note("sharp_lambda", sharp);
    report.note("gap", best.limit_at_zero - sharp);
    Ok(report)
}

fn run_r_star(cfg: &RunConfig) -> Result<Report, RunError> {
    let m = cfg.require_real("m")?;
    let p = cfg.require_real("p")?;
    let q = cfg.require_real("q")?;
    let precision = cfg.real("precision").unwrap_or(R_STAR_PRECISION);
    let b_grid = cfg.grid("b-grid").map(<[f64]>::to_vec).unwrap_or_else(default_b_grid);
    HypTuple::new(m, p, q, 0.0).map_err(|e| config_err(e.to_string()))?;
    if !(1e-6..=1e-2).contains(&precision) {
        return Err(config_err("--precision must lie in [1e-6, 1e-2]"));
    }
    let integ = Integrator::new(cfg.integrator_config());
    let row = scan_cell(&integ, m, p, q, precision, &b_grid, cfg.tolerance);

    let mut report = Report::new(
        Command::RStar,
        &["m", "p", "q", "r_star", "necessary_r", "ratio", "label"],
    );
    report.pass = !matches!(row.status, ScanStatus::Failed(_));
    report.push_row(scan_row_cells(&row));
    report.note("r_star", row.r_star);
    report.note("necessary_r", row.necessary_r);
    report.note("precision", precision);
    if let ScanStatus::Failed(e) = &row.status {
        report.note("error", e.to_string());
    }
    if let Some(r) = cfg.real("r") {
        let tuple = HypTuple::new(m, p, q, r).map_err(|e| config_err(e.to_string()))?;
        let check = check_hyp(&integ, &tuple, &b_grid, cfg.tolerance)?;
        report.note("r", r);
        report.note_verify("check", &check);
        report.pass &= check.pass;
    }
    Ok(report)
}

fn scan_row_cells(row: &sharpconvex_core::ultraspherical::ScanRow) -> Vec<Cell> {
    let label = match &row.status {
        ScanStatus::Failed(e) => format!("failed: {e}"),
        other => other.label().to_string(),
    };
    vec![
        row.m.into(),
        row.p.into(),
        row.q.into(),
        row.r_star.into(),
        row.necessary_r.into(),
        row.ratio.into(),
        label.into(),
    ]
}

fn run_scan(cfg: &RunConfig) -> Result<Report, RunError> {
    let m_grid = cfg.grid("m").map(<[f64]>::to_vec).unwrap_or_else(|| vec![-1.0, 0.0, 1.0, 2.0]);
    let p_grid = cfg.grid("p").map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0, 2.0, 4.0, 6.0]);
    let q_grid = cfg.grid("q").map(<[f64]>::to_vec).unwrap_or_else(|| vec![2.0, 4.0, 8.0]);
    let precision = cfg.real("precision").unwrap_or(SCAN_PRECISION);
    if !(1e-6..=1e-2).contains(&precision) {
        return Err(config_err("--precision must lie in [1e-6, 1e-2]"));
    }
    let b_grid = cfg.grid("b-grid").map(<[f64]>::to_vec).unwrap_or_else(default_b_grid);
    let cells = scan_cells(&m_grid, &p_grid, &q_grid);
    if cells.is_empty() {
        return Err(config_err("scan grid has no cell with p <= q"));
    }
    let tol = cfg.tolerance;
    let rows = par_map(&cells, cfg.integrator_config(), |integ, &(m, p, q)| {
        scan_cell(integ, m, p, q, precision, &b_grid, tol)
    });

    let mut report = Report::new(
        Command::Scan,
        &["m", "p", "q", "r_star", "necessary_r", "ratio", "label"],
    );
    let mut failed = 0usize;
    let mut consistent = 0usize;
    for row in &rows {
        match row.status {
            ScanStatus::Failed(_) => failed += 1,
            ScanStatus::ConsistentWithSharpness => consistent += 1,
            ScanStatus::BelowNecessaryBound => {}
        }
        report.push_row(scan_row_cells(row));
    }
    report.note("cells", rows.len());
    report.note("consistent_with_sharpness", consistent);
    report.note("failed", failed);
    report.note("precision", precision);
    report.pass = failed == 0;
    Ok(report)
}

const LOGSOB_COLUMNS: [&str; 8] = ["check", "lambda", "s", "b", "witness", "margin", "pass", "detail"];

#[allow(clippy::too_many_arguments)]
fn logsob_row(
    check: &str,
    lambda: f64,
    s: f64,
    b: f64,
    witness: f64,
    margin: f64,
    pass: bool,
    detail: String,
) -> Vec<Cell> {
    vec![
        check.into(),
        lambda.into(),
        s.into(),
        b.into(),
        witness.into(),
        margin.into(),
        pass.into(),
        detail.into(),
    ]
}

/// Runs every log-Sobolev check on the given grids.
pub fn logsobolev_report(
    config: sharpconvex_core::IntegratorConfig,
    lambdas: &[f64],
    s_values: &[f64],
    btildes: &[f64],
    tol: f64,
) -> Result<Report, RunError> {
    let grid = logsobolev::LogSobGrid {
        lambdas: lambdas.to_vec(),
        s_values: s_values.to_vec(),
        btildes: btildes.to_vec(),
    };
    let points = grid.points().map_err(|e| config_err(e.to_string()))?;
    if s_values.iter().any(|&s| !(s > 3.0)) || s_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(config_err("s-grid must be increasing and inside (3, inf)"));
    }
    if btildes.iter().any(|&b| !(b > 0.0)) {
        return Err(config_err("b-grid must be positive"));
    }
    let mut report = Report::new(Command::Logsobolev, &LOGSOB_COLUMNS);

    let chain = par_map(&points, config, |integ, p| {
        let row = chain_row(integ, p)?;
        let (left, right) = integration_by_parts_sides(integ, p)?;
        let ibp = -(left - right).abs() / right.abs().max(1.0);
        let moment = verify_moment_comparison(integ, p.lambda, p.s, p.btilde, tol)?;
        Ok::<_, Error>((row, ibp, moment))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<_> = chain.iter().map(|(r, _, _)| r.clone()).collect();
    let summary = summarize_chain(&rows, tol, config.order);
    let mut ibp_pass = true;
    let mut moment_pass = true;
    for (row, ibp, moment) in &chain {
        let LogSobParams { lambda, s, btilde } = row.params;
        for (name, margin) in [("mw", row.mw), ("log", row.log_ineq), ("in02", row.in02)] {
            report.push_row(logsob_row(name, lambda, s, btilde, btilde, margin, margin >= -tol, String::new()));
        }
        report.push_row(logsob_row(
            "ibp", lambda, s, btilde, btilde, *ibp, *ibp >= -tol, String::new(),
        ));
        report.push_row(logsob_row(
            "moment",
            lambda,
            s,
            btilde,
            moment.witness,
            moment.worst_margin,
            moment.pass,
            String::new(),
        ));
        ibp_pass &= *ibp >= -tol;
        moment_pass &= moment.pass;
    }

    let pairs: Vec<(f64, f64)> =
        lambdas.iter().flat_map(|&l| btildes.iter().map(move |&b| (l, b))).collect();
    let monotone = par_map(&pairs, config, |integ, &(l, b)| {
        verify_norm_monotone_in_s(integ, l, b, s_values, tol)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut monotone_pass = true;
    for (&(l, b), r) in pairs.iter().zip(&monotone) {
        report.push_row(logsob_row(
            "norm-monotone", l, f64::NAN, b, r.witness, r.worst_margin, r.pass, String::new(),
        ));
        monotone_pass &= r.pass;
    }

    let u_grid = default_u_grid();
    let h_reports = par_map(lambdas, config, |integ, &l| h_structure(integ, l, &u_grid))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut h_pass = true;
    for h in &h_reports {
        let detail = format!(
            "zero_residual={:e} h'_sign_changes={:?} expected=+-{:.6}",
            h.zero_residual, h.derivative_sign_changes, h.expected_root
        );
        report.push_row(logsob_row(
            "h-structure",
            h.lambda,
            f64::NAN,
            f64::NAN,
            h.sign.witness,
            h.sign.worst_margin,
            h.pass,
            detail,
        ));
        h_pass &= h.pass;
    }

    let phi_cells: Vec<(f64, f64)> =
        lambdas.iter().flat_map(|&l| PHI_RADII.iter().map(move |&a| (l, a))).collect();
    let phi_reports = par_map(&phi_cells, config, |integ, &(l, a)| {
        phi_r_single_sign_change(integ, l, a, &default_r_grid(a))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut phi_pass = true;
    for r in &phi_reports {
        let detail = format!(
            "transitions={} crossing={} indeterminate={} integral_moments={:e}",
            r.transitions,
            r.crossing.map_or("none".to_string(), |c| format!("{c:?}")),
            r.indeterminate,
            r.integral_moments
        );
        report.push_row(logsob_row(
            "phi-sign",
            r.lambda,
            f64::NAN,
            r.a,
            r.crossing.unwrap_or(f64::NAN),
            -r.integral_quadrature.abs(),
            r.pass,
            detail,
        ));
        phi_pass &= r.pass;
    }

    report.note("mw_pass", summary.mw.pass);
    report.note("log_pass", summary.log_ineq.pass);
    report.note("in02_pass", summary.in02.pass);
    report.note("ibp_pass", ibp_pass);
    report.note("moment_pass", moment_pass);
    report.note("norm_monotone_pass", monotone_pass);
    report.note("h_structure_pass", h_pass);
    report.note("phi_sign_pass", phi_pass);
    report.note("chain_violations", summary.chain_violations);
    report.note("min_entropy", summary.min_entropy);
    report.pass =
        summary.pass() && ibp_pass && moment_pass && monotone_pass && h_pass && phi_pass;
    Ok(report)
}

fn run_logsobolev(cfg: &RunConfig) -> Result<Report, RunError> {
    let lambdas = cfg.grid("lambda").map(<[f64]>::to_vec).unwrap_or(logsobolev::DEFAULT_LAMBDAS.to_vec());
    let s_values = cfg.grid("s").map(<[f64]>::to_vec).unwrap_or(logsobolev::DEFAULT_S_VALUES.to_vec());
    let btildes = cfg.grid("b-grid").map(<[f64]>::to_vec).unwrap_or(logsobolev::DEFAULT_BTILDES.to_vec());
    logsobolev_report(cfg.integrator_config(), &lambdas, &s_values, &btildes, cfg.tolerance)
}

fn run_figures(cfg: &RunConfig) -> Result<Report, RunError> {
    let dir = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let which = cfg.text("which").unwrap_or("all");
    let mut report = Report::new(Command::Figures, &["figure", "path", "rows"]);
    if matches!(which, "fig1" | "all") {
        let path = dir.join("fig1.csv");
        let rows = figures::write_fig1(&path)?;
        report.push_row(vec!["fig1".into(), path.display().to_string().into(), rows.into()]);
    }
    if matches!(which, "fig2" | "all") {
        let path = dir.join("fig2.csv");
        let rows = figures::write_fig2(&path)?;
        report.push_row(vec!["fig2".into(), path.display().to_string().into(), rows.into()]);
    }
    Ok(report)
}

/// Parses a comma list of criterion numbers.
pub fn parse_only(text: &str) -> Result<Vec<u8>, ConfigError> {
    let ids = text
        .split(',')
        .map(|s| s.trim().parse::<u8>().map_err(|_| ConfigError(format!("bad criterion number {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let known = acceptance::criteria().len() as u8;
    if let Some(bad) = ids.iter().find(|&&id| id == 0 || id > known) {
        return Err(ConfigError(format!("no criterion {bad}; valid numbers are 1..={known}")));
    }
    Ok(ids)
}

fn run_selftest(cfg: &RunConfig) -> Result<Report, RunError> {
    let only = cfg.text("only").map(parse_only).transpose()?;
    let ctx = AcceptanceContext { config: cfg.integrator_config() };
    let mut report = Report::new(Command::Selftest, &["criterion", "name", "pass", "detail"]);
    let mut passed = 0usize;
    for outcome in acceptance::run_selected(&ctx, only.as_deref()) {
        eprintln!("{}", outcome.line());
        passed += outcome.pass as usize;
        report.pass &= outcome.pass;
        report.push_row(vec![
            u32::from(outcome.id).into(),
            outcome.name.into(),
            outcome.pass.into(),
            outcome.detail.clone().into(),
        ]);
    }
    report.note("passed", passed);
    report.note("total", report.rows.len());
    Ok(report)
}
