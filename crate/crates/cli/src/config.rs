//! Run configuration, grid strings and the command-line surface.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use sharpconvex_core::grid::{linspace, logspace};
use sharpconvex_core::quadrature::{IntegratorConfig, MAX_ORDER};
use sharpconvex_core::DEFAULT_TOLERANCE;

/// Environment variable overriding the default rule order.
pub const QUAD_ORDER_ENV: &str = "SHARPCONVEX_QUAD_ORDER";
/// Rule order used when neither the flag nor the environment sets one.
pub const DEFAULT_QUAD_ORDER: usize = 256;
const TOLERANCE_RANGE: (f64, f64) = (1e-12, 1e-3);

/// An invalid configuration; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyTheorem,
    BestLambda,
    RStar,
    Scan,
    Logsobolev,
    Figures,
    Selftest,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::VerifyTheorem => "verify-theorem",
            Command::BestLambda => "best-lambda",
            Command::RStar => "r-star",
            Command::Scan => "scan",
            Command::Logsobolev => "logsobolev",
            Command::Figures => "figures",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A grid given on the command line, with its source text kept for the echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridArg {
    pub spec: String,
    pub points: Vec<f64>,
}

/// One keyed parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Real(f64),
    Grid(GridArg),
    Text(String),
}

/// Parses `start:stop:count[:lin|log]`, a comma list, or a single number.
pub fn parse_grid(spec: &str) -> Result<GridArg, ConfigError> {
    let text = spec.trim();
    if text.is_empty() {
        return Err(bad("empty grid"));
    }
    let number = |s: &str| -> Result<f64, ConfigError> {
        let v: f64 = s.trim().parse().map_err(|_| bad(format!("not a number: {s:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(format!("grid value must be finite: {s:?}")))
        }
    };
    let points = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if !(parts.len() == 3 || parts.len() == 4) {
            return Err(bad(format!("grid {text:?} is not start:stop:count[:lin|log]")));
        }
        let start = number(parts[0])?;
        let stop = number(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("grid count must be a positive integer: {:?}", parts[2])))?;
        if count == 0 {
            return Err(bad("grid count must be positive"));
        }
        let spacing = parts.get(3).map(|s| s.trim()).unwrap_or("lin");
        let built = match spacing {
            "lin" => linspace(start, stop, count),
            "log" => logspace(start, stop, count),
            other => return Err(bad(format!("unknown grid spacing {other:?}"))),
        };
        built.map_err(|e| bad(format!("grid {text:?}: {e}")))?
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    Ok(GridArg { spec: text.to_string(), points })
}

/// Rule order from `SHARPCONVEX_QUAD_ORDER`, else the default.
pub fn default_quad_order() -> Result<usize, ConfigError> {
    match std::env::var(QUAD_ORDER_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| bad(format!("{QUAD_ORDER_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_QUAD_ORDER),
    }
}

/// Everything a run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, Param>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub quad_order: usize,
    pub tolerance: f64,
    pub jobs: Option<usize>,
}

#[derive(Serialize)]
struct Echo<'a> {
    command: Command,
    params: &'a BTreeMap<String, Param>,
    quad_order: usize,
    tolerance: f64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            params: BTreeMap::new(),
            output_path: None,
            format: Format::Csv,
            quad_order: DEFAULT_QUAD_ORDER,
            tolerance: DEFAULT_TOLERANCE,
            jobs: None,
        }
    }

    pub fn set(&mut self, key: &str, value: Param) -> &mut Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=MAX_ORDER).contains(&self.quad_order) {
            return Err(bad(format!("quad order must lie in [1, {MAX_ORDER}]")));
        }
        let (lo, hi) = TOLERANCE_RANGE;
        if !(self.tolerance >= lo && self.tolerance <= hi) {
            return Err(bad(format!("tolerance must lie in [{lo:e}, {hi:e}]")));
        }
        if self.jobs == Some(0) {
            return Err(bad("--jobs must be positive"));
        }
        for (key, value) in &self.params {
            if let Param::Grid(g) = value {
                if g.points.is_empty() {
                    return Err(bad(format!("grid {key} is empty")));
                }
            }
        }
        Ok(())
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig { order: self.quad_order, ..IntegratorConfig::default() }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.params.get(key) {
            Some(Param::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Param::Real(v)) => Some(*v),
            Some(Param::Int(v)) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn grid(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key) {
            Some(Param::Grid(g)) => Some(&g.points),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.params.get(key) {
            Some(Param::Text(t)) => Some(t),
            _ => None,
        }
    }

    pub fn require_real(&self, key: &str) -> Result<f64, ConfigError> {
        self.real(key).ok_or_else(|| bad(format!("--{key} is required")))
    }

    pub fn require_grid(&self, key: &str) -> Result<&[f64], ConfigError> {
        self.grid(key).ok_or_else(|| bad(format!("--{key} is required")))
    }

    /// The config echo written into JSON reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(Echo {
            command: self.command,
            params: &self.params,
            quad_order: self.quad_order,
            tolerance: self.tolerance,
        })
        .expect("config echo serializes")
    }

    /// SHA-256 of the echo framed as a git blob (`blob <len>\0<json>`).
    pub fn params_hash(&self) -> String {
        let body = serde_json::to_string(&self.echo()).expect("config echo serializes");
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", body.len()).as_bytes());
        hasher.update(body.as_bytes());
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(name = "sharpconvex", version, about = "Numerical verification of sharp sphere convexity and ultraspherical hypercontractivity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Gauss rule order (default: $SHARPCONVEX_QUAD_ORDER or 256)
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Verification tolerance on margins
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Report file (figures: output directory); stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Check the sphere inequality at a given constant over an a-grid
    VerifyTheorem {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        /// Constant to test (default: the sharp value)
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        a_grid: Option<String>,
    },
    /// Extract the best constant numerically
    BestLambda {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long)]
        a_grid: Option<String>,
    },
    /// Largest r for which the hypercontractive inequality holds
    RStar {
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Also check the inequality at this r
        #[arg(long, allow_hyphen_values = true)]
        r: Option<f64>,
        #[arg(long)]
        precision: Option<f64>,
        #[arg(long)]
        b_grid: Option<String>,
    },
    /// r* over a grid of (m, p, q)
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long)]
        precision: Option<f64>,
        #[arg(long)]
        b_grid: Option<String>,
    },
    /// Verify the log-Sobolev chain on parameter grids
    Logsobolev {
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        s: Option<String>,
        /// Grid of the rescaled coefficient
        #[arg(long)]
        b_grid: Option<String>,
    },
    /// Write figure data as CSV
    Figures {
        /// fig1, fig2 or all
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Run the acceptance suite
    Selftest {
        /// Comma list of criterion numbers
        #[arg(long)]
        only: Option<String>,
    },
}

fn grid_param(cfg: &mut RunConfig, key: &str, spec: Option<String>) -> Result<(), ConfigError> {
    if let Some(spec) = spec {
        cfg.set(key, Param::Grid(parse_grid(&spec)?));
    }
    Ok(())
}

fn real_param(cfg: &mut RunConfig, key: &str, value: Option<f64>) {
    if let Some(v) = value {
        cfg.set(key, Param::Real(v));
    }
}

impl RunConfig {
    /// Builds and validates a configuration from parsed arguments.
    pub fn from_cli(cli: Cli) -> Result<RunConfig, ConfigError> {
        let command = match &cli.command {
            Sub::VerifyTheorem { .. } => Command::VerifyTheorem,
            Sub::BestLambda { .. } => Command::BestLambda,
            Sub::RStar { .. } => Command::RStar,
            Sub::Scan { .. } => Command::Scan,
            Sub::Logsobolev { .. } => Command::Logsobolev,
            Sub::Figures { .. } => Command::Figures,
            Sub::Selftest { .. } => Command::Selftest,
        };
        let mut cfg = RunConfig::new(command);
        cfg.output_path = cli.common.out;
        cfg.format = cli.common.format;
        cfg.tolerance = cli.common.tol;
        cfg.jobs = cli.common.jobs;
        cfg.quad_order = match cli.common.quad_order {
            Some(order) => order,
            None => default_quad_order()?,
        };
        match cli.command {
            Sub::VerifyTheorem { n, p, lambda, a_grid } => {
                cfg.set("n", Param::Int(n.into())).set("p", Param::Real(p));
                real_param(&mut cfg, "lambda", lambda);
                grid_param(&mut cfg, "a-grid", a_grid)?;
            }
            Sub::BestLambda { n, p, a_grid } => {
                cfg.set("n", Param::Int(n.into())).set("p", Param::Real(p));
                grid_param(&mut cfg, "a-grid", a_grid)?;
            }
            Sub::RStar { m, p, q, r, precision, b_grid } => {
                cfg.set("m", Param::Real(m)).set("p", Param::Real(p)).set("q", Param::Real(q));
                real_param(&mut cfg, "r", r);
                real_param(&mut cfg, "precision", precision);
                grid_param(&mut cfg, "b-grid", b_grid)?;
            }
            Sub::Scan { m, p, q, precision, b_grid } => {
                grid_param(&mut cfg, "m", m)?;
                grid_param(&mut cfg, "p", p)?;
                grid_param(&mut cfg, "q", q)?;
                real_param(&mut cfg, "precision", precision);
                grid_param(&mut cfg, "b-grid", b_grid)?;
            }
            Sub::Logsobolev { lambda, s, b_grid } => {
                grid_param(&mut cfg, "lambda", lambda)?;
                grid_param(&mut cfg, "s", s)?;
                grid_param(&mut cfg, "b-grid", b_grid)?;
            }
            Sub::Figures { which } => {
                if !matches!(which.as_str(), "fig1" | "fig2" | "all") {
                    return Err(bad(format!("--which must be fig1, fig2 or all, got {which:?}")));
                }
                cfg.set("which", Param::Text(which));
            }
            Sub::Selftest { only } => {
                if let Some(only) = only {
                    cfg.set("only", Param::Text(only));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:1:3").unwrap().points, vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0:1:3:lin").unwrap().points, vec![0.0, 0.5, 1.0]);
        let g = parse_grid("1e-2:1e2:5:log").unwrap().points;
        assert_eq!(g.len(), 5);
        assert!((g[2] - 1.0).abs() < 1e-15);
        assert_eq!(parse_grid("-1, 0,2.5").unwrap().points, vec![-1.0, 0.0, 2.5]);
        assert_eq!(parse_grid("7").unwrap().points, vec![7.0]);
        for bad in ["", "1:2", "1:2:0", "1:2:3:cubic", "a,b", "0:1:3:log", "1:2:x", "inf"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new(Command::Scan);
        assert!(cfg.validate().is_ok());
        cfg.tolerance = 1e-2;
        assert!(cfg.validate().is_err());
        cfg.tolerance = 1e-9;
        cfg.quad_order = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let mut a = RunConfig::new(Command::VerifyTheorem);
        a.set("n", Param::Int(3)).set("p", Param::Real(1.0));
        let b = a.clone();
        assert_eq!(a.params_hash(), b.params_hash());
        assert_eq!(a.params_hash().len(), 64);
        let mut c = a.clone();
        c.set("p", Param::Real(1.5));
        assert_ne!(a.params_hash(), c.params_hash());
        // output location does not change the parameters
        let mut d = a.clone();
        d.output_path = Some("x.csv".into());
        assert_eq!(a.params_hash(), d.params_hash());
    }

    #[test]
    fn cli_mapping() {
        let cli = Cli::try_parse_from(["sharpconvex", "r-star", "--m", "-1", "--p", "2", "--q", "4"]).unwrap();
        let cfg = RunConfig::from_cli(cli).unwrap();
        assert_eq!(cfg.command, Command::RStar);
        assert_eq!(cfg.real("m"), Some(-1.0));
        let cli = Cli::try_parse_from(["sharpconvex", "scan", "--m", "-1,0", "--tol", "1e-10"]).unwrap();
        let cfg = RunConfig::from_cli(cli).unwrap();
        assert_eq!(cfg.grid("m"), Some(&[-1.0, 0.0][..]));
        assert_eq!(cfg.tolerance, 1e-10);
        let cli = Cli::try_parse_from(["sharpconvex", "figures", "--which", "fig3"]).unwrap();
        assert!(RunConfig::from_cli(cli).is_err());
    }
}
