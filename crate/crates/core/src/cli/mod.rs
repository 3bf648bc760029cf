//! The `hballs` command line: `extend`, `verify` and `landau`.
//!
//! Settings resolve as flags, then a `key=value` config file, then built-in
//! defaults. `HBALLS_SEED` replaces only the default seed.

pub mod parse;
pub mod suites;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::Mapping;
use crate::extension::{boundary_from_spec, h_extend, DEFAULT_GUARD};
use crate::norms::directions;
use crate::quadrature::{default_rule, RNG_NAME};
use crate::theorems::{landau_constants, CheckReport};
use parse::{grid_radii, parse_f64_list, parse_points, parse_usize_list, PointSpec};
use suites::{run_suite, Suite, SuiteConfig};

pub const REPORT_SCHEMA: &str = "hballs.verify.v1";
pub const EXTEND_SCHEMA: &str = "hballs.extend.v1";
pub const LANDAU_SCHEMA: &str = "hballs.landau.v1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ENV: &str = "HBALLS_SEED";

#[derive(Debug, Parser)]
#[command(name = "hballs", version, about = "Hyperbolic-harmonic mappings on the unit ball: extensions, inequality checks, Landau constants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the extension of boundary data at points, as CSV.
    Extend(ExtendArgs),
    /// Run a check suite and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate the Landau-Bloch radii.
    Landau(LandauArgs),
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Boundary data, e.g. `const:1`, `re`, `coord:2`, `fourier`, `id`.
    #[arg(long)]
    pub boundary: Option<String>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `a+bi[,c+di,...]` points separated by `;`, or `grid:rmin:rmax:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Directions crossed with a grid (1 means the first coordinate axis).
    #[arg(long)]
    pub dirs: Option<usize>,
    #[arg(long)]
    pub guard: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: Option<Suite>,
    /// Dimensions: `1`, `1,2` or `1..2`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "m")]
    pub m: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write `wall_ms: null` so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct LandauArgs {
    #[arg(long, default_value = "1")]
    pub n: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long = "m", default_value = "1", allow_hyphen_values = true)]
    pub m: String,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Exit {
    code: i32,
    msg: String,
}

fn config_error(msg: impl Into<String>) -> Exit {
    Exit { code: 2, msg: msg.into() }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

struct Layered {
    file: BTreeMap<String, String>,
}

impl Layered {
    fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self, Exit> {
        let file = match path {
            Some(p) => read_config(p).map_err(config_error)?,
            None => BTreeMap::new(),
        };
        if let Some(k) = file.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(config_error(format!("unknown config key '{k}'")));
        }
        Ok(Self { file })
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Exit> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| config_error(format!("bad value '{v}' for config key '{key}'"))),
            None => Ok(None),
        }
    }

    fn seed(&self, flag: Option<u64>) -> Result<u64, Exit> {
        if let Some(s) = self.get(flag, "seed")? {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| config_error(format!("bad {SEED_ENV} value '{v}'"))),
            Err(_) => Ok(0),
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Exit> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Exit {
            code: 2,
            msg: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_point(z: &[Complex64]) -> String {
    z.iter()
        .map(|c| format!("{}{:+}i", c.re, c.im))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_extend(args: ExtendArgs) -> Result<(), Exit> {
    let cfg = Layered::load(
        args.config.as_deref(),
        &["n", "boundary", "nodes", "seed", "points", "dirs", "guard"],
    )?;
    let n = cfg.get(args.n, "n")?.unwrap_or(1);
    let boundary = cfg.get(args.boundary, "boundary")?.unwrap_or_else(|| "const:1".into());
    let nodes = cfg.get(args.nodes, "nodes")?;
    let seed = cfg.seed(args.seed)?;
    let points = cfg
        .get(args.points, "points")?
        .ok_or_else(|| config_error("--points is required"))?;
    let dirs = cfg.get(args.dirs, "dirs")?.unwrap_or(1);
    let guard = cfg.get(args.guard, "guard")?.unwrap_or(DEFAULT_GUARD);

    let psi = boundary_from_spec(&boundary, n).map_err(|e| config_error(e.to_string()))?;
    let rule = default_rule(n, nodes, seed).map_err(|e| config_error(e.to_string()))?;
    let ext = h_extend(&psi, Arc::new(rule))
        .and_then(|e| e.with_guard(guard))
        .map_err(|e| config_error(e.to_string()))?;

    let pts: Vec<Vec<Complex64>> = match parse_points(&points).map_err(config_error)? {
        PointSpec::Explicit(p) => p,
        PointSpec::Grid { rmin, rmax, count } => {
            if dirs == 0 {
                return Err(config_error("--dirs must be positive"));
            }
            let ds = if dirs == 1 {
                let mut e1 = vec![Complex64::default(); n];
                e1[0] = Complex64::from(1.0);
                vec![e1]
            } else {
                directions(n, dirs).map_err(|e| config_error(e.to_string()))?
            };
            grid_radii(rmin, rmax, count)
                .into_iter()
                .flat_map(|r| ds.iter().map(move |d| d.iter().map(|c| c * r).collect()))
                .collect()
        }
    };
    if let Some(p) = pts.iter().find(|p| p.len() != n) {
        return Err(config_error(format!("point {} has {} coordinates, expected {n}", fmt_point(p), p.len())));
    }

    let d = ext.out_dim();
    let mut csv = format!("# {EXTEND_SCHEMA} boundary={boundary} n={n} rule={:?} nodes={} seed={seed}\n", ext.rule().meta().kind, ext.rule().len());
    let mut header: Vec<String> = (1..=n).flat_map(|k| [format!("re_z{k}"), format!("im_z{k}")]).collect();
    if d == 1 {
        header.extend(["re_f".to_string(), "im_f".to_string()]);
    } else {
        header.extend((1..=d).flat_map(|j| [format!("re_f{j}"), format!("im_f{j}")]));
    }
    csv.push_str(&header.join(","));
    csv.push('\n');
    for p in &pts {
        let v = ext.eval(p).map_err(|e| Exit {
            code: 3,
            msg: format!("numerical failure at point {}: {e}", fmt_point(p)),
        })?;
        let row: Vec<String> = p.iter().chain(&v).flat_map(|c| [(c.re + 0.0).to_string(), (c.im + 0.0).to_string()]).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_output(args.out.as_deref(), &csv)
}

#[derive(Serialize)]
struct ReportConfig<'a> {
    #[serde(flatten)]
    suite: &'a SuiteConfig,
    rng: &'static str,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    passed: usize,
    failed: usize,
    wall_ms: Option<u64>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    version: &'static str,
    config: ReportConfig<'a>,
    checks: &'a [CheckReport],
    summary: Summary,
}

/// Resolves `verify` settings into a suite configuration.
fn verify_config(args: &VerifyArgs) -> Result<SuiteConfig, Exit> {
    let cfg = Layered::load(
        args.config.as_deref(),
        &["suite", "n", "nodes", "seed", "rmax", "trials", "samples", "alpha", "m"],
    )?;
    let d = SuiteConfig::default();
    let n = match cfg.get(args.n.clone(), "n")? {
        Some(s) => parse_usize_list(&s).map_err(config_error)?,
        None => d.n.clone(),
    };
    let out = SuiteConfig {
        suite: cfg.get(args.suite, "suite")?.unwrap_or(d.suite),
        n,
        nodes: cfg.get(args.nodes, "nodes")?,
        seed: cfg.seed(args.seed)?,
        rmax: cfg.get(args.rmax, "rmax")?.unwrap_or(d.rmax),
        trials: cfg.get(args.trials, "trials")?.unwrap_or(d.trials),
        samples: cfg.get(args.samples, "samples")?,
        alpha: cfg.get(args.alpha, "alpha")?.unwrap_or(d.alpha),
        m: cfg.get(args.m, "m")?.unwrap_or(d.m),
    };
    out.validate().map_err(|e| config_error(e.to_string()))?;
    Ok(out)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Exit> {
    let cfg = verify_config(&args)?;
    let start = Instant::now();
    let checks = run_suite(&cfg).map_err(|e| Exit {
        code: 1,
        msg: format!("suite {} aborted: {e}", cfg.suite),
    })?;
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    let report = Report {
        schema: REPORT_SCHEMA,
        version: VERSION,
        config: ReportConfig {
            suite: &cfg,
            rng: RNG_NAME,
        },
        checks: &checks,
        summary: Summary {
            total: checks.len(),
            passed,
            failed,
            wall_ms: (!args.no_timing).then(|| start.elapsed().as_millis() as u64),
        },
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_output(args.out.as_deref(), &json)?;
    eprintln!("{}: {passed}/{} checks passed", cfg.suite, checks.len());
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {} lhs={} rhs={} tol={} inputs={}", c.check_id, c.lhs, c.rhs, c.tolerance.total, c.inputs);
    }
    if failed > 0 {
        return Err(Exit {
            code: 1,
            msg: format!("{failed} check(s) failed"),
        });
    }
    Ok(())
}

fn cmd_landau(args: LandauArgs) -> Result<(), Exit> {
    let ns = parse_usize_list(&args.n).map_err(config_error)?;
    let alphas = parse_f64_list(&args.alpha).map_err(config_error)?;
    let ms = parse_f64_list(&args.m).map_err(config_error)?;
    let mut table = String::new();
    let mut csv = format!("# {LANDAU_SCHEMA}\nn,alpha,M,rho,half_rho,R_lower\n");
    for &n in &ns {
        for &alpha in &alphas {
            for &m in &ms {
                let c = landau_constants(n, alpha, m).map_err(|e| config_error(e.to_string()))?;
                let _ = writeln!(
                    table,
                    "n={n} alpha={alpha} M={m}: {:.10}, {:.10}, {:.10}",
                    c.rho, c.half_rho, c.r_lower
                );
                let _ = writeln!(csv, "{n},{alpha},{m},{},{},{}", c.rho, c.half_rho, c.r_lower);
            }
        }
    }
    print!("{table}");
    if let Some(p) = args.out.as_deref() {
        write_output(Some(p), &csv)?;
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Extend(a) => cmd_extend(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Landau(a) => cmd_landau(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            e.code
        }
    }
}
