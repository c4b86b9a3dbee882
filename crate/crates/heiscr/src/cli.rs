//! Command-line front end.
//!
//! Five commands share one configuration surface (`--n`, `--seed`,
//! `--tol`, `--field`, `--out`, `--format`):
//!
//! - `verify` runs the registered check suite and emits its JSON report;
//! - `eval` evaluates a field at a point;
//! - `kelvin` evaluates a generalized Kelvin transform at a point;
//! - `movesphere` runs the moving-spheres sweep and emits JSON or CSV;
//! - `list-checks` prints the registry as a name/anchor table.
//!
//! Exit codes: [`EXIT_OK`] when the command succeeds (for `verify`,
//! additionally every check passed), [`EXIT_FAILURE`] on check failures
//! and runtime errors, [`EXIT_USAGE`] on usage and configuration
//! errors. Reports go to stdout unless `--out` is given; file writes
//! are atomic (temp file in the target directory, then rename), so an
//! interrupted run never leaves a truncated report behind.
//!
//! Points on the command line are flat real coordinates
//! `x1,…,xn,y1,…,yn,t` — complex literals would fight shell quoting.
//! Field specs reuse the JSON schema of [`field_from_json`], inline or
//! as a path to a file holding the same JSON, so spec files are shared
//! between the CLI and library tests. `HEISCR_SEED` supplies the
//! default seed when `--seed` is absent.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{self, field_from_json, ScalarField};
use crate::hgroup::HPoint;
use crate::movesphere::{moving_spheres_demo, reports_to_csv, reports_to_json, SweepConfig};
use crate::verify::{self, results_to_json, CheckSpec};

/// The command ran to completion and, for `verify`, all checks passed.
pub const EXIT_OK: i32 = 0;
/// A check failed or a computation hit a runtime error.
pub const EXIT_FAILURE: i32 = 1;
/// The invocation itself was wrong: flags, field specs, configuration.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "heiscr",
    version,
    about = "Conformal analysis on the Heisenberg group: check suites, field and Kelvin-transform evaluation, moving-spheres sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Expected dimension n; rejected if it contradicts the field spec.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Root seed for all randomized sampling.
    #[arg(long, global = true, env = "HEISCR_SEED")]
    seed: Option<u64>,

    /// verify only: override the tolerance of every check.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Field spec: inline JSON (starts with '{') or a path to a JSON file.
    #[arg(long, global = true)]
    field: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; CSV applies to movesphere only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every registered check and report the results.
    Verify,
    /// Evaluate the field at a point.
    Eval {
        /// Evaluation point, x1,…,xn,y1,…,yn,t.
        #[arg(long)]
        point: String,
    },
    /// Evaluate the generalized Kelvin transform of the field at a point.
    Kelvin {
        /// Transform center; defaults to the group identity.
        #[arg(long)]
        xi: Option<String>,
        /// Transform radius λ > 0.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Phase parameter β of the inversion.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Evaluation point, x1,…,xn,y1,…,yn,t.
        #[arg(long)]
        point: String,
    },
    /// Sweep sphere radii over a grid of base points and report the
    /// critical radius, violation curve, and Terracini quantities.
    Movesphere {
        /// Phase parameter β > 0 of the sweep's inversions.
        #[arg(long, default_value_t = 4.0)]
        beta: f64,
        /// Base point, repeatable; defaults to the identity and (z = 0, t = 0.6).
        #[arg(long)]
        xi: Vec<String>,
        /// Ball samples per violation measurement; Terracini and equality
        /// sampling run at a fifth of this (at least 1000).
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        /// Lower end of the bisection window.
        #[arg(long, default_value_t = 0.5)]
        lambda_min: f64,
        /// Upper end of the bisection window.
        #[arg(long, default_value_t = 4.0)]
        lambda_max: f64,
    },
    /// Print the check registry as a name/anchor table.
    ListChecks,
}

/// Parse the process arguments, run the selected command, and return
/// the exit code for `main` to pass to [`std::process::exit`].
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap already formats usage errors (and --help/--version, which
        // arrive here as "errors" with exit code 0).
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Verify => cmd_verify(cli),
        Command::Eval { point } => cmd_eval(cli, point),
        Command::Kelvin {
            xi,
            lambda,
            beta,
            point,
        } => cmd_kelvin(cli, xi.as_deref(), *lambda, *beta, point),
        Command::Movesphere {
            beta,
            xi,
            samples,
            lambda_min,
            lambda_max,
        } => cmd_movesphere(cli, *beta, xi, *samples, *lambda_min, *lambda_max),
        Command::ListChecks => cmd_list_checks(cli),
    }
}

/// Configuration and parse problems are the caller's to fix; everything
/// else is a runtime failure.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Parse { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// The default suite with the CLI's seed and tolerance override applied.
fn verify_suite(seed: u64, tol: Option<f64>) -> Vec<CheckSpec> {
    let mut suite = verify::default_suite(seed);
    if let Some(tol) = tol {
        for spec in &mut suite {
            spec.tolerance = tol;
        }
    }
    suite
}

fn cmd_verify(cli: &Cli) -> Result<i32> {
    if cli.format == Format::Csv {
        return Err(Error::Config {
            reason: "verification reports are JSON-only; --format csv applies to movesphere".into(),
        });
    }
    let seed = cli.seed.unwrap_or(0);
    let results = verify::run_suite(&verify_suite(seed, cli.tol))?;
    let mut report = results_to_json(&results)?;
    report.push('\n');
    emit(cli.out.as_deref(), &report)?;
    // The report on stdout stays byte-identical across runs; the human
    // summary goes to stderr.
    let passed = results.iter().filter(|r| r.pass).count();
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} (max_err {:e})", r.name, r.max_err);
    }
    eprintln!("{passed}/{} checks passed (seed {seed})", results.len());
    Ok(if passed == results.len() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_eval(cli: &Cli, point: &str) -> Result<i32> {
    let field = required_field(cli)?;
    let a = parse_point(point, field.n())?;
    let value = field.eval(&a)?;
    emit(cli.out.as_deref(), &format!("{value}\n"))?;
    Ok(EXIT_OK)
}

fn cmd_kelvin(cli: &Cli, xi: Option<&str>, lambda: f64, beta: f64, point: &str) -> Result<i32> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Config {
            reason: format!("--lambda must be a positive real, got {lambda}"),
        });
    }
    if !beta.is_finite() {
        return Err(Error::Config {
            reason: format!("--beta must be finite, got {beta}"),
        });
    }
    let field = required_field(cli)?;
    let n = field.n();
    let center = match xi {
        Some(s) => parse_point(s, n)?,
        None => HPoint::identity(n),
    };
    let eta = parse_point(point, n)?;
    let value = fields::kelvin(&field, &center, lambda, beta, &eta)?;
    emit(cli.out.as_deref(), &format!("{value}\n"))?;
    Ok(EXIT_OK)
}

fn cmd_movesphere(
    cli: &Cli,
    beta: f64,
    xi: &[String],
    samples: usize,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<i32> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Config {
            reason: format!("--beta must be a positive real, got {beta}"),
        });
    }
    let field = required_field(cli)?;
    let n = field.n();
    let grid = if xi.is_empty() {
        vec![
            HPoint::identity(n),
            HPoint::new(vec![Complex64::new(0.0, 0.0); n], 0.6),
        ]
    } else {
        xi.iter()
            .map(|s| parse_point(s, n))
            .collect::<Result<Vec<_>>>()?
    };
    let side_samples = (samples / 5).max(1_000);
    let cfg = SweepConfig {
        lambda_min,
        lambda_max,
        samples,
        terracini_samples: side_samples,
        equality_samples: side_samples,
        seed: cli.seed.unwrap_or(0),
        ..SweepConfig::default()
    };
    // Re-class sweep-parameter rejections as configuration errors: they
    // come straight from the flags, not from the computation.
    cfg.validate().map_err(|e| Error::Config {
        reason: e.to_string(),
    })?;
    let reports = moving_spheres_demo(&field, beta, &grid, &cfg)?;
    let text = match cli.format {
        Format::Json => {
            let mut s = reports_to_json(&reports)?;
            s.push('\n');
            s
        }
        Format::Csv => reports_to_csv(&reports),
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_list_checks(cli: &Cli) -> Result<i32> {
    let checks = verify::registered_checks();
    let width = checks
        .iter()
        .map(|(name, _)| name.len())
        .max()
        .unwrap_or(0)
        .max("name".len());
    let mut table = format!("{:<width$}  anchor\n", "name");
    for (name, anchor) in checks {
        table.push_str(&format!("{name:<width$}  {anchor}\n"));
    }
    emit(cli.out.as_deref(), &table)?;
    Ok(EXIT_OK)
}

/// Load the field spec a command requires, enforcing `--n` if given.
fn required_field(cli: &Cli) -> Result<ScalarField> {
    let spec = cli.field.as_deref().ok_or_else(|| Error::Config {
        reason: "this command needs --field (inline JSON or a file path)".into(),
    })?;
    let field = load_field(spec)?;
    if let Some(n) = cli.n {
        if n != field.n() {
            return Err(Error::Config {
                reason: format!("--n {n} contradicts the field spec's n = {}", field.n()),
            });
        }
    }
    Ok(field)
}

/// Inline JSON is recognized by its leading brace; anything else is a
/// file path.
fn load_field(spec: &str) -> Result<ScalarField> {
    if spec.trim_start().starts_with('{') {
        field_from_json(spec)
    } else {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::Config {
            reason: format!("cannot read field spec file '{spec}': {e}"),
        })?;
        field_from_json(&text)
    }
}

/// Read `x1,…,xn,y1,…,yn,t` into a point: 2n+1 comma-separated reals,
/// x and y interleaving into z_k = x_k + i·y_k.
pub fn parse_point(s: &str, n: usize) -> Result<HPoint> {
    let tokens: Vec<&str> = s.split(',').collect();
    let want = 2 * n + 1;
    if tokens.len() != want {
        return Err(Error::Parse {
            what: format!("point '{s}'"),
            reason: format!(
                "expected {want} comma-separated reals for n = {n} \
                 (x coordinates, then y coordinates, then t), got {}",
                tokens.len()
            ),
        });
    }
    let mut vals = Vec::with_capacity(want);
    for (i, tok) in tokens.iter().enumerate() {
        let tok = tok.trim();
        let v: f64 = tok.parse().map_err(|_| Error::Parse {
            what: format!("point '{s}'"),
            reason: format!("coordinate {} ('{tok}') is not a number", i + 1),
        })?;
        vals.push(v);
    }
    let z = (0..n)
        .map(|k| Complex64::new(vals[k], vals[n + k]))
        .collect();
    Ok(HPoint::new(z, vals[2 * n]))
}

/// Inverse of [`parse_point`]: shortest decimal strings that parse back
/// to the same bits, so the round trip is exact.
pub fn format_point(a: &HPoint) -> String {
    let mut parts: Vec<String> = a.z().iter().map(|c| c.re.to_string()).collect();
    parts.extend(a.z().iter().map(|c| c.im.to_string()));
    parts.push(a.t().to_string());
    parts.join(",")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => write_atomic(path, text),
    }
}

/// Write via a temp file in the target directory and rename into place,
/// so readers only ever see a complete report.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
