//! Command-line front end for the `uehling` library.
//!
//! Four subcommands cover the library's surface:
//!
//! * `tabulate` — evaluate the vacuum-polarization potential on a radial
//!   grid, one column per evaluation route, plus the analytic derivative
//!   and all pairwise relative deviations between the selected routes;
//! * `verify`   — run the cross-verification suite and emit the report,
//!   exiting nonzero iff an asserted (non-diagnostic) check fails;
//! * `ode`      — integrate the second-order equation for the bracket
//!   `F = r U` as an initial-value problem and compare the trajectory
//!   against the closed-form bracket;
//! * `specfun`  — tabulate the underlying kernel functions `K0`, `K1`,
//!   and `Ki_1..Ki_4`.
//!
//! Output is CSV (15 significant digits) or JSON and is byte-for-byte
//! deterministic for a fixed set of flags.
//!
//! Exit codes: 0 success, 1 verification check failure, 2 usage error,
//! 3 I/O error, 4 numerical non-convergence.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use uehling::grid::{lin_grid, log_grid, GridError};
use uehling::odecheck::{consistency_report, constant_coeff_bracket, solve_ivp, OdeError};
use uehling::potential::{
    evaluate_route, uehling_derivative_integral, uehling_integral, PotentialError, Route,
};
use uehling::quadrature::AccuracyConfig;
use uehling::report::relative_deviation;
use uehling::specfun::{bickley_ki, k0, k1, SpecFunError};
use uehling::{PhysicalParams, UnitSystem, FINE_STRUCTURE_ALPHA};

// ---------------------------------------------------------------------------
// Flag surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "uehling",
    version,
    about = "Vacuum-polarization potential toolkit: tabulation, cross-verification, IVP integration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the potential over a radial grid, one column per route
    Tabulate(TabulateArgs),
    /// Run the cross-verification suite and emit the report
    Verify(VerifyArgs),
    /// Integrate w'' = g(r) for the bracket F = r U and compare with the closed form
    Ode(OdeArgs),
    /// Tabulate the kernel functions k0, k1, ki1..ki4
    Specfun(SpecfunArgs),
}

#[derive(Args)]
struct PhysicsArgs {
    /// Unit system (lengths in electron reduced Compton wavelengths, or Bohr radii)
    #[arg(long, value_enum, default_value_t = UnitsArg::Relativistic)]
    units: UnitsArg,

    /// Source charge Q in units of the elementary charge
    #[arg(long, default_value_t = 1.0)]
    q: f64,

    /// Fine-structure constant
    #[arg(long, default_value_t = FINE_STRUCTURE_ALPHA)]
    alpha: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    #[value(alias = "rel")]
    Relativistic,
    #[value(alias = "au")]
    Atomic,
}

impl From<UnitsArg> for UnitSystem {
    fn from(units: UnitsArg) -> Self {
        match units {
            UnitsArg::Relativistic => UnitSystem::Relativistic,
            UnitsArg::Atomic => UnitSystem::Atomic,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Log-spaced grid MIN:MAX:N (N points, endpoints included)
    #[arg(long, value_name = "MIN:MAX:N", conflicts_with = "grid_lin")]
    grid_log: Option<String>,

    /// Linearly spaced grid MIN:MAX:N (N points, endpoints included)
    #[arg(long, value_name = "MIN:MAX:N")]
    grid_lin: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Write output to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct TabulateArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,

    /// Comma-separated routes: integral, closed_ki024, closed_reduced, constant_coeff
    #[arg(
        long,
        value_name = "LIST",
        default_value = "integral,closed_ki024,closed_reduced,constant_coeff"
    )]
    routes: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,

    /// Override the pass/fail tolerance of every asserted check
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
}

#[derive(Args)]
struct OdeArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    output: OutputArgs,

    /// Initial radius
    #[arg(long, default_value_t = 0.5)]
    r0: f64,

    /// Final radius
    #[arg(long, default_value_t = 5.0)]
    r_end: f64,

    /// Number of uniform integration steps
    #[arg(long, default_value_t = 2048)]
    steps: usize,

    /// Initial-condition source: the closed-form bracket, or quadrature plus
    /// a finite-difference slope (diagnostic mode)
    #[arg(long, value_enum, default_value_t = IcSource::ClosedForm)]
    ic_source: IcSource,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum IcSource {
    #[value(alias = "paper-f")]
    ClosedForm,
    Quadrature,
}

#[derive(Args)]
struct SpecfunArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum AppError {
    /// Invalid flags or flag combinations (exit 2).
    Usage(String),
    /// Output could not be written (exit 3).
    Io(String),
    /// A quadrature or solver failed to reach its tolerance (exit 4).
    NonConvergence(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Io(_) => 3,
            AppError::NonConvergence(_) => 4,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Usage(msg) | AppError::Io(msg) | AppError::NonConvergence(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<SpecFunError> for AppError {
    fn from(err: SpecFunError) -> Self {
        match err {
            SpecFunError::NoConvergence { .. } => AppError::NonConvergence(err.to_string()),
            SpecFunError::Quadrature(inner) => AppError::NonConvergence(inner.to_string()),
            _ => AppError::Usage(err.to_string()),
        }
    }
}

impl From<PotentialError> for AppError {
    fn from(err: PotentialError) -> Self {
        match err {
            PotentialError::QuadratureDidNotConverge { .. } => {
                AppError::NonConvergence(err.to_string())
            }
            PotentialError::SpecFun(inner) => inner.into(),
            _ => AppError::Usage(err.to_string()),
        }
    }
}

impl From<OdeError> for AppError {
    fn from(err: OdeError) -> Self {
        match err {
            OdeError::Potential(inner) => inner.into(),
            OdeError::SpecFun(inner) => inner.into(),
            _ => AppError::Usage(err.to_string()),
        }
    }
}

impl From<GridError> for AppError {
    fn from(err: GridError) -> Self {
        AppError::Usage(err.to_string())
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, AppError> {
    match cli.command {
        Command::Tabulate(args) => {
            let table = tabulate_table(&args)?;
            emit(&args.output, &render_table(&table, args.output.format))?;
            Ok(0)
        }
        Command::Verify(args) => {
            let (payload, all_passed) = verify_payload(&args)?;
            emit(&args.output, &payload)?;
            Ok(if all_passed { 0 } else { 1 })
        }
        Command::Ode(args) => {
            let table = ode_table(&args)?;
            emit(&args.output, &render_table(&table, args.output.format))?;
            Ok(0)
        }
        Command::Specfun(args) => {
            let table = specfun_table(&args)?;
            emit(&args.output, &render_table(&table, args.output.format))?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Columnar payload; rendered as CSV rows or as a JSON
/// `{"columns": [...], "rows": [[...]]}` object so that column order is
/// identical in both formats.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// 15 significant digits: enough to expose route-parity differences, stable
/// across runs.
fn fmt_num(value: f64) -> String {
    format!("{value:.14e}")
}

fn render_table(table: &Table, format: FormatArg) -> String {
    match format {
        FormatArg::Csv => {
            let mut text = table.columns.join(",");
            text.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().copied().map(fmt_num).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            text
        }
        FormatArg::Json => {
            let value = serde_json::json!({
                "columns": table.columns,
                "rows": table.rows,
            });
            let mut text =
                serde_json::to_string_pretty(&value).expect("tables always serialize");
            text.push('\n');
            text
        }
    }
}

fn emit(output: &OutputArgs, payload: &str) -> Result<(), AppError> {
    match &output.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|err| AppError::Io(format!("cannot write {}: {err}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(payload.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|err| AppError::Io(format!("cannot write to stdout: {err}")))
        }
    }
}

fn physical_params(args: &PhysicsArgs) -> Result<PhysicalParams, AppError> {
    PhysicalParams::new(args.q, args.alpha, args.units.into())
        .map_err(|err| AppError::Usage(err.to_string()))
}

enum GridScale {
    Log,
    Lin,
}

struct GridDefault {
    min: f64,
    max: f64,
    count: usize,
}

fn build_grid(args: &GridArgs, default: GridDefault) -> Result<Vec<f64>, AppError> {
    let (spec, scale) = match (&args.grid_log, &args.grid_lin) {
        (Some(spec), None) => (parse_grid_spec(spec)?, GridScale::Log),
        (None, Some(spec)) => (parse_grid_spec(spec)?, GridScale::Lin),
        (None, None) => (
            (default.min, default.max, default.count),
            GridScale::Log,
        ),
        // clap's conflicts_with rejects the (Some, Some) combination.
        (Some(_), Some(_)) => unreachable!("--grid-log conflicts with --grid-lin"),
    };
    let (min, max, count) = spec;
    let grid = match scale {
        GridScale::Log => log_grid(min, max, count)?,
        GridScale::Lin => lin_grid(min, max, count)?,
    };
    Ok(grid)
}

fn parse_grid_spec(spec: &str) -> Result<(f64, f64, usize), AppError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(AppError::Usage(format!(
            "grid spec must be MIN:MAX:N, got '{spec}'"
        )));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad grid minimum '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad grid maximum '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| AppError::Usage(format!("bad grid point count '{}'", parts[2])))?;
    Ok((min, max, count))
}

fn parse_routes(list: &str) -> Result<Vec<Route>, AppError> {
    let mut routes = Vec::new();
    for token in list.split(',') {
        let route = Route::from_str(token.trim())
            .map_err(|err| AppError::Usage(err.to_string()))?;
        if route == Route::OdeIvp {
            return Err(AppError::Usage(format!(
                "route '{route}' is not pointwise; use the `ode` subcommand instead"
            )));
        }
        if !routes.contains(&route) {
            routes.push(route);
        }
    }
    if routes.is_empty() {
        return Err(AppError::Usage("at least one route is required".to_owned()));
    }
    Ok(routes)
}

// ---------------------------------------------------------------------------
// tabulate
// ---------------------------------------------------------------------------

fn tabulate_table(args: &TabulateArgs) -> Result<Table, AppError> {
    let params = physical_params(&args.physics)?;
    let grid = build_grid(
        &args.grid,
        GridDefault {
            min: 1e-3,
            max: 20.0,
            count: 60,
        },
    )?;
    let routes = parse_routes(&args.routes)?;
    let cfg = AccuracyConfig::default();

    let mut columns = vec!["r".to_owned(), "exp_scale".to_owned()];
    columns.extend(routes.iter().map(|route| route.name().to_owned()));
    columns.push("deriv".to_owned());
    for (i, a) in routes.iter().enumerate() {
        for b in &routes[i + 1..] {
            columns.push(format!("dev_{}_{}", a.name(), b.name()));
        }
    }

    let mut rows = Vec::with_capacity(grid.len());
    for &r in &grid {
        let mut row = vec![r, params.b() * r];
        let mut values = Vec::with_capacity(routes.len());
        for &route in &routes {
            let sample = evaluate_route(route, r, &params, &cfg)?;
            values.push(sample.value);
            row.push(sample.value);
        }
        row.push(uehling_derivative_integral(r, &params, &cfg)?);
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                row.push(relative_deviation(a, b));
            }
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn verify_payload(args: &VerifyArgs) -> Result<(String, bool), AppError> {
    let params = physical_params(&args.physics)?;
    let grid = build_grid(
        &args.grid,
        GridDefault {
            min: 1e-3,
            max: 20.0,
            count: 60,
        },
    )?;
    let cfg = AccuracyConfig::default();

    let mut report = consistency_report(&grid, &params, &cfg)?;
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(AppError::Usage(format!(
                "--tol must be positive and finite, got {tol}"
            )));
        }
        report = report.with_tolerance_override(tol);
    }
    let all_passed = report.all_passed();

    let payload = match args.output.format {
        FormatArg::Json => {
            let mut text =
                serde_json::to_string_pretty(&report).expect("reports always serialize");
            text.push('\n');
            text
        }
        FormatArg::Csv => {
            let mut text =
                String::from("check_name,grid,max_abs,max_rel,tolerance,passed,diagnostic\n");
            for check in &report.checks {
                let tolerance = check.tolerance.map(fmt_num).unwrap_or_default();
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    check.check_name,
                    check.grid,
                    fmt_num(check.max_abs),
                    fmt_num(check.max_rel),
                    tolerance,
                    check.passed,
                    check.diagnostic,
                ));
            }
            text
        }
    };
    Ok((payload, all_passed))
}

// ---------------------------------------------------------------------------
// ode
// ---------------------------------------------------------------------------

fn ode_table(args: &OdeArgs) -> Result<Table, AppError> {
    let params = physical_params(&args.physics)?;
    let cfg = AccuracyConfig::default();

    let (w0, p0) = match args.ic_source {
        IcSource::ClosedForm => (
            constant_coeff_bracket(args.r0, &params)?,
            uehling::odecheck::constant_coeff_bracket_prime(args.r0, &params)?,
        ),
        IcSource::Quadrature => quadrature_initial_conditions(args.r0, &params, &cfg)?,
    };

    let trajectory = solve_ivp(args.r0, w0, p0, args.r_end, args.steps, &params)?;

    let columns = ["r", "w", "p", "reference", "deviation"]
        .map(str::to_owned)
        .to_vec();
    let mut rows = Vec::with_capacity(trajectory.points.len());
    for point in &trajectory.points {
        let reference = constant_coeff_bracket(point.r, &params)?;
        rows.push(vec![
            point.r,
            point.w,
            point.p,
            reference,
            (point.w - reference).abs(),
        ]);
    }
    Ok(Table { columns, rows })
}

/// Diagnostic initial conditions taken from the quadrature route:
/// `W0 = r0 U(r0)` and a five-point finite-difference slope.  These seed the
/// solver with the *true* potential's bracket, whose trajectory is expected
/// to drift away from the constant-coefficient closed form.
fn quadrature_initial_conditions(
    r0: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<(f64, f64), AppError> {
    let bracket = |r: f64| -> Result<f64, AppError> {
        Ok(r * uehling_integral(r, params, cfg)?.value)
    };
    let h = cfg.fd_step * r0;
    if r0 - 2.0 * h <= 0.0 {
        return Err(AppError::Usage(format!(
            "--r0 {r0} is too small for the finite-difference stencil"
        )));
    }
    let w0 = bracket(r0)?;
    let p0 = (bracket(r0 - 2.0 * h)? - 8.0 * bracket(r0 - h)? + 8.0 * bracket(r0 + h)?
        - bracket(r0 + 2.0 * h)?)
        / (12.0 * h);
    Ok((w0, p0))
}

// ---------------------------------------------------------------------------
// specfun
// ---------------------------------------------------------------------------

fn specfun_table(args: &SpecfunArgs) -> Result<Table, AppError> {
    let grid = build_grid(
        &args.grid,
        GridDefault {
            min: 1e-3,
            max: 50.0,
            count: 60,
        },
    )?;
    let cfg = AccuracyConfig::default();

    let columns = ["x", "k0", "k1", "ki1", "ki2", "ki3", "ki4"]
        .map(str::to_owned)
        .to_vec();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let mut row = vec![x, k0(x, &cfg)?.value, k1(x, &cfg)?.value];
        for n in 1..=4 {
            row.push(bickley_ki(n, x, &cfg)?.value);
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
