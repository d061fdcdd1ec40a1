//! The `cassini` command-line front end.
//!
//! Points are comma-separated coordinate lists (`--x 0.5,0`); the dimension
//! is taken from the points. Domains are given as
//!
//! | form                      | domain                                   |
//! |---------------------------|------------------------------------------|
//! | `unit-ball`               | unit ball of the points' dimension       |
//! | `ball:C:R`                | ball with center `C` and radius `R`      |
//! | `halfplane`               | upper half-plane `{x₂ > 0}` (2-D only)   |
//! | `halfspace:N:T`           | `{⟨x, N⟩ > T}` for a unit normal `N`      |
//! | `punctured:P1;P2;…`       | ℝⁿ minus the listed points               |
//! | `{"kind": …}`             | JSON descriptor                          |
//! | `@file.json`              | JSON descriptor read from a file         |
//!
//! JSON descriptors have the shapes `{"kind":"ball","center":[..],"radius":r}`,
//! `{"kind":"halfspace","normal":[..],"offset":t}` and
//! `{"kind":"punctured","punctures":[[..],..]}`.
//!
//! Exit codes: 0 success (and no violations for `verify`), 1 internal error
//! or verification failure, 2 usage or parse error, 3 point or parameter
//! outside the domain, 4 unsupported combination.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::geometry::{Domain, Point};
use crate::harness::{self, CheckId, SuiteSpec};
use crate::inner::{self, Backend, GeodesicOptions};
use crate::metrics::{self, MetricValue};
use crate::moebius::{self, MoebiusMap, OrthogonalMap};
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cassini", version, about = "Cassinian and related hyperbolic-type metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a metric at a pair of points.
    Compute(ComputeArgs),
    /// Approximate the inner Cassinian metric and its geodesic.
    Geodesic(GeodesicArgs),
    /// Distortion bounds of a ball automorphism with φ(0) = a.
    Distort(DistortArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Plot a planar domain with points and a path.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    Cassinian,
    J,
    #[value(name = "rho_ball", alias = "rho-ball")]
    RhoBall,
    #[value(name = "rho_halfplane", alias = "rho-halfplane")]
    RhoHalfplane,
    #[value(name = "visual_angle", alias = "visual-angle")]
    VisualAngle,
    P,
}

impl MetricName {
    fn as_str(self) -> &'static str {
        match self {
            MetricName::Cassinian => "cassinian",
            MetricName::J => "j",
            MetricName::RhoBall => "rho_ball",
            MetricName::RhoHalfplane => "rho_halfplane",
            MetricName::VisualAngle => "visual_angle",
            MetricName::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendName {
    Descent,
    Grid,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub metric: MetricName,
    #[arg(long, default_value = "unit-ball")]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub x: Coords,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub y: Coords,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, default_value = "unit-ball")]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub x: Coords,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub y: Coords,
    #[arg(long, value_enum, default_value_t = BackendName::Descent)]
    pub backend: BackendName,
    /// Write the path (vertices and length) as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an SVG plot of the domain and the path (2-D only).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub a: Coords,
    /// Position `t·e₁` of the sharpness witness, in (−1, 0).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Random pairs for the identity residuals.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Every suite of the default manifest.
    #[arg(long, conflicts_with_all = ["check", "manifest"])]
    pub all: bool,
    /// Suites of the default manifest for one check.
    #[arg(long, conflicts_with = "manifest")]
    pub check: Option<String>,
    /// JSON file with a list of suite specs.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Directory for the per-suite reports and the summary.
    #[arg(long, default_value = "cassini-reports")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, default_value = "unit-ball")]
    pub domain: String,
    /// Points to mark, separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Path JSON as written by `geodesic --out`.
    #[arg(long)]
    pub path: Option<PathBuf>,
    #[arg(long)]
    pub svg: PathBuf,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &FsPath, e: std::io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. }
            | Error::InvalidPoint(_)
            | Error::InvalidDomain(_)
            | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::OutsideDomain { .. }
            | Error::TooCloseToBoundary { .. }
            | Error::MapsToInfinity { .. }
            | Error::Precondition(_) => EXIT_DOMAIN,
            Error::Unsupported(_) => EXIT_UNSUPPORTED,
            Error::NoInitialPath { .. } => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed command; `Ok` carries the exit code.
pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Compute(a) => cmd_compute(a, out),
        Command::Geodesic(a) => cmd_geodesic(a, out),
        Command::Distort(a) => cmd_distort(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Plot(a) => cmd_plot(a, out),
    }
}

/// Coordinates of a point given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

/// Comma-separated coordinates.
pub fn parse_coords(s: &str) -> std::result::Result<Coords, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number in `{s}`"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Coords)
}

fn parse_point_list(s: &str) -> CliResult<Vec<Point>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let c = parse_coords(t).map_err(CliError::usage)?;
            Ok(Point::new(c.0)?)
        })
        .collect()
}

/// Parses a domain descriptor (see the module docs) of dimension `dim`.
pub fn parse_domain(s: &str, dim: usize) -> CliResult<Domain> {
    let s = s.trim();
    let d = if let Some(file) = s.strip_prefix('@') {
        let text = fs::read_to_string(file).map_err(|e| CliError::usage(format!("{file}: {e}")))?;
        domain_from_json(&text)?
    } else if s.starts_with('{') {
        domain_from_json(s)?
    } else {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "unit-ball" | "unit_ball" => Domain::unit_ball(dim),
            "halfplane" | "upper-half-plane" => Domain::upper_half_plane(),
            "ball" => {
                let (c, r) = rest
                    .split_once(':')
                    .ok_or_else(|| CliError::usage("ball needs `ball:CENTER:RADIUS`"))?;
                let r: f64 = r
                    .trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad radius `{r}`")))?;
                Domain::ball(Point::new(parse_coords(c).map_err(CliError::usage)?.0)?, r)?
            }
            "halfspace" => {
                let (nu, t) = rest
                    .split_once(':')
                    .ok_or_else(|| CliError::usage("halfspace needs `halfspace:NORMAL:OFFSET`"))?;
                let t: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad offset `{t}`")))?;
                Domain::half_space(Point::new(parse_coords(nu).map_err(CliError::usage)?.0)?, t)?
            }
            "punctured" => Domain::punctured(parse_point_list(rest)?)?,
            _ => return Err(CliError::usage(format!("unknown domain `{s}`"))),
        }
    };
    if d.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            actual: dim,
        }
        .into());
    }
    Ok(d)
}

fn domain_from_json(text: &str) -> CliResult<Domain> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("domain JSON: {e}")))
}

fn pair(x: &Coords, y: &Coords) -> CliResult<(Point, Point)> {
    let (x, y) = (&x.0, &y.0);
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        }
        .into());
    }
    Ok((Point::new(x.to_vec())?, Point::new(y.to_vec())?))
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: format!("writing output: {e}"),
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

fn write_file(path: &FsPath, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Fields of a table printed as `key: value` lines, JSON or two CSV rows.
fn emit(out: &mut dyn Write, format: Format, fields: &[(&str, serde_json::Value)]) -> CliResult<()> {
    let cell = |v: &serde_json::Value| match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        serde_json::Value::Array(a) => a
            .iter()
            .map(|e| match e {
                serde_json::Value::Array(inner) => inner
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    };
    let text = match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            to_json(&map)
        }
        Format::Csv => {
            let quote = |s: String| {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s
                }
            };
            let head: Vec<String> = fields.iter().map(|(k, _)| k.to_string()).collect();
            let row: Vec<String> = fields.iter().map(|(_, v)| quote(cell(v))).collect();
            format!("{}\n{}\n", head.join(","), row.join(","))
        }
        Format::Text => fields
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| format!("{k}: {}\n", cell(v)))
            .collect(),
    };
    write_out(out, &text)
}

fn evaluate(metric: MetricName, d: &Domain, x: &Point, y: &Point) -> CliResult<MetricValue> {
    let halfplane = || -> CliResult<()> {
        match d {
            Domain::HalfSpace {
                unit_normal,
                offset,
            } if *offset == 0.0 && unit_normal.coords() == [0.0, 1.0] => Ok(()),
            _ => Err(Error::Unsupported(
                "rho_halfplane needs the upper half-plane (--domain halfplane)".into(),
            )
            .into()),
        }
    };
    let ball = || -> CliResult<()> {
        match d {
            Domain::Ball { center, radius } if center.norm() == 0.0 && *radius == 1.0 => Ok(()),
            _ => Err(Error::Unsupported("rho_ball needs the unit ball (--domain unit-ball)".into()).into()),
        }
    };
    Ok(match metric {
        MetricName::Cassinian => metrics::cassinian(d, x, y)?,
        MetricName::J => metrics::distance_ratio_j(d, x, y)?,
        MetricName::RhoBall => {
            ball()?;
            metrics::hyperbolic_ball(x, y)?
        }
        MetricName::RhoHalfplane => {
            halfplane()?;
            metrics::hyperbolic_halfplane(x, y)?
        }
        MetricName::VisualAngle => metrics::visual_angle(d, x, y)?,
        MetricName::P => metrics::p_quantity(d, x, y)?,
    })
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (x, y) = pair(&args.x, &args.y)?;
    let d = parse_domain(&args.domain, x.dim())?;
    let v = evaluate(args.metric, &d, &x, &y)?;
    let method = serde_json::to_value(v.method).expect("serializable method");
    emit(
        out,
        args.format,
        &[
            ("metric", json!(args.metric.as_str())),
            ("value", json!(v.value)),
            ("method", method),
            ("gap_estimate", json!(v.gap())),
            ("witness", json!(v.witness.as_ref().map(|w| w.point.coords().to_vec()))),
        ],
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_geodesic(args: &GeodesicArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (x, y) = pair(&args.x, &args.y)?;
    let d = parse_domain(&args.domain, x.dim())?;
    if args.svg.is_some() && d.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "SVG output needs a planar domain, got dimension {}",
            d.dim()
        ))
        .into());
    }
    let opts = match args.backend {
        BackendName::Descent => GeodesicOptions::default(),
        BackendName::Grid => GeodesicOptions::grid(),
    };
    let r = inner::inner_cassinian(&d, &x, &y, &opts)?;
    // A coincident pair has the empty path.
    let vertices: Vec<Vec<f64>> = if r.backend == Backend::ClosedForm && r.value == 0.0 {
        Vec::new()
    } else {
        r.path.vertices.iter().map(|p| p.coords().to_vec()).collect()
    };
    let backend = serde_json::to_value(r.backend).expect("serializable backend");
    if let Some(path) = &args.out {
        let doc = json!({
            "domain": d,
            "value": r.value,
            "backend": backend,
            "refinement_gap": r.refinement_gap,
            "vertices": vertices,
        });
        write_file(path, &to_json(&doc))?;
    }
    if let Some(path) = &args.svg {
        let poly: Vec<Point> = r.path.vertices.clone();
        write_file(path, &svg::render(&d, &[x.clone(), y.clone()], Some(&poly))?)?;
    }
    let mut fields = vec![
        ("value", json!(r.value)),
        ("backend", backend),
        ("refinement_gap", json!(r.refinement_gap)),
        ("iterations", json!(r.iterations)),
        ("vertices", json!(vertices.len())),
    ];
    if args.format == Format::Json {
        fields.push(("path", json!(vertices)));
    }
    emit(out, args.format, &fields)?;
    Ok(EXIT_OK)
}

pub fn cmd_distort(args: &DistortArgs, out: &mut dyn Write) -> CliResult<i32> {
    let a = Point::new(args.a.0.clone())?;
    let n = a.dim();
    if !(a.norm() < 1.0) {
        return Err(CliError {
            code: EXIT_DOMAIN,
            message: format!("|a| = {} must be < 1", a.norm()),
        });
    }
    let (lower, upper) = moebius::distortion_bounds(&a)?;
    let witness = match args.t {
        Some(t) if a.norm() > 0.0 => {
            // The witness lives on the axis of a; rotate a onto e₁.
            let w = moebius::sharpness_witness(&Point::e1(n, a.norm()), t)?;
            Some(w)
        }
        Some(_) => {
            return Err(Error::Unsupported("the sharpness witness needs a ≠ 0".into()).into());
        }
        None => None,
    };
    // Identity residuals on seeded random pairs of the ball.
    let ball = Domain::unit_ball(n);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let phi = MoebiusMap::automorphism(OrthogonalMap::identity(n), &a, OrthogonalMap::identity(n))?;
    let sigma = if a.norm() > 0.0 {
        Some(moebius::inversion_sending_to_zero(&a)?)
    } else {
        None
    };
    let (mut mob1, mut mob2) = (0.0f64, 0.0f64);
    for _ in 0..args.samples {
        let x = harness::sample_point(&ball, None, &mut rng);
        let y = harness::sample_point(&ball, None, &mut rng);
        mob1 = mob1.max(moebius::composite_isometry_residual(&phi, &x, &y)?);
        if let Some(s) = &sigma {
            mob2 = mob2.max(moebius::check_inversion_identity(s, &x, &y)?);
        }
    }
    emit(
        out,
        args.format,
        &[
            ("a_norm", json!(a.norm())),
            ("lower_bound", json!(lower)),
            ("upper_bound", json!(upper)),
            ("t", json!(args.t)),
            ("witness_ratio", json!(witness.as_ref().map(|w| w.ratio))),
            ("witness_c_pair", json!(witness.as_ref().map(|w| w.c_pair))),
            ("witness_c_images", json!(witness.as_ref().map(|w| w.c_images))),
            ("mob1_residual", json!(mob1)),
            ("mob2_residual", json!(sigma.as_ref().map(|_| mob2))),
            ("samples", json!(args.samples)),
        ],
    )?;
    Ok(EXIT_OK)
}

/// One line of the verification summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
struct SummaryLine {
    file: String,
    check_id: CheckId,
    domain: &'static str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_bound: Option<f64>,
    samples: usize,
    violations: usize,
    warnings: usize,
    worst_slack_ratio: f64,
    sharpest_ratio: f64,
    passed: bool,
}

fn manifest_specs(args: &VerifyArgs) -> CliResult<Vec<SuiteSpec>> {
    if let Some(path) = &args.manifest {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("manifest {}: {e}", path.display())));
    }
    let all = harness::default_manifest(args.samples, args.seed);
    if args.all {
        return Ok(all);
    }
    let Some(check) = &args.check else {
        return Err(CliError::usage("verify needs --all, --check ID or --manifest FILE"));
    };
    let id: CheckId = check.parse()?;
    Ok(all.into_iter().filter(|s| s.check_id == id).collect())
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let specs = manifest_specs(args)?;
    for s in &specs {
        s.validate()?;
    }
    let report = harness::run_all(&specs)?;
    let mut lines = Vec::with_capacity(report.suites.len());
    for (i, suite) in report.suites.iter().enumerate() {
        let file = format!(
            "{:02}_{}_{}_n{}.json",
            i + 1,
            suite.check_id,
            suite.domain.kind(),
            suite.n
        );
        write_file(&args.out_dir.join(&file), &to_json(suite))?;
        let status = if suite.passed() { "PASS" } else { "FAIL" };
        let lambda = suite
            .lambda_bound
            .map(|l| format!(" lambda={l}"))
            .unwrap_or_default();
        write_out(
            out,
            &format!(
                "{status} {} {} n={}{lambda} samples={} violations={} worst_slack_ratio={} ({} ms)\n",
                suite.check_id,
                suite.domain.kind(),
                suite.n,
                suite.samples,
                suite.violations.len(),
                suite.worst_slack_ratio,
                suite.runtime_ms
            ),
        )?;
        lines.push(SummaryLine {
            file,
            check_id: suite.check_id,
            domain: suite.domain.kind(),
            n: suite.n,
            lambda_bound: suite.lambda_bound,
            samples: suite.samples,
            violations: suite.violations.len(),
            warnings: suite.warnings.len(),
            worst_slack_ratio: suite.worst_slack_ratio,
            sharpest_ratio: suite.sharpest_ratio,
            passed: suite.passed(),
        });
    }
    let summary = json!({
        "suites": lines,
        "total_violations": report.total_violations,
        "passed": report.passed,
    });
    write_file(&args.out_dir.join("summary.json"), &to_json(&summary))?;
    write_out(
        out,
        &format!(
            "{} suites, {} violations, reports in {}\n",
            report.suites.len(),
            report.total_violations,
            args.out_dir.display()
        ),
    )?;
    Ok(report.exit_code())
}

pub fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> CliResult<i32> {
    let points = match &args.points {
        Some(s) => parse_point_list(s)?,
        None => Vec::new(),
    };
    let path: Option<Vec<Point>> = match &args.path {
        Some(file) => {
            let text = fs::read_to_string(file).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
            let doc: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("path {}: {e}", file.display())))?;
            let verts: Vec<Vec<f64>> = serde_json::from_value(doc.get("vertices").cloned().unwrap_or(doc))
                .map_err(|e| CliError::usage(format!("path {}: {e}", file.display())))?;
            Some(verts.into_iter().map(Point::new).collect::<crate::Result<_>>()?)
        }
        None => None,
    };
    let dim = points
        .first()
        .or(path.as_ref().and_then(|p| p.first()))
        .map_or(2, Point::dim);
    let d = parse_domain(&args.domain, dim)?;
    write_file(&args.svg, &svg::render(&d, &points, path.as_deref())?)?;
    write_out(out, &format!("wrote {}\n", args.svg.display()))?;
    Ok(EXIT_OK)
}
