//! Command-line front end. Every command writes one report; exit codes are
//! 0 on success, 1 for validation and parse errors, 2 for numerical
//! failures and 3 for domain errors.

pub mod instance;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify3d::{self, NonUnimodularParams};
use crate::error::Error;
use crate::existence::{self, CurvePoint, ExistenceCase, POLE_MARGIN};
use crate::geodesic::{self, SearchConfig};
use crate::lie::ReductiveSpace;
use crate::metric::{InnerProduct, MetricFamily, MetricSpec};
use crate::phi;
use instance::{InstanceError, InstanceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classify3dMetric {
    Riemannian,
    Randers,
}

#[derive(Debug, Parser)]
#[command(name = "homgeo", version, about = "Geodesic vectors of invariant metrics on homogeneous spaces")]
pub struct Cli {
    /// Verdict tolerance for geodesic residuals.
    #[arg(long, global = true, default_value_t = geodesic::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed of the multi-start search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of start points of the multi-start search.
    #[arg(long, global = true, default_value_t = 20_000)]
    pub samples: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Jacobi identity, the reductive split, the inner product and
    /// the metric of an instance.
    Validate { file: PathBuf },
    /// Evaluate the geodesic criterion at a vector given in g-coordinates.
    Check {
        file: PathBuf,
        /// Comma-separated g-coordinates, e.g. `0,1,0`.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Search the unit sphere of m for geodesic vectors.
    Find { file: PathBuf },
    /// Build a certified geodesic vector for a Kropina instance.
    Exist {
        file: PathBuf,
        /// Also write the `M(t)` curve as CSV here (general eigen-split case).
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Count and verify the axes of a 3-dimensional non-unimodular algebra.
    Classify3d {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Classify3dMetric::Riemannian)]
        metric: Classify3dMetric,
        /// Randers drift in the Milnor frame, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Sample `M(t) = F(Y(t)) - 2` for a Kropina instance.
    Mcurve {
        file: PathBuf,
        /// Defaults to just inside the nearest pole below 0.
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        /// Defaults to just inside the nearest pole above 0.
        #[arg(long, allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
}

/// A failure with its exit code and, for instance files, the key path.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, kind: "InvalidInput".into(), message: message.into(), path: None }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self { code: exit_code(&e), kind: kind(&e).into(), message: e.to_string(), path: None }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        let mut c = CliError::from(e.error.clone());
        c.message = e.to_string();
        if !e.path.is_empty() {
            c.path = Some(e.path);
        }
        c
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NumericalFailure(_) | Error::ResidualTooLarge { .. } | Error::PredictionMismatch { .. } => EXIT_NUMERIC,
        Error::OutsideDomain(_) | Error::DomainExhausted { .. } => EXIT_DOMAIN,
        _ => EXIT_VALIDATION,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::InvalidInput(_) => "InvalidInput",
        Error::ZeroVector => "ZeroVector",
        Error::ZeroProjection => "ZeroProjection",
        Error::OutsideDomain(_) => "OutsideDomain",
        Error::NumericalFailure(_) => "NumericalFailure",
        Error::DegenerateOnH { .. } => "DegenerateOnH",
        Error::NotSubalgebra { .. } => "NotSubalgebra",
        Error::NotInvariantComplement { .. } => "NotInvariantComplement",
        Error::NotComplementary => "NotComplementary",
        Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
        Error::NotUnitVector { .. } => "NotUnitVector",
        Error::InvariantVectorViolation { .. } => "InvariantVectorViolation",
        Error::DomainExhausted { .. } => "DomainExhausted",
        Error::ResidualTooLarge { .. } => "ResidualTooLarge",
        Error::ConstraintViolation(_) => "ConstraintViolation",
        Error::RicciDegenerate { .. } => "RicciDegenerate",
        Error::NotSemisimple => "NotSemisimple",
        Error::PredictionMismatch { .. } => "PredictionMismatch",
        Error::Parse(_) => "Parse",
    }
}

#[derive(Debug, Serialize)]
struct Report {
    tool: &'static str,
    version: &'static str,
    command: String,
    args: BTreeMap<String, Value>,
    input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    results: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<CliError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<BTreeMap<String, f64>>,
}

/// What a command produced: a JSON payload, optional CSV, and an exit code
/// for outcomes that are data but still count as failures.
struct Outcome {
    results: Value,
    csv: Option<String>,
    code: i32,
    error: Option<CliError>,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Self { results, csv: None, code: EXIT_OK, error: None }
    }
}

/// A parsed and validated instance file.
struct Loaded {
    space: ReductiveSpace,
    metric: MetricSpec,
}

fn read_input(file: &Path) -> Result<(String, String), CliError> {
    let bytes = std::fs::read(file).map_err(|e| CliError::validation(format!("cannot read {}: {e}", file.display())))?;
    let digest = report::sha256_hex(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| CliError::validation("instance file is not UTF-8"))?;
    Ok((text, digest))
}

fn load(file: &Path, text: &str) -> Result<Loaded, CliError> {
    let inst = InstanceFile::parse(file, text)?;
    let algebra = inst.algebra()?;
    let jacobi = algebra.validate();
    if !jacobi.passed {
        return Err(CliError {
            path: Some("brackets".into()),
            ..CliError::validation(format!(
                "Jacobi identity fails (violation {:e}) at {}",
                jacobi.max_violation,
                triple_names(&algebra, jacobi.worst_triple)
            ))
        });
    }
    let space = inst.space(algebra)?;
    let ip = inst.inner_product(space.dim_m())?;
    let metric = inst.metric(&space, &ip)?;
    Ok(Loaded { space, metric })
}

fn triple_names(algebra: &crate::lie::LieAlgebra, t: Option<(usize, usize, usize)>) -> String {
    match t {
        Some((i, j, k)) => {
            let n = algebra.basis_names();
            format!("({}, {}, {})", n[i], n[j], n[k])
        }
        None => "none".into(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
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
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> i32 {
    let started = Instant::now();
    let (name, mut args, digest, outcome) = dispatch(cli);
    args.insert("tol".into(), json!(cli.tol));
    args.insert("seed".into(), json!(cli.seed));
    args.insert("samples".into(), json!(cli.samples));

    let (results, csv, code, error) = match outcome {
        Ok(o) => (Some(o.results), o.csv, o.code, o.error),
        Err(e) => (None, None, e.code, Some(e)),
    };
    if let Some(e) = &error {
        eprintln!("error: {}", e.message);
    }
    let timings = cli.timings.then(|| BTreeMap::from([("total_seconds".to_string(), started.elapsed().as_secs_f64())]));
    let text = match (cli.format, csv) {
        (Format::Csv, Some(csv)) => csv,
        (Format::Csv, None) if error.is_none() => {
            eprintln!("error: --format csv is only available for mcurve");
            return EXIT_VALIDATION;
        }
        _ => report::to_json(&Report {
            tool: "homgeo",
            version: env!("CARGO_PKG_VERSION"),
            command: name.into(),
            args,
            input_digest: digest,
            results,
            error,
            timings,
        }),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_VALIDATION;
    }
    code
}

type Dispatched = (&'static str, BTreeMap<String, Value>, String, Result<Outcome, CliError>);

fn dispatch(cli: &Cli) -> Dispatched {
    let mut args = BTreeMap::new();
    match &cli.command {
        Command::Validate { file } => with_file("validate", args, file, |text| cmd_validate(file, text)),
        Command::Check { file, y } => {
            args.insert("y".into(), json!(y));
            with_file("check", args, file, |text| cmd_check(file, text, y, cli.tol))
        }
        Command::Find { file } => {
            let config = SearchConfig { samples: cli.samples, seed: cli.seed, tol: cli.tol, ..SearchConfig::default() };
            args.insert("dedup_angle".into(), json!(config.dedup_angle));
            with_file("find", args, file, |text| cmd_find(file, text, &config))
        }
        Command::Exist { file, curve, points } => {
            args.insert("points".into(), json!(points));
            with_file("exist", args, file, |text| cmd_exist(file, text, curve.as_deref(), *points))
        }
        Command::Mcurve { file, t_min, t_max, points } => {
            args.insert("t_min".into(), json!(t_min));
            args.insert("t_max".into(), json!(t_max));
            args.insert("points".into(), json!(points));
            with_file("mcurve", args, file, |text| cmd_mcurve(file, text, *t_min, *t_max, *points))
        }
        Command::Classify3d { alpha, beta, gamma, delta, metric, x } => {
            args.insert("alpha".into(), json!(alpha));
            args.insert("beta".into(), json!(beta));
            args.insert("gamma".into(), json!(gamma));
            args.insert("delta".into(), json!(delta));
            args.insert("metric".into(), to_value(metric));
            args.insert("x".into(), json!(x));
            let digest = report::sha256_hex(report::to_compact_json(&args).as_bytes());
            let config = SearchConfig { samples: cli.samples, seed: cli.seed, tol: cli.tol, ..SearchConfig::default() };
            let outcome = cmd_classify3d([*alpha, *beta, *gamma, *delta], *metric, x.as_deref(), &config);
            ("classify3d", args, digest, outcome)
        }
    }
}

fn with_file(
    name: &'static str,
    mut args: BTreeMap<String, Value>,
    file: &Path,
    f: impl FnOnce(&str) -> Result<Outcome, CliError>,
) -> Dispatched {
    args.insert("file".into(), json!(file.display().to_string()));
    match read_input(file) {
        Ok((text, digest)) => (name, args, digest, f(&text)),
        Err(e) => (name, args, String::new(), Err(e)),
    }
}

fn cmd_validate(file: &Path, text: &str) -> Result<Outcome, CliError> {
    let inst = InstanceFile::parse(file, text)?;
    let algebra = inst.algebra()?;
    let mut results = serde_json::Map::new();
    let jacobi = algebra.validate();
    results.insert(
        "jacobi".into(),
        json!({
            "max_violation": jacobi.max_violation,
            "worst_triple": jacobi.worst_triple.map(|_| triple_names(&algebra, jacobi.worst_triple)),
            "passed": jacobi.passed,
        }),
    );
    let mut failure: Option<CliError> = None;
    if !jacobi.passed {
        failure = Some(CliError {
            path: Some("brackets".into()),
            ..CliError::validation(format!("Jacobi identity fails at {}", triple_names(&algebra, jacobi.worst_triple)))
        });
    }

    if failure.is_none() {
        match stage_checks(&inst, algebra, &mut results) {
            Ok(()) => {}
            Err(e) => failure = Some(e),
        }
    }
    let passed = failure.is_none();
    results.insert("passed".into(), json!(passed));
    Ok(Outcome {
        results: Value::Object(results),
        csv: None,
        code: if passed { EXIT_OK } else { EXIT_VALIDATION },
        error: failure,
    })
}

fn stage_checks(
    inst: &InstanceFile,
    algebra: crate::lie::LieAlgebra,
    results: &mut serde_json::Map<String, Value>,
) -> Result<(), CliError> {
    let space = inst.space(algebra)?;
    let kf = space.algebra().killing_form();
    results.insert(
        "reductive".into(),
        json!({
            "dim_g": space.dim_g(),
            "dim_h": space.h_basis().len(),
            "dim_m": space.dim_m(),
            "killing_orthogonality_violation": space.killing_orthogonality_violation(&kf),
            "semisimple": space.algebra().is_semisimple(),
        }),
    );
    let ip = inst.inner_product(space.dim_m())?;
    let inv = ip.invariance_violation(&space);
    let ip_ok = inv <= crate::lie::JACOBI_TOL * ip.matrix().amax().max(1.0);
    results.insert("inner_product".into(), json!({ "invariance_violation": inv, "passed": ip_ok }));
    if !ip_ok {
        return Err(CliError {
            path: Some("inner_product".into()),
            ..CliError::validation(format!("inner product is not Ad(H)-invariant (violation {inv:e})"))
        });
    }
    let metric = inst.metric(&space, &ip)?;
    let x = metric.drift();
    let mut m = serde_json::Map::new();
    m.insert("family".into(), json!(metric.family().name()));
    m.insert("drift_norm".into(), json!(metric.drift_norm()));
    let invariance = space.invariance_violation(&space.from_m_coords(x));
    m.insert("drift_invariance_violation".into(), json!(invariance));
    if *metric.family() != MetricFamily::Riemannian {
        m.insert("douglas".into(), json!(geodesic::douglas_check(&space, metric.inner(), x)));
    }
    let mut regular = true;
    if let MetricFamily::AlphaBeta(phi_expr) = metric.family() {
        let b = metric.drift_norm();
        if b > 0.0 {
            let reg = phi::regularity_check(phi_expr, b)?;
            regular = reg.regular;
            m.insert(
                "regularity".into(),
                json!({
                    "b": reg.b,
                    "regular": reg.regular,
                    "singular_points": reg.singular_at.len(),
                    "first_singular_at": reg.singular_at.first(),
                }),
            );
        }
    }
    results.insert("metric".into(), Value::Object(m));
    if !space.check_invariant_vector(&space.from_m_coords(x)) {
        return Err(CliError { path: Some("metric.X".into()), ..Error::InvariantVectorViolation { violation: invariance }.into() });
    }
    if !regular {
        return Err(CliError {
            path: Some("metric.phi".into()),
            ..CliError::validation("phi violates the regularity condition on [-|X|, |X|]")
        });
    }
    Ok(())
}

fn cmd_check(file: &Path, text: &str, y: &str, tol: f64) -> Result<Outcome, CliError> {
    let l = load(file, text)?;
    let y = instance::parse_vector(y).map_err(|m| CliError { path: Some("--y".into()), ..CliError::validation(m) })?;
    let y = DVector::from_vec(y);
    let report = geodesic::check(&l.space, &l.metric, &y, tol)?;
    Ok(Outcome::ok(to_value(&report)))
}

fn cmd_find(file: &Path, text: &str, config: &SearchConfig) -> Result<Outcome, CliError> {
    let l = load(file, text)?;
    let set = geodesic::find_geodesic_vectors(&l.space, &l.metric, config)?;
    Ok(Outcome::ok(to_value(&set)))
}

fn kropina_drift(l: &Loaded) -> Result<DVector<f64>, CliError> {
    if *l.metric.family() != MetricFamily::Kropina {
        return Err(CliError { path: Some("metric.family".into()), ..CliError::validation("command needs a Kropina metric") });
    }
    Ok(l.metric.drift().clone())
}

/// Evenly spaced samples over `[t_min, t_max]`, defaulting to the pole-free
/// interval shrunk by the pole margin.
fn curve_grid(l: &Loaded, x: &DVector<f64>, t_min: Option<f64>, t_max: Option<f64>, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::validation("points must be at least 2"));
    }
    let (below, above) = existence::pole_free_interval(&l.space, l.metric.inner(), x)?;
    let fallback = below.map(f64::abs).or(above).unwrap_or(1.0);
    let lo = t_min.unwrap_or_else(|| below.unwrap_or(-fallback) * (1.0 - POLE_MARGIN));
    let hi = t_max.unwrap_or_else(|| above.unwrap_or(fallback) * (1.0 - POLE_MARGIN));
    if !(lo < hi) {
        return Err(CliError::validation(format!("empty t range [{lo}, {hi}]")));
    }
    let mut ts: Vec<f64> = (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect();
    if lo < 0.0 && hi > 0.0 && !ts.contains(&0.0) {
        ts.push(0.0);
        ts.sort_by(f64::total_cmp);
    }
    Ok(ts)
}

fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("t,M,domain_flag\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", report::fmt_f64(p.t), report::fmt_f64(p.m), u8::from(p.domain_flag)));
    }
    s
}

fn cmd_exist(file: &Path, text: &str, curve: Option<&Path>, points: usize) -> Result<Outcome, CliError> {
    let l = load(file, text)?;
    let x = kropina_drift(&l)?;
    let cert = existence::kropina_existence(&l.space, l.metric.inner(), &x)?;
    let mut results = to_value(&cert);
    if cert.case == ExistenceCase::EigenSplitGeneral {
        if let Some(path) = curve {
            let ts = curve_grid(&l, &x, None, None, points)?;
            let pts = existence::m_curve(&l.space, l.metric.inner(), &x, &ts)?;
            std::fs::write(path, curve_csv(&pts))
                .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
            results["curve_file"] = json!(path.display().to_string());
        }
    }
    Ok(Outcome::ok(results))
}

fn cmd_mcurve(file: &Path, text: &str, t_min: Option<f64>, t_max: Option<f64>, points: usize) -> Result<Outcome, CliError> {
    let l = load(file, text)?;
    let x = kropina_drift(&l)?;
    let ts = curve_grid(&l, &x, t_min, t_max, points)?;
    let pts = existence::m_curve(&l.space, l.metric.inner(), &x, &ts)?;
    Ok(Outcome { results: json!({ "points": to_value(&pts) }), csv: Some(curve_csv(&pts)), code: EXIT_OK, error: None })
}

fn cmd_classify3d(p: [f64; 4], metric: Classify3dMetric, x: Option<&str>, config: &SearchConfig) -> Result<Outcome, CliError> {
    let params = NonUnimodularParams::new(p[0], p[1], p[2], p[3])?;
    let ip = InnerProduct::identity(3);
    let metric = match (metric, x) {
        (Classify3dMetric::Riemannian, None) => MetricSpec::riemannian(ip),
        (Classify3dMetric::Riemannian, Some(_)) => return Err(CliError::validation("--x needs --metric randers")),
        (Classify3dMetric::Randers, None) => return Err(CliError::validation("--metric randers needs --x")),
        (Classify3dMetric::Randers, Some(x)) => {
            let x = instance::parse_vector(x).map_err(|m| CliError { path: Some("--x".into()), ..CliError::validation(m) })?;
            MetricSpec::randers(ip, DVector::from_vec(x))?
        }
    };
    let c = classify3d::enumerate_and_verify(&params, &metric, config)?;
    let mut outcome = Outcome::ok(to_value(&c));
    if let (Some(predicted), Some(false)) = (c.predicted, c.matches) {
        let e: CliError = Error::PredictionMismatch { predicted, found: c.found }.into();
        outcome.code = e.code;
        outcome.error = Some(e);
    }
    Ok(outcome)
}
