//! Command-line front end: argument and config-file merging, dispatch, and
//! CSV/JSON output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::analytic::{p2_threshold, StateOneParams};
use crate::experiments::{
    coexistence_curve, fourier_test_state1, landscape_scan, linspace, scaling_study_over,
    AliceSetting, BobSetting, Mode,
};
use crate::linalg::ComplexMatrix;
use crate::observables::{
    b0_closed_form, bm_bm1_closed_form, kcbs_observable, kcbs_pair, kcbs_vector, s_operator,
    CycleGeometry,
};
use crate::validate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

const EXIT_CODE_HELP: &str = "\
Exit codes:
  0  success
  2  usage error (bad flag, malformed grid or range, missing parameter)
  3  I/O error (config file, output file)
  4  domain error (invalid cycle size, no intersection, non-physical input)
  5  validate: at least one check failed

Angles are given in degrees. Grids are start:stop:count with both ends
included; cycle ranges are start:stop:step. A single value is also accepted.";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("{0} validation check(s) failed")]
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: impl AsRef<Path>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.as_ref().display().to_string();
    move |source| CliError::Io { path, source }
}

#[derive(Debug, Parser)]
#[command(
    name = "chsh-kcbs",
    version,
    about = "CHSH nonlocality and n-cycle KCBS contextuality on a qubit-qutrit pair",
    after_help = EXIT_CODE_HELP
)]
pub struct Cli {
    /// TOML file supplying defaults for any flag; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Leave the generation timestamp out of output headers.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump KCBS vectors, observables, closed forms and the cycle operator as JSON.
    #[command(after_help = EXIT_CODE_HELP)]
    Observables(ObservablesArgs),
    /// Print the Bob-level-2 population above which KCBS is violated.
    #[command(after_help = EXIT_CODE_HELP)]
    Threshold(ThresholdArgs),
    /// CHSH and KCBS margins of the minimal state over a (theta, phi) grid.
    #[command(after_help = EXIT_CODE_HELP)]
    Landscape(LandscapeArgs),
    /// Angle where the two margins coincide, for each n in a range.
    #[command(after_help = EXIT_CODE_HELP)]
    Coexist(RangeArgs),
    /// Coexistence points plus exact and asymptotic psi_n margins.
    #[command(after_help = EXIT_CODE_HELP)]
    Scaling(RangeArgs),
    /// Estimate one correlator with the ancilla-qutrit Fourier test.
    #[command(name = "fourier-test", after_help = EXIT_CODE_HELP)]
    FourierTest(FourierArgs),
    /// Run the built-in invariant suite and print a report.
    #[command(after_help = EXIT_CODE_HELP)]
    Validate,
}

#[derive(Debug, Args)]
pub struct ObservablesArgs {
    /// Odd cycle size, at least 5.
    #[arg(long)]
    pub n: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Cycle size or range start:stop:step.
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Odd cycle size, at least 5.
    #[arg(long)]
    pub n: Option<String>,
    /// Theta grid in degrees, start:stop:count.
    #[arg(long)]
    pub theta: Option<String>,
    /// Phi grid in degrees, start:stop:count.
    #[arg(long)]
    pub phi: Option<String>,
    /// analytic or circuit.
    #[arg(long)]
    pub mode: Option<String>,
    /// Shots per Fourier test (circuit mode).
    #[arg(long)]
    pub shots: Option<u64>,
    /// Master seed (circuit mode, default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Cycle sizes, start:stop:step or a single value.
    #[arg(long)]
    pub n: Option<String>,
    /// Output CSV; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FourierArgs {
    /// Odd cycle size, at least 5.
    #[arg(long)]
    pub n: Option<String>,
    /// Theta of the prepared state, degrees.
    #[arg(long)]
    pub theta: Option<String>,
    /// Phi of the prepared state, degrees.
    #[arg(long)]
    pub phi: Option<String>,
    /// Alice's observable: w0, w2 (optimal rotations for the state) or id.
    #[arg(long)]
    pub alice: Option<String>,
    /// Bob's observable: b0, bmbm1 or pair:J for B_J B_J+1.
    #[arg(long)]
    pub bob: Option<String>,
    /// Number of sampled shots; exact probabilities only when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Sampling seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Values accepted in a config file. Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<Scalar>,
    pub theta: Option<Scalar>,
    pub phi: Option<Scalar>,
    pub mode: Option<String>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub alice: Option<String>,
    pub bob: Option<String>,
    pub no_timestamp: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn into_string(self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Text(s) => s,
        }
    }
}

pub fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Effective parameters of a run, in the order they are echoed.
#[derive(Debug, Default)]
struct Echo(Vec<(&'static str, String)>);

impl Echo {
    fn push(&mut self, key: &'static str, value: impl ToString) {
        self.0.push((key, value.to_string()));
    }

    fn json(&self) -> Value {
        Value::Object(
            self.0
                .iter()
                .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
                .collect(),
        )
    }
}

struct Context {
    file: FileConfig,
    timestamp: Option<u64>,
}

impl Context {
    fn pick_str(
        &mut self,
        flag: Option<String>,
        file: fn(&mut FileConfig) -> Option<Scalar>,
    ) -> Option<String> {
        flag.or_else(|| file(&mut self.file).map(Scalar::into_string))
    }

    fn require(value: Option<String>, name: &str) -> Result<String, CliError> {
        value.ok_or_else(|| usage(format!("missing --{name} (flag or config key)")))
    }

    fn header(&self, command: &str, echo: &Echo) -> Vec<(String, String)> {
        let mut lines = vec![
            (
                "tool".to_string(),
                format!("chsh-kcbs {}", env!("CARGO_PKG_VERSION")),
            ),
            ("command".to_string(), command.to_string()),
        ];
        lines.extend(echo.0.iter().map(|(k, v)| (k.to_string(), v.clone())));
        if let Some(t) = self.timestamp {
            lines.push(("generated_unix".to_string(), t.to_string()));
        }
        lines
    }

    fn json_doc(&self, command: &str, echo: &Echo, payload: Value) -> Value {
        let mut doc = json!({
            "tool": "chsh-kcbs",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": echo.json(),
        });
        if let Some(t) = self.timestamp {
            doc["generated_unix"] = json!(t);
        }
        if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
            d.extend(p);
        }
        doc
    }
}

/// Formats with at most nine significant digits, plain decimal where that is
/// short, scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-5..=9).contains(&exp) {
        let (mantissa, _) = sci.split_at(sci.find('e').expect("exponent"));
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `start:stop:count` (inclusive) or a single value, in degrees.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        usage(format!(
            "malformed grid `{spec}`, expected start:stop:count"
        ))
    };
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse().map_err(|_| bad())?]),
        [start, stop, count] => {
            let start: f64 = start.parse().map_err(|_| bad())?;
            let stop: f64 = stop.parse().map_err(|_| bad())?;
            let count: usize = count.parse().map_err(|_| bad())?;
            if count == 0 || !start.is_finite() || !stop.is_finite() {
                return Err(bad());
            }
            Ok(linspace(start, stop, count))
        }
        _ => Err(bad()),
    }
}

/// `start:stop:step` or a single value.
pub fn parse_n_range(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || {
        usage(format!(
            "malformed range `{spec}`, expected start:stop:step"
        ))
    };
    let parts: Result<Vec<usize>, _> = spec.split(':').map(|p| p.trim().parse::<usize>()).collect();
    match parts.map_err(|_| bad())?.as_slice() {
        [single] => Ok(vec![*single]),
        [start, stop, step] if *step > 0 && start <= stop => {
            Ok((*start..=*stop).step_by(*step).collect())
        }
        _ => Err(bad()),
    }
}

fn parse_single_n(spec: &str) -> Result<usize, CliError> {
    spec.trim()
        .parse()
        .map_err(|_| usage(format!("--n expects a single integer, got `{spec}`")))
}

fn parse_angle(spec: &str, name: &str) -> Result<f64, CliError> {
    spec.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| {
            usage(format!(
                "--{name} expects an angle in degrees, got `{spec}`"
            ))
        })
}

fn csv_bytes(
    header: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    for (k, v) in header {
        buf.extend_from_slice(format!("# {k} = {v}\n").as_bytes());
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf);
    let io = |e: csv::Error| CliError::Io {
        path: "<csv>".into(),
        source: e.into(),
    };
    w.write_record(columns).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io {
        path: "<csv>".into(),
        source: e.into_error(),
    })
}

fn json_bytes(doc: &Value) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(doc).expect("serializable");
    v.push(b'\n');
    v
}

/// Writes all of `bytes` to `out` through a sibling temp file and a rename,
/// or to `stdout` when no path is given.
pub fn write_output(
    out: Option<&Path>,
    bytes: &[u8],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match out {
        None => stdout.write_all(bytes).map_err(io_err("<stdout>")),
        Some(path) if path.as_os_str() == "-" => {
            stdout.write_all(bytes).map_err(io_err("<stdout>"))
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(dir))?;
            tmp.write_all(bytes).map_err(io_err(tmp.path()))?;
            tmp.as_file().sync_all().map_err(io_err(tmp.path()))?;
            tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
            Ok(())
        }
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(m).expect("serializable")
}

fn cmd_observables(
    args: ObservablesArgs,
    ctx: &mut Context,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let n = parse_single_n(&Context::require(
        ctx.pick_str(args.n, |f| f.n.take()),
        "n",
    )?)?;
    let out = args.out.or_else(|| ctx.file.out.take());
    let mut echo = Echo::default();
    echo.push("n", n);
    let g = CycleGeometry::new(n)?;
    let vectors = (0..n)
        .map(|j| kcbs_vector(n, j).map(|v| matrix_json(&ComplexMatrix::column(&v))))
        .collect::<crate::Result<Vec<_>>>()?;
    let observables = (0..n)
        .map(|j| kcbs_observable(n, j).map(|o| matrix_json(&o.matrix)))
        .collect::<crate::Result<Vec<_>>>()?;
    let payload = json!({
        "n": n,
        "lambda1": g.lambda1,
        "lambda3": g.lambda3,
        "vectors": vectors,
        "observables": observables,
        "b0": matrix_json(&b0_closed_form(n)?.matrix),
        "bm_bm1": matrix_json(&bm_bm1_closed_form(n)?.matrix),
        "bm_bm1_product": matrix_json(&kcbs_pair(n, g.m)?.matrix),
        "s": matrix_json(&s_operator(n)?.matrix),
    });
    write_output(
        out.as_deref(),
        &json_bytes(&ctx.json_doc("observables", &echo, payload)),
        stdout,
    )
}

fn cmd_threshold(
    args: ThresholdArgs,
    ctx: &mut Context,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let ns = parse_n_range(&Context::require(
        ctx.pick_str(args.n, |f| f.n.take()),
        "n",
    )?)?;
    let mut text = String::new();
    for &n in &ns {
        let t = p2_threshold(n)?;
        if ns.len() == 1 {
            text.push_str(&format!("{t:.6}\n"));
        } else {
            text.push_str(&format!("{n}\t{t:.6}\n"));
        }
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(io_err("<stdout>"))
}

fn cmd_landscape(
    args: LandscapeArgs,
    ctx: &mut Context,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let n_spec = Context::require(ctx.pick_str(args.n, |f| f.n.take()), "n")?;
    let theta_spec = Context::require(ctx.pick_str(args.theta, |f| f.theta.take()), "theta")?;
    let phi_spec = Context::require(ctx.pick_str(args.phi, |f| f.phi.take()), "phi")?;
    let mode_name = args
        .mode
        .or_else(|| ctx.file.mode.take())
        .unwrap_or_else(|| "analytic".into());
    let shots = args.shots.or(ctx.file.shots);
    let seed = args.seed.or(ctx.file.seed).unwrap_or(0);
    let out = args.out.or_else(|| ctx.file.out.take());

    let n = parse_single_n(&n_spec)?;
    let thetas = parse_grid(&theta_spec)?;
    let phis = parse_grid(&phi_spec)?;
    let mode = match mode_name.as_str() {
        "analytic" => Mode::Analytic,
        "circuit" => Mode::Circuit {
            shots: shots.ok_or_else(|| usage("circuit mode requires --shots"))?,
            seed,
        },
        other => {
            return Err(usage(format!(
                "unknown mode `{other}`, expected analytic or circuit"
            )))
        }
    };

    let mut echo = Echo::default();
    echo.push("n", n);
    echo.push("theta", &theta_spec);
    echo.push("phi", &phi_spec);
    echo.push("mode", &mode_name);
    if let Mode::Circuit { shots, seed } = mode {
        echo.push("shots", shots);
        echo.push("seed", seed);
    }

    let records = landscape_scan(n, &thetas, &phis, mode)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_sig(r.theta_deg),
                fmt_sig(r.phi_deg),
                fmt_sig(r.chsh_margin),
                fmt_sig(r.kcbs_margin),
                r.mode.to_string(),
                opt(r.shots),
                opt(r.seed),
            ]
        })
        .collect();
    let cols = [
        "n",
        "theta_deg",
        "phi_deg",
        "chsh_margin",
        "kcbs_margin",
        "mode",
        "shots",
        "seed",
    ];
    let bytes = csv_bytes(&ctx.header("landscape", &echo), &cols, &rows)?;
    write_output(out.as_deref(), &bytes, stdout)
}

fn range_inputs(
    args: RangeArgs,
    ctx: &mut Context,
) -> Result<(String, Vec<usize>, Option<PathBuf>), CliError> {
    let spec = Context::require(ctx.pick_str(args.n, |f| f.n.take()), "n")?;
    let ns = parse_n_range(&spec)?;
    Ok((spec, ns, args.out.or_else(|| ctx.file.out.take())))
}

fn cmd_coexist(args: RangeArgs, ctx: &mut Context, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (spec, ns, out) = range_inputs(args, ctx)?;
    let mut echo = Echo::default();
    echo.push("n", spec);
    let rows: Vec<Vec<String>> = coexistence_curve(&ns)?
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_sig(r.theta_opt_deg),
                fmt_sig(r.overlap),
                fmt_sig(r.residual),
            ]
        })
        .collect();
    let bytes = csv_bytes(
        &ctx.header("coexist", &echo),
        &["n", "theta_opt_deg", "overlap", "residual"],
        &rows,
    )?;
    write_output(out.as_deref(), &bytes, stdout)
}

fn cmd_scaling(args: RangeArgs, ctx: &mut Context, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (spec, ns, out) = range_inputs(args, ctx)?;
    let mut echo = Echo::default();
    echo.push("n", spec);
    let study = scaling_study_over(&ns)?;
    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            let c = &r.coexistence;
            vec![
                c.n.to_string(),
                fmt_sig(c.theta_opt_deg),
                fmt_sig(c.overlap),
                fmt_sig(c.residual),
                fmt_sig(r.psi_n_kcbs_margin),
                fmt_sig(r.psi_n_chsh_margin),
                fmt_sig(r.asym_kcbs),
                fmt_sig(r.asym_chsh),
            ]
        })
        .collect();
    let mut header = ctx.header("scaling", &echo);
    header.push((
        "overlap_log_log_slope".into(),
        study.overlap_log_log_slope.map(fmt_sig).unwrap_or_default(),
    ));
    let cols = [
        "n",
        "theta_opt_deg",
        "overlap",
        "residual",
        "psi_n_kcbs_margin",
        "psi_n_chsh_margin",
        "asym_kcbs",
        "asym_chsh",
    ];
    let bytes = csv_bytes(&header, &cols, &rows)?;
    write_output(out.as_deref(), &bytes, stdout)
}

fn cmd_fourier(
    args: FourierArgs,
    ctx: &mut Context,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let n = parse_single_n(&Context::require(
        ctx.pick_str(args.n, |f| f.n.take()),
        "n",
    )?)?;
    let theta = parse_angle(
        &Context::require(ctx.pick_str(args.theta, |f| f.theta.take()), "theta")?,
        "theta",
    )?;
    let phi = parse_angle(
        &Context::require(ctx.pick_str(args.phi, |f| f.phi.take()), "phi")?,
        "phi",
    )?;
    let alice_name = Context::require(args.alice.or_else(|| ctx.file.alice.take()), "alice")?;
    let bob_name = Context::require(args.bob.or_else(|| ctx.file.bob.take()), "bob")?;
    let shots = args.shots.or(ctx.file.shots);
    let seed = args.seed.or(ctx.file.seed).unwrap_or(0);
    let out = args.out.or_else(|| ctx.file.out.take());

    let alice: AliceSetting = alice_name
        .parse()
        .map_err(|e: crate::Error| usage(e.to_string()))?;
    let bob: BobSetting = bob_name
        .parse()
        .map_err(|e: crate::Error| usage(e.to_string()))?;
    if !(0.0..=180.0).contains(&theta) {
        return Err(usage(format!("--theta must lie in [0, 180], got {theta}")));
    }
    let params = StateOneParams::from_degrees(theta, phi)?;
    let run = fourier_test_state1(n, params, alice, bob, shots, seed)?;
    let report = run.sampled.as_ref().unwrap_or(&run.exact);

    let mut echo = Echo::default();
    echo.push("n", n);
    echo.push("theta", theta);
    echo.push("phi", phi);
    echo.push("alice", &alice_name);
    echo.push("bob", &bob_name);
    if let Some(s) = shots {
        echo.push("shots", s);
        echo.push("seed", seed);
    }
    let payload = json!({
        "probabilities": run.exact.probabilities(),
        "counts": report.counts,
        "shots": shots,
        "seed": shots.map(|_| seed),
        "estimators": {
            "combined": report.estimator_combined,
            "p0": report.estimator_p0,
            "p1": report.estimator_p1,
        },
        "standard_error": run.standard_error,
        "exact_reference": run.reference,
    });
    write_output(
        out.as_deref(),
        &json_bytes(&ctx.json_doc("fourier-test", &echo, payload)),
        stdout,
    )
}

fn cmd_validate(stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = validate::run_all();
    writeln!(stdout, "{report}").map_err(io_err("<stdout>"))?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Validation(report.failures()))
    }
}

pub fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    let no_timestamp = cli.no_timestamp || file.no_timestamp.unwrap_or(false);
    let timestamp = (!no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let mut ctx = Context { file, timestamp };
    match cli.command {
        Command::Observables(a) => cmd_observables(a, &mut ctx, stdout),
        Command::Threshold(a) => cmd_threshold(a, &mut ctx, stdout),
        Command::Landscape(a) => cmd_landscape(a, &mut ctx, stdout),
        Command::Coexist(a) => cmd_coexist(a, &mut ctx, stdout),
        Command::Scaling(a) => cmd_scaling(a, &mut ctx, stdout),
        Command::FourierTest(a) => cmd_fourier(a, &mut ctx, stdout),
        Command::Validate => cmd_validate(stdout),
    }
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Reads a CSV written by this tool, skipping `#` header lines.
pub fn read_csv_records(bytes: &[u8]) -> csv::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(bytes);
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
        .collect::<csv::Result<_>>()?;
    Ok((header, rows))
}

/// `# key = value` header lines of a CSV written by this tool.
pub fn read_csv_header(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
