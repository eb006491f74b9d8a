//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::certificates::{one_point_check, run_suite, CertificateReport, SuiteOptions};
use crate::linalg::SymmetricMatrix;
use crate::process::{
    check_averaged_bound, monte_carlo, BernoulliDiagonalSampler, ContractionProcess,
    ContractionSampler, FixedSampler, RankOneSampler,
};
use crate::rational::parse_rational;
use crate::recursion::{
    check_upper_hypothesis, default_window, fit_loglog, lower_bound_family, normalized_floor,
    plot_script, run_recursion, validate_spectrum, write_recursion_csv, RateFit,
};
use crate::solvers::{random_gaussian_system, run_solver, LinearSystem, Method, SolverConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CONTRACTION_LAB_THREADS";

const SUBCOMMANDS: [&str; 5] = ["solve", "simulate", "recursion", "certify", "fit"];

#[derive(Debug, Parser)]
#[command(
    name = "contraction-lab",
    version,
    about = "Stochastic contraction experiments and exact rate certificates"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file supplying flags for the subcommand; flags given
    /// on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an iterative solver on a linear system and write its trace.
    Solve(SolveArgs),
    /// Monte Carlo simulation of a stochastic contraction process.
    Simulate(SimulateArgs),
    /// Run the eigenvalue recursion and fit its decay rate.
    Recursion(RecursionArgs),
    /// Verify the exact rational certificates.
    Certify(CertifyArgs),
    /// Fit a log-log slope to a column of a CSV file.
    Fit(FitArgs),
}

/// Where a linear system comes from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SystemSource {
    /// System file: header `m n`, `m` rows of `A`, then `b`, then optional `x*`.
    #[arg(long, value_name = "PATH")]
    pub system: Option<PathBuf>,
    /// Random consistent Gaussian system of shape `MxN` drawn from the seed.
    #[arg(long, value_name = "MxN", value_parser = parse_shape)]
    pub random: Option<(usize, usize)>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SystemSource,
    /// rk, rcd, block or sketch.
    #[arg(long, default_value = "rk")]
    pub method: Method,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long)]
    pub seed: u64,
    /// Rows per step for the block and sketch methods.
    #[arg(long, default_value_t = 1)]
    pub block_size: usize,
    /// Apply a randomized Hadamard transform to the rows first.
    #[arg(long)]
    pub rht: bool,
    /// Trace CSV path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Also write the (generated) system to this path.
    #[arg(long, value_name = "PATH")]
    pub save_system: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessKind {
    /// Kaczmarz projections of a linear system.
    Rk,
    /// Coordinate descent on a symmetric positive definite system.
    Rcd,
    /// The same diagonal contraction every step.
    Fixed,
    /// Independent Bernoulli coordinate projections.
    Bernoulli,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "rk")]
    pub process: ProcessKind,
    /// System file for the rk and rcd processes.
    #[arg(long, value_name = "PATH", conflicts_with = "random")]
    pub system: Option<PathBuf>,
    /// Random Gaussian system of shape `MxN` for the rk process.
    #[arg(long, value_name = "MxN", value_parser = parse_shape)]
    pub random: Option<(usize, usize)>,
    /// Diagonal for the fixed and bernoulli processes (list or `loglin(n,hi,lo)`).
    #[arg(long, value_parser = parse_spectrum)]
    pub spectrum: Option<Spectrum>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long)]
    pub seed: u64,
    /// Mean/stderr CSV path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecursionArgs {
    /// Spectrum of the mean contraction: a comma list or `loglin(n,hi,lo)`.
    #[arg(long, value_parser = parse_spectrum, required_unless_present = "lower_bound_family", conflicts_with = "lower_bound_family")]
    pub spectrum: Option<Spectrum>,
    /// Use the lower-bound family `ρ_m = (1 - e^{-1.5/m})/2`, `m = 1..=N`.
    #[arg(long, value_name = "N")]
    pub lower_bound_family: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Fit window `lo:hi` in steps; defaults to the last two decades.
    #[arg(long, value_name = "LO:HI", value_parser = parse_window)]
    pub fit: Option<(usize, usize)>,
    /// Check `μ_t` against `C/(t+1)^α` with this exponent.
    #[arg(long, requires = "upper_c")]
    pub upper_alpha: Option<f64>,
    /// Constant `C` for the upper check.
    #[arg(long, requires = "upper_alpha")]
    pub upper_c: Option<f64>,
    /// Exponent for the normalized floor `μ_t (t+1)^e` of the lower-bound family.
    #[arg(long, default_value_t = 0.753)]
    pub floor_exponent: f64,
    /// First step of the normalized-floor window.
    #[arg(long, default_value_t = 50)]
    pub floor_from: usize,
    /// Write per-coordinate eigenvalue columns (spectra up to 64 entries).
    #[arg(long)]
    pub lambdas: bool,
    /// Trace CSV path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Write a matplotlib script plotting the CSV.
    #[arg(long, value_name = "PATH", requires = "output")]
    pub plot_script: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Run a single certificate; a bare family name selects its alpha34 variant.
    #[arg(long, value_name = "NAME")]
    pub only: Option<String>,
    /// Negative control: tighten the f(300) target to 50/1000.
    #[arg(long)]
    pub tamper: bool,
    /// Run the generic one-point criterion for `ALPHA:ELL` (rationals) instead of the suite.
    #[arg(long, value_name = "ALPHA:ELL", conflicts_with_all = ["only", "tamper"])]
    pub one_point: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Also write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV file with a header row.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, default_value = "mu_t")]
    pub column: String,
    /// Window `lo:hi` of row indices; defaults to the last two decades.
    #[arg(long, value_name = "LO:HI", value_parser = parse_window)]
    pub window: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// A parsed spectrum specification.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(pub Vec<f64>);

impl FromStr for Spectrum {
    type Err = Error;

    /// Accepts `0.9,0.5,0.1` or `loglin(n, hi, lo)`: `n` values spaced
    /// geometrically from `hi` down to `lo`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values =
            if let Some(inner) = s.strip_prefix("loglin(").and_then(|r| r.strip_suffix(')')) {
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                let [n, hi, lo] = parts[..] else {
                    return Err(Error::Parse(format!(
                        "loglin expects 3 arguments, got '{inner}'"
                    )));
                };
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad count '{n}'")))?;
                let hi: f64 = hi
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value '{hi}'")))?;
                let lo: f64 = lo
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value '{lo}'")))?;
                if n == 0 || !(hi > 0.0 && lo > 0.0) {
                    return Err(Error::invalid("loglin needs n >= 1 and positive endpoints"));
                }
                if n == 1 {
                    vec![hi]
                } else {
                    let ratio = (lo / hi).ln();
                    (0..n)
                        .map(|k| hi * (ratio * k as f64 / (n - 1) as f64).exp())
                        .collect()
                }
            } else {
                s.split(',')
                    .map(|v| {
                        let v = v.trim();
                        v.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad spectrum entry '{v}'")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
        validate_spectrum(&values)?;
        Ok(Spectrum(values))
    }
}

fn parse_spectrum(s: &str) -> std::result::Result<Spectrum, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got '{s}'"))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| format!("bad row count '{m}'"))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("bad column count '{n}'"))?;
    if m == 0 || n == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((m, n))
}

fn parse_window(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let parse = |v: &str| -> std::result::Result<usize, String> {
        let v = v.trim();
        v.parse::<usize>()
            .or_else(|_| match v.parse::<f64>() {
                Ok(f) if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 => Ok(f as usize),
                _ => Err(()),
            })
            .map_err(|_| format!("bad window bound '{v}'"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

/// Turns `key = value` lines into `--key value` arguments. `true` and
/// `false` values switch boolean flags on or leave them off.
pub fn config_args(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", no + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(Error::Parse(format!("config line {}: invalid key", no + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

/// Inserts the arguments of a `--config` file right after the subcommand so
/// that flags given later on the command line override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let extra = config_args(&std::fs::read_to_string(&path)?)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn init_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                warn!("could not configure {n} worker threads: {e}");
            }
        }
        _ => warn!("ignoring {THREADS_ENV}={v}: expected a positive integer"),
    }
}

/// Parses `std::env::args` and runs the selected subcommand, returning the
/// process exit code.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    init_threads();
    run_with_args(std::env::args_os().collect())
}

pub fn run_with_args(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Recursion(a) => cmd_recursion(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Fit(a) => cmd_fit(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Writes to stdout; a closed pipe (as in `| head`) is not an error.
fn print_stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Summary lines go to stdout when the data went to a file, and to stderr
/// when stdout carries the CSV.
fn report(to_file: bool, line: &str) {
    if to_file {
        let _ = print_stdout(&format!("{line}\n"));
    } else {
        eprintln!("{line}");
    }
}

fn load_system(source: &SystemSource, seed: u64) -> Result<LinearSystem> {
    match (&source.system, source.random) {
        (Some(path), _) => LinearSystem::from_path(path),
        (None, Some((m, n))) => random_gaussian_system(m, n, seed),
        (None, None) => Err(Error::invalid("a system source is required")),
    }
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let sys = load_system(&a.source, a.seed)?;
    if let Some(p) = &a.save_system {
        std::fs::write(p, sys.to_text())?;
    }
    if sys.x_star().is_none() {
        info!("no x* in the system file; distances use the minimum-norm solution");
    }
    let cfg = SolverConfig {
        method: a.method,
        block_size: a.block_size,
        seed: a.seed,
        rht: a.rht,
    };
    let run = run_solver(&sys, &cfg, a.steps)?;
    if let Some((before, after)) = run.rht_frobenius {
        info!("RHT applied: |A|_F = {before:.12e}, |QA|_F = {after:.12e}");
    }
    run.trace.write_csv(open_output(a.output.as_deref())?)?;
    let last = run.trace.len() - 1;
    report(
        a.output.is_some(),
        &format!(
            "method={} steps={} final_residual_sq={:e} final_dist_sq={:e}",
            a.method, a.steps, run.trace.residual_sq[last], run.trace.dist_sq[last]
        ),
    );
    Ok(EXIT_OK)
}

fn build_process(a: &SimulateArgs) -> Result<ContractionProcess> {
    let need_spectrum = || {
        a.spectrum
            .as_ref()
            .map(|s| s.0.clone())
            .ok_or_else(|| Error::invalid("--spectrum is required for this process"))
    };
    let system = || -> Result<LinearSystem> {
        match (&a.system, a.random) {
            (Some(p), _) => LinearSystem::from_path(p),
            (None, Some((m, n))) => random_gaussian_system(m, n, a.seed),
            (None, None) => Err(Error::invalid(
                "--system or --random is required for this process",
            )),
        }
    };
    let (sampler, delta0): (Box<dyn ContractionSampler>, Vec<f64>) = match a.process {
        ProcessKind::Rk => {
            let sys = system()?;
            let x = sys.reference_solution()?;
            (
                Box::new(RankOneSampler::kaczmarz(sys.a())?),
                x.iter().map(|v| -v).collect(),
            )
        }
        ProcessKind::Rcd => {
            let sys = system()?;
            let x = sys.reference_solution()?;
            let s = SymmetricMatrix::new(sys.a().clone())?;
            (
                Box::new(RankOneSampler::coordinate_descent(&s)?),
                x.iter().map(|v| -v).collect(),
            )
        }
        ProcessKind::Fixed => {
            let d = need_spectrum()?;
            let n = d.len();
            (
                Box::new(FixedSampler::new(SymmetricMatrix::diagonal(&d))?),
                vec![1.0; n],
            )
        }
        ProcessKind::Bernoulli => {
            let d = need_spectrum()?;
            let n = d.len();
            (Box::new(BernoulliDiagonalSampler::new(d)?), vec![1.0; n])
        }
    };
    ContractionProcess::new(sampler, delta0)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    if a.replicates == 0 {
        return Err(Error::invalid("--replicates must be at least 1"));
    }
    if a.replicates == 1 {
        warn!("a single replicate gives no standard errors; stderr columns are left empty");
    }
    let p = build_process(a)?;
    let mc = monte_carlo(&p, a.steps, a.replicates, a.seed)?;
    mc.write_csv(open_output(a.output.as_deref())?)?;
    let to_file = a.output.is_some();
    let check = check_averaged_bound(&mc);
    report(
        to_file,
        &format!(
            "replicates={} steps={} averaged_bound={} exceedances={}",
            a.replicates,
            a.steps,
            if check.passed() { "pass" } else { "fail" },
            check.averaged.len() + check.random_iterate.len()
        ),
    );
    if a.process == ProcessKind::Fixed {
        // Deterministic process: E|Δ_t|² = Σ (1 - m_i)^{2t} δ_i².
        let d = &a.spectrum.as_ref().expect("checked in build_process").0;
        let worst = (0..mc.len())
            .map(|t| {
                let exact: f64 = d.iter().map(|m| (1.0 - m).powi(2 * t as i32)).sum();
                ((mc.norm_sq.mean[t] - exact) / exact.max(f64::MIN_POSITIVE)).abs()
            })
            .fold(0.0, f64::max);
        report(to_file, &format!("closed_form_max_rel_error={worst:e}"));
    }
    Ok(EXIT_OK)
}

pub fn cmd_recursion(a: &RecursionArgs) -> Result<i32> {
    let (rho, label) = match (&a.spectrum, a.lower_bound_family) {
        (Some(s), _) => (s.0.clone(), format!("spectrum of {} values", s.0.len())),
        (None, Some(n)) => (
            lower_bound_family(n)?,
            format!("lower-bound family of size {n}"),
        ),
        (None, None) => {
            return Err(Error::invalid(
                "--spectrum or --lower-bound-family is required",
            ))
        }
    };
    let trace = run_recursion(&rho, a.steps, a.lambdas)?;
    write_recursion_csv(&trace, open_output(a.output.as_deref())?)?;
    let to_file = a.output.is_some();
    report(
        to_file,
        &format!(
            "{label}, steps={}, mu_final={:e}",
            a.steps, trace.mu[a.steps]
        ),
    );

    let fit: Option<RateFit> = match a.fit {
        Some(w) => Some(fit_loglog(&trace.mu, w)?),
        None if a.steps >= 2 => fit_loglog(&trace.mu, default_window(a.steps)).ok(),
        None => None,
    };
    if let Some(f) = &fit {
        report(
            to_file,
            &format!(
                "fit window=[{}, {}] slope={:.6} intercept={:.6} r_squared={:.6}",
                f.window.0, f.window.1, f.slope, f.intercept, f.r_squared
            ),
        );
    }
    if let (Some(alpha), Some(c)) = (a.upper_alpha, a.upper_c) {
        let r = check_upper_hypothesis(&rho, a.steps, alpha, c)?;
        report(
            to_file,
            &format!(
                "upper check alpha={alpha} C={c}: violations={} max_ratio={:.6} at t={}",
                r.violation_count, r.max_ratio, r.argmax_ratio
            ),
        );
    }
    if a.lower_bound_family.is_some() && a.floor_from <= a.steps {
        let r = normalized_floor(&trace.mu, a.floor_exponent, a.floor_from, a.steps)?;
        report(
            to_file,
            &format!(
                "normalized floor mu_t (t+1)^{}: start={:.6} min={:.6} at t={} ratio={:.6}",
                r.exponent, r.value_at_start, r.min_value, r.argmin, r.ratio
            ),
        );
    }
    if let (Some(script), Some(csv)) = (&a.plot_script, &a.output) {
        std::fs::write(
            script,
            plot_script(&csv.to_string_lossy(), fit.as_ref(), &label),
        )?;
    }
    Ok(EXIT_OK)
}

fn emit_reports(a: &CertifyArgs, reports: &[CertificateReport], text: &str) -> Result<()> {
    let json = serde_json::to_string_pretty(reports).map_err(|e| Error::Parse(e.to_string()))?;
    match a.format {
        Format::Text => print_stdout(text)?,
        Format::Json => print_stdout(&format!("{json}\n"))?,
    }
    if let Some(p) = &a.report {
        std::fs::write(p, format!("{json}\n"))?;
    }
    Ok(())
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<i32> {
    if let Some(spec) = &a.one_point {
        let (alpha, ell) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected ALPHA:ELL, got '{spec}'")))?;
        let r = one_point_check(&parse_rational(alpha)?, &parse_rational(ell)?)?;
        let verified = r.verified;
        emit_reports(
            a,
            std::slice::from_ref(&r),
            &format!("{}\n", r.summary_line()),
        )?;
        return Ok(if verified { EXIT_OK } else { EXIT_CERTIFICATE });
    }
    let suite = run_suite(&SuiteOptions {
        only: a.only.clone(),
        tamper: a.tamper,
    })?;
    emit_reports(a, &suite.certificates, &suite.summary())?;
    if a.format == Format::Json {
        for n in &suite.notes {
            eprintln!("note: {n}");
        }
    }
    Ok(if suite.all_verified() {
        EXIT_OK
    } else {
        EXIT_CERTIFICATE
    })
}

/// Reads one numeric column of a CSV file with a header row.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let idx = rdr
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::invalid(format!("no column '{column}' in {}", path.display())))?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let cell = rec.get(idx).unwrap_or("");
            cell.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{cell}' in column '{column}'")))
        })
        .collect()
}

pub fn cmd_fit(a: &FitArgs) -> Result<i32> {
    let values = read_csv_column(&a.input, &a.column)?;
    if values.len() < 3 {
        return Err(Error::invalid("need at least three rows to fit"));
    }
    let window = a.window.unwrap_or_else(|| default_window(values.len() - 1));
    let f = fit_loglog(&values, window)?;
    let line = match a.format {
        Format::Text => format!(
            "window=[{}, {}] slope={:.6} intercept={:.6} r_squared={:.6}",
            f.window.0, f.window.1, f.slope, f.intercept, f.r_squared
        ),
        Format::Json => serde_json::json!({
            "window": [f.window.0, f.window.1],
            "slope": f.slope,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
        })
        .to_string(),
    };
    print_stdout(&format!("{line}\n"))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn spectrum_forms() {
        assert_eq!("0.5".parse::<Spectrum>().unwrap().0, vec![0.5]);
        assert_eq!("0.9, 0.1".parse::<Spectrum>().unwrap().0, vec![0.9, 0.1]);
        let s = "loglin(50,1,1e-20)".parse::<Spectrum>().unwrap().0;
        assert_eq!(s.len(), 50);
        assert_eq!(s[0], 1.0);
        assert!((s[49] / 1e-20 - 1.0).abs() < 1e-12);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert!("1.5".parse::<Spectrum>().is_err());
        assert!("loglin(3,1)".parse::<Spectrum>().is_err());
        assert!("abc".parse::<Spectrum>().is_err());
    }

    #[test]
    fn windows_and_shapes() {
        assert_eq!(parse_window("1000:100000"), Ok((1000, 100000)));
        assert_eq!(parse_window("1e3:1e5"), Ok((1000, 100000)));
        assert!(parse_window("10").is_err());
        assert_eq!(parse_shape("40x20"), Ok((40, 20)));
        assert!(parse_shape("0x3").is_err());
    }

    #[test]
    fn config_file_precedes_flags() {
        let extra =
            config_args("# comment\nsteps = 20\nrht = true\nlambdas = false\nblock_size=4\n")
                .unwrap();
        assert_eq!(
            extra,
            args(&["--steps", "20", "--rht", "--block-size", "4"])
        );
        assert!(config_args("no equals sign").is_err());

        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "steps = 20\nlambdas = true\n").unwrap();
        let expanded = expand_config(args(&[
            "prog",
            "--config",
            cfg.to_str().unwrap(),
            "recursion",
            "--spectrum",
            "0.5",
            "--steps",
            "7",
        ]))
        .unwrap();
        let cli = Cli::try_parse_from(expanded).unwrap();
        let Command::Recursion(r) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(r.steps, 7);
        assert!(r.lambdas);
    }

    #[test]
    fn exit_codes() {
        let io = Error::Io(io::Error::new(io::ErrorKind::NotFound, "x"));
        assert_eq!(exit_code(&io), EXIT_IO);
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_INVALID);
        assert_eq!(
            exit_code(&Error::Inconsistent { residual: 1.0 }),
            EXIT_INVALID
        );
    }
}
