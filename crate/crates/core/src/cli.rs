//! Batch command-line interface emitting CSV or JSON.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bases::suitable_amplitudes;
use crate::coin::{wigner_coin, wigner_coin_euler, CoinOperator};
use crate::error::WalkError;
use crate::evolution::{evolve, position_distribution, BasisTag, CoinStateVector};
use crate::halfint::HalfInt;
use crate::limitlaw::{limit_density, LimitDensityModel};
use crate::numfmt::sig17;
use crate::states::named_state;
use crate::trapping::{trapping_probability, TrappingModel};
use crate::verify::{self, ExclusionOptions, VerificationReport};

/// Environment variable bounding the number of worker threads.
pub const WORKERS_ENV: &str = "WIGNER_WALK_WORKERS";
/// Distance kept from every divergence of the density grid.
pub const GRID_EPSILON: f64 = 1e-6;
/// Renormalizations larger than this are reported on stderr.
pub const RENORM_WARN: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "wigner-walk", version, about = "Quantum walks with Wigner rotation coins")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact position distribution after `t` steps.
    Simulate(SimulateArgs),
    /// Weak-limit density `ν(v)` on a grid.
    Density(DensityArgs),
    /// Limiting trapping profile near the origin.
    Trapping(TrappingArgs),
    /// Verification suites with pass flags.
    Verify(VerifyArgs),
    /// Summary rows over a grid of `ρ` for several states.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Standard,
    Suitable,
    Lambda,
}

impl From<BasisArg> for BasisTag {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Standard => BasisTag::Standard,
            BasisArg::Suitable => BasisTag::Suitable,
            BasisArg::Lambda => BasisTag::Lambda,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Named coin state, e.g. chi0, chi1+, lambda-, inner_free:0,1.
    #[arg(long, conflicts_with = "amps")]
    pub state: Option<String>,
    /// Comma separated amplitudes such as `0.6,0.8i,0` or `0.5+0.5i,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub amps: Option<String>,
    /// Basis of `--amps`.
    #[arg(long, value_enum, default_value_t = BasisArg::Standard)]
    pub basis: BasisArg,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Spin, as "1/2", "1", "3/2", ...
    #[arg(long)]
    pub j: HalfInt,
    /// Reduced coin parameter `ρ = cos(β/2)`.
    #[arg(long, conflicts_with = "beta")]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 100)]
    pub t: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub j: HalfInt,
    #[arg(long)]
    pub rho: f64,
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of grid points across the support.
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TrappingArgs {
    #[arg(long)]
    pub j: HalfInt,
    #[arg(long)]
    pub rho: f64,
    #[command(flatten)]
    pub state: StateArgs,
    /// Rows cover the sites `2x` for `|x| <= window`.
    #[arg(long, default_value_t = 10)]
    pub window: i64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// One of figures, peaks, gauge, normalization, trapping, moments.
    #[arg(long)]
    pub suite: String,
    /// Half width of the exclusion windows around each divergence.
    #[arg(long, default_value_t = 5)]
    pub exclusion: i64,
    /// L¹ tolerance of the density overlay.
    #[arg(long, default_value_t = 0.08)]
    pub l1_tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub j: HalfInt,
    /// Inclusive range `start:stop:step`.
    #[arg(long)]
    pub rho: String,
    /// Comma separated named states.
    #[arg(long, default_value = "chi0")]
    pub states: String,
    #[arg(long, default_value_t = 100)]
    pub t: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure of a command together with its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Unsupported(_) => CliError::unsupported(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

/// Rendered output of a command plus non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub warnings: Vec<String>,
    /// Exit code once the body is written; 1 when a verification gate failed.
    pub code: i32,
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::usage(format!("bad amplitude {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |t: &str| -> Result<f64, CliError> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => Ok(Complex64::new(num(&body[..i])?, num(&body[i..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// Resolves `--state` or `--amps`, renormalizing amplitudes with a warning when needed.
pub fn resolve_state(
    j: HalfInt,
    args: &StateArgs,
    warnings: &mut Vec<String>,
) -> Result<(CoinStateVector, String), CliError> {
    match (&args.state, &args.amps) {
        (Some(name), None) => Ok((named_state(j, name)?, name.clone())),
        (None, Some(amps)) => {
            let values = amps.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            if values.len() != j.dim() {
                return Err(CliError::usage(format!(
                    "j = {j} needs {} amplitudes, got {}",
                    j.dim(),
                    values.len()
                )));
            }
            let (psi, norm_sqr) = CoinStateVector::normalized(j, args.basis.into(), values)?;
            if (norm_sqr.sqrt() - 1.0).abs() > RENORM_WARN {
                warnings.push(format!("amplitudes renormalized from norm {}", norm_sqr.sqrt()));
            }
            Ok((
                psi,
                format!(
                    "{}:{amps}",
                    args.basis.to_possible_value().expect("plain variant").get_name()
                ),
            ))
        }
        _ => Err(CliError::usage("give exactly one of --state or --amps")),
    }
}

fn header(lines: &[(&str, String)]) -> String {
    lines.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

fn render(format: Format, meta: &[(&str, String)], csv: String, json: serde_json::Value) -> String {
    match format {
        Format::Csv => header(meta) + &csv,
        Format::Json => {
            let mut doc = serde_json::Map::new();
            for (k, v) in meta {
                doc.insert((*k).into(), serde_json::Value::String(v.clone()));
            }
            doc.insert("data".into(), json);
            serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json renders") + "\n"
        }
    }
}

fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let (coin, meta_coin): (CoinOperator, Vec<(&str, String)>) = match (args.rho, args.beta) {
        (Some(rho), None) => (wigner_coin(args.j, rho)?, vec![("rho", sig17(rho))]),
        (None, Some(beta)) => (
            wigner_coin_euler(args.j, args.alpha, beta, args.gamma)?,
            vec![
                ("alpha", sig17(args.alpha)),
                ("beta", sig17(beta)),
                ("gamma", sig17(args.gamma)),
            ],
        ),
        _ => return Err(CliError::usage("give --rho or --beta")),
    };
    let (psi, label) = resolve_state(args.j, &args.state, &mut warnings)?;
    let mut profile = position_distribution(&evolve(&coin, &psi, args.t)?);
    profile.rho = args.rho;
    let mut meta = vec![("j", args.j.to_string())];
    meta.extend(meta_coin);
    meta.push(("t", args.t.to_string()));
    meta.push(("state", label));
    let body = render(args.output.format, &meta, profile.to_csv(), profile.to_json());
    Ok(Outcome {
        body,
        warnings,
        code: 0,
    })
}

/// Uniform grid over `[-2jρ, 2jρ]` with every point within `ε` of a divergence pulled inward.
pub fn density_grid(model: &LimitDensityModel, points: usize) -> Vec<f64> {
    let edge = 2.0 * model.j.value() * model.rho;
    let caustics = model.caustics();
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let v = -edge + 2.0 * edge * i as f64 / (n - 1) as f64;
            match caustics.iter().find(|&&c| (v.abs() - c).abs() < GRID_EPSILON) {
                Some(&c) => v.signum() * (c - GRID_EPSILON),
                None => v,
            }
        })
        .collect()
}

fn density(args: &DensityArgs) -> Result<Outcome, CliError> {
    if args.j.twice() > 4 {
        return Err(CliError::unsupported(format!(
            "closed-form density needs j <= 2, got j = {}",
            args.j
        )));
    }
    let mut warnings = Vec::new();
    let (psi, label) = resolve_state(args.j, &args.state, &mut warnings)?;
    let h = CoinStateVector {
        j: args.j,
        basis: BasisTag::Suitable,
        amps: suitable_amplitudes(&psi, args.rho)?,
    };
    let model = LimitDensityModel::new(args.rho, &h)?;
    let rows: Vec<(f64, f64)> = density_grid(&model, args.points)
        .into_iter()
        .map(|v| (v, limit_density(&model, v)))
        .collect();
    let mut csv = String::from("v,nu\n");
    for (v, nu) in &rows {
        let _ = writeln!(csv, "{},{}", sig17(*v), sig17(*nu));
    }
    let json = serde_json::json!(rows
        .iter()
        .map(|(v, nu)| serde_json::json!({"v": v, "nu": nu}))
        .collect::<Vec<_>>());
    let meta = [("j", args.j.to_string()), ("rho", sig17(args.rho)), ("state", label)];
    Ok(Outcome {
        body: render(args.output.format, &meta, csv, json),
        warnings,
        code: 0,
    })
}

fn trapping(args: &TrappingArgs) -> Result<Outcome, CliError> {
    if !args.j.is_integer() || args.j.twice() > 4 {
        return Err(CliError::unsupported(format!(
            "trapping profile needs j in {{1, 2}}, got j = {}",
            args.j
        )));
    }
    let mut warnings = Vec::new();
    let (psi, label) = resolve_state(args.j, &args.state, &mut warnings)?;
    let model = TrappingModel::new(args.rho, &psi)?;
    let rows: Vec<(i64, f64)> = (-args.window..=args.window)
        .map(|x| (2 * x, trapping_probability(&model, x)))
        .collect();
    let mut csv = String::from("x,p_inf\n");
    for (x, p) in &rows {
        let _ = writeln!(csv, "{x},{}", sig17(*p));
    }
    let json = serde_json::json!(rows
        .iter()
        .map(|(x, p)| serde_json::json!({"x": x, "p_inf": p}))
        .collect::<Vec<_>>());
    let meta = [
        ("j", args.j.to_string()),
        ("rho", sig17(args.rho)),
        ("state", label),
        ("q", sig17(model.q)),
    ];
    Ok(Outcome {
        body: render(args.output.format, &meta, csv, json),
        warnings,
        code: 0,
    })
}

/// Names accepted by `verify --suite`.
pub const SUITES: &[&str] = &["figures", "peaks", "gauge", "normalization", "trapping", "moments"];

/// Runs one named suite; reports come back in a fixed order.
pub fn run_suite(suite: &str, opts: &ExclusionOptions) -> Result<Vec<VerificationReport>, CliError> {
    let figures = verify::figure_suite();
    let jobs: Vec<SuiteJob> = match suite {
        "figures" => figures
            .into_iter()
            .map(|cfg| {
                let opts = *opts;
                Box::new(move || verify::figure_density_report(&cfg, &opts)) as SuiteJob
            })
            .collect(),
        "peaks" => figures
            .into_iter()
            .map(|cfg| Box::new(move || verify::peak_elimination_report(&cfg, 300, 10)) as SuiteJob)
            .collect(),
        "moments" => figures
            .into_iter()
            .map(|cfg| {
                Box::new(move || {
                    let psi = named_state(cfg.j, cfg.state)?;
                    let mut r = verify::moment_consistency(cfg.rho, &psi, &[100, 200, 400], 0.02)?;
                    r.scenario = format!("{} moments", cfg.id);
                    Ok(r)
                }) as SuiteJob
            })
            .collect(),
        "gauge" => gauge_jobs(),
        "normalization" => normalization_jobs(),
        "trapping" => trapping_jobs(),
        _ => {
            return Err(CliError::usage(format!(
                "unknown suite {suite:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let reports: Vec<_> = jobs.par_iter().map(|job| job()).collect();
    reports.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

type SuiteJob = Box<dyn Fn() -> crate::error::Result<VerificationReport> + Send + Sync>;

fn probe_state(j: HalfInt) -> CoinStateVector {
    let amps: Vec<Complex64> = (0..j.dim())
        .map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64 - 0.3))
        .collect();
    CoinStateVector::normalized(j, BasisTag::Standard, amps)
        .expect("nonzero amplitudes")
        .0
}

fn gauge_jobs() -> Vec<SuiteJob> {
    let beta = 2.0 * 0.5f64.acos();
    let mut jobs: Vec<SuiteJob> = Vec::new();
    for (twice, alpha) in [(2, 1.3), (3, std::f64::consts::FRAC_PI_3)] {
        let j = HalfInt::from_twice(twice);
        jobs.push(Box::new(move || {
            verify::check_alpha_gauge(j, beta, alpha, &probe_state(j), 200)
        }));
    }
    for (twice, gamma) in [(2, 0.7), (3, 1.1)] {
        let j = HalfInt::from_twice(twice);
        for t in [100, 200, 400] {
            jobs.push(Box::new(move || {
                verify::check_gamma_shift(j, beta, gamma, &probe_state(j), t)
            }));
        }
    }
    jobs
}

fn normalization_jobs() -> Vec<SuiteJob> {
    let mut jobs: Vec<SuiteJob> = Vec::new();
    for twice in 1..=4 {
        let j = HalfInt::from_twice(twice);
        for rho in [0.3, 0.5, 0.8] {
            jobs.push(Box::new(move || {
                verify::audit_normalization(j, rho, &probe_state(j), 1e-5)
            }));
        }
    }
    jobs
}

fn trapping_jobs() -> Vec<SuiteJob> {
    let mut jobs: Vec<SuiteJob> = Vec::new();
    for (twice, names) in [
        (2, &["chi0", "chi+", "lambda+", "lambda-"][..]),
        (4, &["chi0", "chi1+", "lambda+", "lambda-", "lambda0"][..]),
    ] {
        let j = HalfInt::from_twice(twice);
        for rho in [0.4, 0.5, 0.6] {
            for name in names {
                jobs.push(Box::new(move || verify::trapping_overlay(j, rho, name, 2_000, 5)));
            }
        }
    }
    jobs
}

fn verify_cmd(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let opts = ExclusionOptions {
        window: args.exclusion,
        exclude_origin: None,
        tolerance: args.l1_tolerance,
    };
    let reports = run_suite(&args.suite, &opts)?;
    let code = if reports.iter().all(VerificationReport::passed) {
        0
    } else {
        1
    };
    let meta = [("suite", args.suite.clone())];
    let json = serde_json::json!(reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>());
    Ok(Outcome {
        body: render(args.output.format, &meta, verify::reports_to_csv(&reports), json),
        warnings: Vec::new(),
        code,
    })
}

/// Values `start, start + step, ...` up to `stop` inclusive, from `start:stop:step`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad range {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::usage(format!("range {s:?} must be start:stop:step")));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(CliError::usage(format!("range {s:?} is empty")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

fn sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let rhos = parse_range(&args.rho)?;
    let names: Vec<&str> = args.states.split(',').map(str::trim).collect();
    for name in &names {
        named_state(args.j, name)?;
    }
    let cells: Vec<(&str, f64)> = names.iter().flat_map(|&n| rhos.iter().map(move |&r| (n, r))).collect();
    let rows = cells
        .par_iter()
        .map(|&(name, rho)| -> Result<[f64; 5], CliError> {
            let psi = named_state(args.j, name)?;
            let profile = position_distribution(&crate::evolution::evolve_rho(args.j, rho, &psi, args.t)?);
            let m1 = crate::evolution::empirical_moment(&profile, 1)?;
            let m2 = crate::evolution::empirical_moment(&profile, 2)?;
            let trapped = if args.j.is_integer() && args.j.twice() <= 4 {
                verify::trapped_mass(&psi, rho)?
            } else {
                f64::NAN
            };
            Ok([rho, profile.get(0), m1, m2, trapped])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("state,rho,p_origin,moment1,moment2,trapped_total\n");
    let mut json = Vec::new();
    for ((name, _), row) in cells.iter().zip(&rows) {
        let _ = writeln!(
            csv,
            "{name},{},{},{},{},{}",
            sig17(row[0]),
            sig17(row[1]),
            sig17(row[2]),
            sig17(row[3]),
            sig17(row[4])
        );
        json.push(serde_json::json!({
            "state": name, "rho": row[0], "p_origin": row[1], "moment1": row[2], "moment2": row[3],
            "trapped_total": if row[4].is_finite() { Some(row[4]) } else { None },
        }));
    }
    let meta = [("j", args.j.to_string()), ("t", args.t.to_string())];
    Ok(Outcome {
        body: render(args.output.format, &meta, csv, serde_json::Value::Array(json)),
        warnings: Vec::new(),
        code: 0,
    })
}

/// Runs a parsed command and renders its output without touching the filesystem.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Density(a) => density(a),
        Command::Trapping(a) => trapping(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn output_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Simulate(a) => a.output.out.as_ref(),
        Command::Density(a) => a.output.out.as_ref(),
        Command::Trapping(a) => a.output.out.as_ref(),
        Command::Verify(a) => a.output.out.as_ref(),
        Command::Sweep(a) => a.output.out.as_ref(),
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Full entry point: parses `args`, runs in a sized thread pool, writes output, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_workers() {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| execute(&cli)),
        Err(e) => Err(CliError {
            code: 1,
            message: e.to_string(),
        }),
    };
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let written = match output_path(&cli) {
                Some(path) => std::fs::write(path, &outcome.body).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.6").unwrap(), Complex64::new(0.6, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), Complex64::new(0.5, -0.25));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.1:0.9:0.1").unwrap().len(), 9);
        assert!(parse_range("0.5:0.1:0.1").is_err());
        assert!(parse_range("1:2").is_err());
    }
}
