//! Command-line parsing and validation.

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use translator_lab::elliptic::{OperatorParams, SolveOptions};
use translator_lab::expr::{parse_expression, Expr};
use translator_lab::perron::EndCondition;
use translator_lab::{Domain, Error, Point};

#[derive(Parser, Debug)]
#[command(name = "translator-lab", version, about = "Numerical experiments with translating solitons")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Solve the Dirichlet problem on a convex domain.
    Solve(SolveArgs),
    /// Rotational bowl profile.
    Bowl(BowlArgs),
    /// Winglike rotational profile.
    Wing(WingArgs),
    /// Rotational profile of the weighted equation.
    MuRadial(MuRadialArgs),
    /// Sample a tilted grim reaper and its residual.
    Grim(GrimArgs),
    /// Perron iteration on a strip or an unbounded convex domain.
    Perron(PerronArgs),
    /// Run the certification checks on a solve.
    Verify(VerifyArgs),
    /// Check the flux identity on a solve.
    Flux(FluxArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Domain file or inline description, e.g. `disk:1.0` or `kind=square side=2`.
    #[arg(long)]
    domain: String,
    /// Boundary data as an expression in x and y.
    #[arg(long, default_value = "0", conflicts_with = "phi_file")]
    phi: String,
    /// Boundary data as CSV `x,y,u`, sampled by nearest neighbour.
    #[arg(long)]
    phi_file: Option<PathBuf>,
    /// Grid resolution along the longer bounding-box side.
    #[arg(long, default_value_t = 64, allow_negative_numbers = true)]
    n: i64,
    /// Continuation steps.
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    steps: i64,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Translator,
    Weighted,
    Serrin,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Continuation parameter in [0, 1].
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t: f64,
    /// Weighted-curvature constant.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Operator family; weighted when `--mu` is positive, translator otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Curvature coefficient of the power family.
    #[arg(long = "H", default_value_t = 0.5, allow_negative_numbers = true)]
    h_coef: f64,
    /// Exponent of the power family.
    #[arg(long = "n-exp", default_value_t = 2.0, allow_negative_numbers = true)]
    n_exp: f64,
    /// Field CSV; a JSON report is written alongside. Prints the CSV when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BowlArgs {
    #[arg(long = "R", default_value_t = 1.0, allow_negative_numbers = true)]
    r_end: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WingArgs {
    /// Neck radius.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    r0: f64,
    #[arg(long = "R", default_value_t = 3.0, allow_negative_numbers = true)]
    r_end: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MuRadialArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long = "R", default_value_t = 1.0, allow_negative_numbers = true)]
    r_end: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GrimArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Vertical offset.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    xmin: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    xmax: f64,
    /// Number of random sample points.
    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    sample: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PerronMode {
    Strip,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EndArg {
    LowerBarrier,
    Midpoint,
}

#[derive(Args, Debug)]
struct PerronArgs {
    #[arg(long, value_enum, default_value = "strip")]
    mode: PerronMode,
    /// Strip half-width.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    m: f64,
    /// Convex lateral data as an expression in x.
    #[arg(long, default_value = "0")]
    f: String,
    /// Truncation half-length.
    #[arg(long = "L", default_value_t = 3.0, allow_negative_numbers = true)]
    l: f64,
    /// Truncated domain for `--mode unbounded`.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, default_value_t = 96, allow_negative_numbers = true)]
    n: i64,
    /// Stop when a sweep changes no value by more than this.
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    tol: f64,
    #[arg(long, default_value_t = 2000, allow_negative_numbers = true)]
    max_sweeps: i64,
    /// Dirichlet data on the truncation ends.
    #[arg(long, value_enum, default_value = "lower-barrier")]
    end: EndArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Comparison,
    Height,
    Gradient,
    Barrier,
    Flux,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Weighted-curvature constant.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Barrier tube width.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    eps: f64,
    /// JSON report path; printed when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FluxArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A rejected flag with the form it expects.
#[derive(Clone, Debug, PartialEq)]
pub struct UsageError {
    pub flag: String,
    pub expected: String,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: expected {}", self.flag, self.expected)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub enum ArgsError {
    /// Help or version text; not an error for the caller.
    Display(String),
    Usage(UsageError),
}

impl From<UsageError> for ArgsError {
    fn from(e: UsageError) -> Self {
        ArgsError::Usage(e)
    }
}

fn usage(flag: &str, expected: impl Into<String>) -> UsageError {
    UsageError { flag: flag.into(), expected: expected.into() }
}

/// Boundary data source.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryData {
    Expr(Expr),
    /// Scattered samples, evaluated at the nearest sample.
    Samples(Vec<(Point, f64)>),
}

impl BoundaryData {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            BoundaryData::Expr(e) => e.eval_point(p),
            BoundaryData::Samples(s) => {
                s.iter().min_by(|a, b| a.0.dist(p).total_cmp(&b.0.dist(p))).map_or(f64::NAN, |s| s.1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub domain: Domain,
    pub phi: BoundaryData,
    pub n: usize,
    pub options: SolveOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Solve { problem: Problem, params: OperatorParams, out: Option<PathBuf> },
    Bowl { r_end: f64, step: f64, out: Option<PathBuf> },
    Wing { r0: f64, r_end: f64, step: f64, out: Option<PathBuf> },
    MuRadial { mu: f64, r_end: f64, step: f64, out: Option<PathBuf> },
    Grim { theta: f64, a: f64, xmin: f64, xmax: f64, sample: usize, seed: u64, out: Option<PathBuf> },
    Perron {
        mode: PerronMode,
        domain: Domain,
        f: Expr,
        n: usize,
        tol: f64,
        max_sweeps: usize,
        end: EndCondition,
        out: Option<PathBuf>,
    },
    Verify { suite: Suite, problem: Problem, mu: f64, eps: f64, out: Option<PathBuf> },
    Flux { problem: Problem, out: Option<PathBuf> },
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
}

fn positive(flag: &str, v: f64) -> Result<f64, UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(flag, format!("a positive number, got {v}")))
    }
}

fn resolution(flag: &str, n: i64) -> Result<usize, UsageError> {
    if n >= 8 {
        Ok(n as usize)
    } else {
        Err(usage(flag, format!("an integer >= 8, got {n}")))
    }
}

fn count(flag: &str, v: i64) -> Result<usize, UsageError> {
    if v >= 1 {
        Ok(v as usize)
    } else {
        Err(usage(flag, format!("a positive integer, got {v}")))
    }
}

fn expression(flag: &str, text: &str) -> Result<Expr, UsageError> {
    parse_expression(text).map_err(|e| match e {
        Error::Parse { offset, message } => usage(flag, format!("an expression in x and y ({message} at offset {offset})")),
        other => usage(flag, format!("an expression in x and y ({other})")),
    })
}

/// Reads a domain from a file when `spec` names one, otherwise parses it inline.
fn domain(flag: &str, spec: &str) -> Result<Domain, UsageError> {
    let path = Path::new(spec);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| usage(flag, format!("a readable domain file ({e})")))?
    } else {
        spec.to_string()
    };
    Domain::parse(&text).map_err(|e| usage(flag, format!("a domain file or description such as `disk:1.0` ({e})")))
}

fn samples(flag: &str, path: &Path) -> Result<Vec<(Point, f64)>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(flag, format!("a readable CSV file ({e})")))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cols: Vec<f64> = match line.split(',').map(|c| c.trim().parse::<f64>()).collect() {
            Ok(c) => c,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(usage(flag, format!("CSV rows `x,y,u`, line {} is `{line}`", i + 1))),
        };
        if cols.len() != 3 {
            return Err(usage(flag, format!("CSV rows `x,y,u`, line {} has {} columns", i + 1, cols.len())));
        }
        out.push((Point::new(cols[0], cols[1]), cols[2]));
    }
    if out.is_empty() {
        return Err(usage(flag, "at least one data row"));
    }
    Ok(out)
}

fn problem(a: ProblemArgs) -> Result<Problem, UsageError> {
    let domain = domain("--domain", &a.domain)?;
    if !domain.is_bounded() {
        return Err(usage("--domain", "a bounded domain"));
    }
    let phi = match &a.phi_file {
        Some(p) => BoundaryData::Samples(samples("--phi-file", p)?),
        None => BoundaryData::Expr(expression("--phi", &a.phi)?),
    };
    let options = SolveOptions { tol: positive("--tol", a.tol)?, steps: count("--steps", a.steps)?, ..SolveOptions::default() };
    Ok(Problem { domain, phi, n: resolution("--n", a.n)?, options })
}

fn non_negative(flag: &str, v: f64) -> Result<f64, UsageError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(flag, format!("a non-negative number, got {v}")))
    }
}

fn radial_step(r_end: f64, step: f64) -> Result<f64, UsageError> {
    let step = positive("--step", step)?;
    if step > r_end / 100.0 {
        return Err(usage("--step", format!("at most R/100 = {}, got {step}", r_end / 100.0)));
    }
    Ok(step)
}

fn validate(cmd: Cmd) -> Result<Command, UsageError> {
    Ok(match cmd {
        Cmd::Solve(a) => {
            let t = a.t;
            if !(0.0..=1.0).contains(&t) {
                return Err(usage("--t", format!("a number in [0, 1], got {t}")));
            }
            let mu = non_negative("--mu", a.mu)?;
            let mode = a.mode.unwrap_or(if mu > 0.0 { ModeArg::Weighted } else { ModeArg::Translator });
            let params = match mode {
                ModeArg::Translator if mu > 0.0 => return Err(usage("--mu", "0 in translator mode")),
                ModeArg::Translator => OperatorParams::translator(t),
                ModeArg::Weighted => OperatorParams::weighted(t, mu),
                ModeArg::Serrin => {
                    if mu > 0.0 {
                        return Err(usage("--mu", "0 in serrin mode"));
                    }
                    if !a.h_coef.is_finite() {
                        return Err(usage("--H", "a finite number"));
                    }
                    OperatorParams::serrin(t, a.h_coef, positive("--n-exp", a.n_exp)?)
                }
            };
            Command::Solve { problem: problem(a.problem)?, params, out: a.out }
        }
        Cmd::Bowl(a) => {
            let r_end = positive("--R", a.r_end)?;
            Command::Bowl { r_end, step: radial_step(r_end, a.step)?, out: a.out }
        }
        Cmd::Wing(a) => {
            let r0 = positive("--r0", a.r0)?;
            let r_end = positive("--R", a.r_end)?;
            if r_end <= r0 {
                return Err(usage("--R", format!("a radius above r0 = {r0}, got {r_end}")));
            }
            Command::Wing { r0, r_end, step: radial_step(r_end - r0, a.step)?, out: a.out }
        }
        Cmd::MuRadial(a) => {
            let mu = non_negative("--mu", a.mu)?;
            let r_end = positive("--R", a.r_end)?;
            if mu > 0.0 && mu <= 0.5 && r_end >= 1.0 / mu {
                return Err(usage("--R", format!("a radius below 1/mu = {}, got {r_end}", 1.0 / mu)));
            }
            Command::MuRadial { mu, r_end, step: radial_step(r_end, a.step)?, out: a.out }
        }
        Cmd::Grim(a) => {
            if !(a.theta.abs() < FRAC_PI_2) {
                return Err(usage("--theta", format!("a tilt in (-pi/2, pi/2), got {}", a.theta)));
            }
            if !a.a.is_finite() {
                return Err(usage("--a", "a finite number"));
            }
            if !(a.xmin.is_finite() && a.xmax.is_finite() && a.xmin < a.xmax) {
                return Err(usage("--xmax", format!("a number above --xmin = {}, got {}", a.xmin, a.xmax)));
            }
            Command::Grim {
                theta: a.theta,
                a: a.a,
                xmin: a.xmin,
                xmax: a.xmax,
                sample: count("--sample", a.sample)?,
                seed: a.seed,
                out: a.out,
            }
        }
        Cmd::Perron(a) => {
            let domain = match a.mode {
                PerronMode::Strip => {
                    let m = positive("--m", a.m)?;
                    if m >= FRAC_PI_2 {
                        return Err(usage("--m", format!("a half-width below pi/2, got {m}")));
                    }
                    Domain::strip(m, Some(positive("--L", a.l)?)).map_err(|e| usage("--L", e.to_string()))?
                }
                PerronMode::Unbounded => {
                    let spec = a.domain.as_deref().ok_or_else(|| usage("--domain", "a truncated domain in unbounded mode"))?;
                    let d = domain("--domain", spec)?;
                    if !matches!(d, Domain::Truncated { .. } | Domain::Strip { truncation: Some(_), .. }) {
                        return Err(usage("--domain", "a truncated strip, half-strip or round end"));
                    }
                    d
                }
            };
            Command::Perron {
                mode: a.mode,
                domain,
                f: expression("--f", &a.f)?,
                n: resolution("--n", a.n)?,
                tol: positive("--tol", a.tol)?,
                max_sweeps: count("--max-sweeps", a.max_sweeps)?,
                end: match a.end {
                    EndArg::LowerBarrier => EndCondition::LowerBarrier,
                    EndArg::Midpoint => EndCondition::Midpoint,
                },
                out: a.out,
            }
        }
        Cmd::Verify(a) => Command::Verify {
            suite: a.suite,
            mu: non_negative("--mu", a.mu)?,
            eps: positive("--eps", a.eps)?,
            problem: problem(a.problem)?,
            out: a.out,
        },
        Cmd::Flux(a) => Command::Flux { problem: problem(a.problem)?, out: a.out },
    })
}

fn from_clap(e: clap::Error) -> ArgsError {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            ArgsError::Display(e.render().to_string())
        }
        _ => {
            let flag = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => s.split_whitespace().next().unwrap_or(s).to_string(),
                Some(ContextValue::Strings(v)) if !v.is_empty() => {
                    v[0].split_whitespace().next().unwrap_or(&v[0]).to_string()
                }
                _ => match e.get(ContextKind::InvalidSubcommand) {
                    Some(ContextValue::String(s)) => s.clone(),
                    _ => "arguments".to_string(),
                },
            };
            let expected = match e.kind() {
                ErrorKind::UnknownArgument => "a known flag (see --help)".to_string(),
                ErrorKind::InvalidSubcommand => "a known subcommand (see --help)".to_string(),
                ErrorKind::MissingRequiredArgument => "a value; the flag is required".to_string(),
                _ => {
                    let text = e.render().to_string();
                    text.lines().next().unwrap_or("").trim_start_matches("error: ").to_string()
                }
            };
            ArgsError::Usage(usage(&flag, expected))
        }
    }
}

/// Parses and validates a full argument vector, program name first.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(from_clap)?;
    Ok(RunConfig { command: validate(cli.command)? })
}
