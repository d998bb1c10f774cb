//! Command-line front end for the `qes2d` solvers.
//!
//! Every command resolves its parameters from flags, then from an optional
//! `key = value` config file (flags win), then from documented defaults.
//! The machine-readable data (JSON, or CSV for `wavefn`) goes to the file
//! named by `--output`; without `--output` the data goes to stdout and the
//! human-readable summary moves to stderr so pipelines stay clean.
//!
//! Exit codes: 0 success, 2 invalid usage or parameters, 3 numerical
//! failure (no convergence, accuracy target missed), 4 I/O failure.

mod commands;
mod config;
mod json;

use clap::{Args, Parser, Subcommand};
use qes2d::Sign;
use std::path::PathBuf;
use std::process::ExitCode;

/// An error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid usage, parameters, or configuration (exit 2).
    Usage(String),
    /// A solver failed to converge or to meet its accuracy target (exit 3).
    Numeric(String),
    /// Reading or writing a file failed (exit 4).
    Io(String),
}

impl From<qes2d::Error> for CliError {
    fn from(e: qes2d::Error) -> Self {
        use qes2d::Error::*;
        let text = e.to_string();
        match e {
            ParameterDomain(_) | BranchRule(_) | Domain(_) | Labeling(_) => CliError::Usage(text),
            Convergence(_) | Realness(_) | NotAnEigenvalue(_) | Accuracy(_)
            | NumericDegeneracy(_) => CliError::Numeric(text),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qes2d",
    version,
    about = "Spectra, eigenfunctions, and basis relations of two singular-oscillator systems in the plane",
    after_help = "Data goes to --output when given (summary on stdout), otherwise to stdout \
                  (summary on stderr). Config files are line-oriented `key = value` with `#` \
                  comments; flags override file values. The only environment variable honored \
                  is QES_THREADS (positive integer), which caps internal parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command; any of them may instead come from the
/// `--config` file.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Model family: `v1` (anisotropic, one singular axis, linear tilt)
    /// or `v2` (isotropic, singular on both axes)
    #[arg(long)]
    pub model: Option<String>,

    /// Oscillator frequency, must be positive [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,

    /// Tilt strength (v1) or x-axis barrier coupling (v2)
    /// [default: 0 for v1, 0.5 for v2]
    #[arg(long, allow_negative_numbers = true)]
    pub k1: Option<f64>,

    /// y-axis barrier coupling [default: 1.5]
    #[arg(long, allow_negative_numbers = true)]
    pub k2: Option<f64>,

    /// Sign branch of the x-axis barrier, `+` or `-` (v2 only) [default: +]
    #[arg(long, allow_hyphen_values = true)]
    pub sign1: Option<String>,

    /// Sign branch of the y-axis barrier, `+` or `-` [default: +]
    #[arg(long, allow_hyphen_values = true)]
    pub sign2: Option<String>,

    /// Level: the polynomial degree of the separated eigenfunctions
    /// [default: 2]
    #[arg(long)]
    pub n: Option<usize>,

    /// Squared interfocal distance of the elliptic coordinates (v2)
    /// [default: 2]
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<f64>,

    /// Line-oriented `key = value` config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output format: `json`, or `csv` for grid data [default per command]
    #[arg(long)]
    pub format: Option<String>,

    /// Write the machine-readable data to this file instead of stdout
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    /// Tolerance used for the pass/fail verdict of checking commands
    /// (gram, interbasis, niven, limits, oracle, asymptotics)
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

#[derive(Args)]
struct EigvecArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rank (nodes on the first separated axis); omit for all ranks
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args)]
struct WavefnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rank of the state to sample [default: 0]
    #[arg(long)]
    q: Option<usize>,
    /// First-coordinate grid start [default: cutoff-derived]
    #[arg(long, allow_negative_numbers = true)]
    u1_min: Option<f64>,
    /// First-coordinate grid end [default: cutoff-derived]
    #[arg(long, allow_negative_numbers = true)]
    u1_max: Option<f64>,
    /// First-coordinate sample count [default: 41]
    #[arg(long)]
    u1_count: Option<usize>,
    /// Second-coordinate grid start [default: cutoff-derived]
    #[arg(long, allow_negative_numbers = true)]
    u2_min: Option<f64>,
    /// Second-coordinate grid end [default: cutoff-derived]
    #[arg(long, allow_negative_numbers = true)]
    u2_max: Option<f64>,
    /// Second-coordinate sample count [default: 25]
    #[arg(long)]
    u2_count: Option<usize>,
}

#[derive(Args)]
struct GramArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Basis: cartesian | polar | parabolic | elliptic
    /// [default: parabolic for v1, elliptic for v2]
    #[arg(long)]
    basis: Option<String>,
    /// Quadrature route for the separable bases: factorized | grid
    /// [default: factorized]
    #[arg(long)]
    route: Option<String>,
    /// Gauss-Legendre order for the grid route [default: 48]
    #[arg(long)]
    order: Option<usize>,
    /// Panels per axis for the grid route [default: 8]
    #[arg(long)]
    panels: Option<usize>,
}

#[derive(Args)]
struct InterbasisArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation method: projection | closed-sum (closed-sum needs k1 = 0)
    /// [default: projection]
    #[arg(long)]
    method: Option<String>,
    /// Gauss-Legendre order for the projection quadrature [default: 48]
    #[arg(long)]
    order: Option<usize>,
    /// Panels per axis for the projection quadrature [default: 8]
    #[arg(long)]
    panels: Option<usize>,
}

#[derive(Args)]
struct NivenArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rank (zeros on the positive side); omit for all ranks
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// What to check against finite differences: plane | axis | sextic
    /// [default: plane]
    #[arg(long)]
    check: Option<String>,
    /// Separated axis for `--check axis`: xi | eta (v1), radial | angular
    /// (v2) [default: xi / radial]
    #[arg(long)]
    axis: Option<String>,
    /// Grid subdivisions [default: 72 for plane, 1600 for axis and sextic]
    #[arg(long)]
    grid: Option<usize>,
    /// Number of plane levels to compare for `--check plane` [default: 3]
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Off-spectrum energy probe [default: 0.123 for v1, 0.2 for v2]
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    /// Separation-constant probe [default: -1]
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Recurrence row at which the tail ratio is measured [default: 400]
    #[arg(long)]
    s: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy and full separation-constant multiplet of one level
    Spectrum(CommonArgs),
    /// Separation constants, including the concentric closed form at d2 = 0
    /// (defaults to model v2)
    Sepconst(CommonArgs),
    /// Recurrence coefficient vector and polynomial zeros of one state
    Eigvec(EigvecArgs),
    /// Sample a separable eigenfunction on a coordinate grid
    Wavefn(WavefnArgs),
    /// Gram matrix of a normalized basis at one level
    Gram(GramArgs),
    /// Change of basis between parabolic and Cartesian product states
    Interbasis(InterbasisArgs),
    /// Product-form zero configuration of one or all states of a level
    Niven(NivenArgs),
    /// Concentric and far-separated limits of the elliptic constants
    /// (defaults to model v2)
    Limits(CommonArgs),
    /// Independent finite-difference checks of energies and constants
    Oracle(OracleArgs),
    /// Large-order tail behavior of the untruncated recurrence series
    Asymptotics(AsymptoticsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModelKind {
    V1,
    V2,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Json,
    Csv,
}

/// Fully resolved run configuration: flags, then config file, then defaults.
pub struct Resolved {
    pub kind: ModelKind,
    pub omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub sign1: Sign,
    pub sign2: Sign,
    pub n: usize,
    pub d2: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl Resolved {
    pub fn model_v1(&self) -> Result<qes2d::ModelV1, CliError> {
        qes2d::ModelV1::new(self.omega, self.k1, self.k2, self.sign2).map_err(Into::into)
    }

    pub fn model_v2(&self) -> Result<qes2d::ModelV2, CliError> {
        qes2d::ModelV2::new(self.omega, self.k1, self.k2, self.sign1, self.sign2)
            .map_err(Into::into)
    }
}

fn parse_sign(value: Option<&str>, key: &str) -> Result<Sign, CliError> {
    match value.map(str::trim) {
        None => Ok(Sign::Plus),
        Some("+") | Some("plus") => Ok(Sign::Plus),
        Some("-") | Some("minus") => Ok(Sign::Minus),
        Some(other) => Err(CliError::Usage(format!(
            "invalid {key} `{other}`; valid values: +, -"
        ))),
    }
}

fn resolve_common(
    mut args: CommonArgs,
    default_kind: ModelKind,
    default_format: Format,
) -> Result<Resolved, CliError> {
    if let Some(path) = args.config.clone() {
        config::merge(&mut args, &path)?;
    }
    let kind = match args.model.as_deref().map(str::trim) {
        None => default_kind,
        Some("v1") => ModelKind::V1,
        Some("v2") => ModelKind::V2,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown model `{other}`; valid values: v1, v2"
            )))
        }
    };
    let format = match args.format.as_deref().map(str::trim) {
        None => default_format,
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown format `{other}`; valid values: json, csv"
            )))
        }
    };
    let k1_default = match kind {
        ModelKind::V1 => 0.0,
        ModelKind::V2 => 0.5,
    };
    Ok(Resolved {
        kind,
        omega: args.omega.unwrap_or(1.0),
        k1: args.k1.unwrap_or(k1_default),
        k2: args.k2.unwrap_or(1.5),
        sign1: parse_sign(args.sign1.as_deref(), "sign1")?,
        sign2: parse_sign(args.sign2.as_deref(), "sign2")?,
        n: args.n.unwrap_or(2),
        d2: args.d2.unwrap_or(2.0),
        format,
        output: args.output.take(),
        tol: args.tol,
    })
}

fn init_threads() -> Result<(), CliError> {
    match std::env::var("QES_THREADS") {
        Ok(raw) => {
            let threads = raw.trim().parse::<usize>().ok().filter(|&t| t >= 1).ok_or_else(
                || CliError::Usage(format!("QES_THREADS must be a positive integer, got `{raw}`")),
            )?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Usage(format!("QES_THREADS: {e}"))),
    }
}

fn emit(out: &commands::CmdOut, output: &Option<PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, out.data.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", out.summary);
            println!("data written to {}", path.display());
        }
        None => {
            eprintln!("{}", out.summary);
            print!("{}", out.data);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (out, output) = match cli.command {
        Command::Spectrum(args) => {
            let r = resolve_common(args, ModelKind::V1, Format::Json)?;
            (commands::spectrum(&r)?, r.output)
        }
        Command::Sepconst(args) => {
            let r = resolve_common(args, ModelKind::V2, Format::Json)?;
            (commands::sepconst(&r)?, r.output)
        }
        Command::Eigvec(args) => {
            let r = resolve_common(args.common, ModelKind::V1, Format::Json)?;
            (commands::eigvec(&r, args.q)?, r.output)
        }
        Command::Wavefn(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Csv)?;
            (commands::wavefn(&r, &args)?, r.output)
        }
        Command::Gram(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Json)?;
            (
                commands::gram(
                    &r,
                    args.basis.as_deref(),
                    args.route.as_deref(),
                    args.order.unwrap_or(48),
                    args.panels.unwrap_or(8),
                )?,
                r.output,
            )
        }
        Command::Interbasis(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Json)?;
            (
                commands::interbasis(
                    &r,
                    args.method.as_deref(),
                    args.order.unwrap_or(48),
                    args.panels.unwrap_or(8),
                )?,
                r.output,
            )
        }
        Command::Niven(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Json)?;
            (commands::niven(&r, args.q)?, r.output)
        }
        Command::Limits(args) => {
            let r = resolve_common(args, ModelKind::V2, Format::Json)?;
            (commands::limits(&r)?, r.output)
        }
        Command::Oracle(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Json)?;
            (
                commands::oracle(
                    &r,
                    args.check.as_deref(),
                    args.axis.as_deref(),
                    args.grid,
                    args.levels.unwrap_or(3),
                )?,
                r.output,
            )
        }
        Command::Asymptotics(args) => {
            let r = resolve_common(args.common.clone(), ModelKind::V1, Format::Json)?;
            (
                commands::asymptotics(&r, args.energy, args.lambda, args.s.unwrap_or(400))?,
                r.output,
            )
        }
    };
    emit(&out, &output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, message) = match &err {
                CliError::Usage(m) => (2u8, m),
                CliError::Numeric(m) => (3u8, m),
                CliError::Io(m) => (4u8, m),
            };
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
