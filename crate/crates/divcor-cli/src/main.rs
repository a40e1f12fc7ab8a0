//! divcor: command line access to the exact and empirical machinery in
//! divcor-core.
//!
//! Every subcommand computes its full result first and renders it only on
//! success, so a failing run never emits partial output. Exit status 0 means
//! the computation ran (grid mismatches are data, not errors), 2 is a usage
//! error, 3 is a capacity error (memory budget or prime cutoff), and 1 is
//! any other failure.

mod report;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divcor_core::arith::{factorize, is_prime, ramanujan_sum, tau_k_at};
use divcor_core::correl::{carmichael_sum, correlation_report, rf_truncated};
use divcor_core::rfcoeff::rf_coefficient;
use divcor_core::singular::{
    b_via_euler, b_via_qsum, c_constant, f_of_h, local_factor_value, predict_main_term,
    verify_theorem1, Form,
};
use divcor_core::{MemoryBudget, SignMode};
use serde::Serialize;

use report::{
    CarmichaelReport, ConstantReport, CorrelateReport, LocalFactorReport, LocalFactorRow,
    MismatchRow, PredictReport, RationalDto, ReconstructReport, ReconstructRow, Report,
    RfCoeffReport, RfCoeffRow, SingularReport, TheoremReport,
};

/// Memory budget override, in bytes. Defaults to 2 GiB.
const BUDGET_ENV: &str = "DIVCOR_MEMORY_BUDGET";

#[derive(Debug)]
enum CliError {
    Core(divcor_core::Error),
    Io(std::io::Error),
    Render(serde_json::Error),
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_capacity() => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Render(e) => write!(f, "{e}"),
            CliError::Config(msg) => f.write_str(msg),
        }
    }
}

impl From<divcor_core::Error> for CliError {
    fn from(e: divcor_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Render(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignModeArg {
    /// Alternating coefficient sign (-1)^(k-1); makes both local factor
    /// forms agree.
    Corrected,
    /// The historical coefficient sign (-1)^k, kept for comparison runs.
    LuchtOriginal,
}

impl SignModeArg {
    fn mode(self) -> SignMode {
        match self {
            SignModeArg::Corrected => SignMode::Corrected,
            SignModeArg::LuchtOriginal => SignMode::LuchtOriginal,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SignModeArg::Corrected => "corrected",
            SignModeArg::LuchtOriginal => "lucht-original",
        }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 0.1 {
        Ok(v)
    } else {
        Err(format!("tolerance {v} is outside (0, 0.1]"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "divcor",
    version,
    about = "Shifted divisor correlations: singular series, Ramanujan-Fourier \
             coefficients, and brute-force checks"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "PATH", global = true)]
    output: Option<PathBuf>,

    /// Sign convention for the RF coefficients.
    #[arg(long, value_enum, default_value_t = SignModeArg::Corrected, global = true)]
    sign_mode: SignModeArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Singular series constant C with a proven tail bound.
    Constant(ConstantArgs),
    /// Exact local factor f(h), in both the RF and the Ng-Thom form.
    LocalFactor(LocalFactorArgs),
    /// Full singular series B(h), via the Euler product and via the q-sum.
    Singular(SingularArgs),
    /// Predicted main term of the correlation sum at X.
    Predict(PredictArgs),
    /// Empirical correlation sums compared against the prediction.
    Correlate(CorrelateArgs),
    /// Exact correlation sum of two Ramanujan sums.
    Carmichael(CarmichaelArgs),
    /// Compare the two local factor forms over a (k, l, p, alpha) grid.
    VerifyTheorem1(VerifyArgs),
    /// Table of RF expansion coefficients for q up to Q.
    RfCoeff(RfCoeffArgs),
    /// Diagnostic truncated RF reconstruction of tau_k(n).
    RfReconstruct(ReconstructArgs),
}

#[derive(Debug, Args)]
struct ConstantArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Tail-bound target, in (0, 0.1].
    #[arg(long, default_value_t = 1e-5, value_parser = parse_tol)]
    tol: f64,
}

#[derive(Debug, Args)]
struct LocalFactorArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Shift, at least 1.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    h: u64,
}

#[derive(Debug, Args)]
struct SingularArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Shift, at least 1.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    h: u64,
    /// Tail-bound target for the Euler product, in (0, 0.1].
    #[arg(long, default_value_t = 1e-5, value_parser = parse_tol)]
    tol: f64,
    /// Truncation point of the comparison q-sum.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    qmax: u64,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Shift, at least 1.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    h: u64,
    /// Evaluation point; must exceed e so the log powers stay positive.
    #[arg(long)]
    x: f64,
    /// Tail-bound target for the constant, in (0, 0.1].
    #[arg(long, default_value_t = 1e-5, value_parser = parse_tol)]
    tol: f64,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    /// Shift, at least 1.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    h: u64,
    /// Ascending comma-separated evaluation points.
    #[arg(
        long = "x-list",
        value_delimiter = ',',
        default_value = "100000,1000000,10000000"
    )]
    x_list: Vec<u64>,
    /// Tail-bound target for the constant, in (0, 0.1].
    #[arg(long, default_value_t = 1e-5, value_parser = parse_tol)]
    tol: f64,
}

#[derive(Debug, Args)]
struct CarmichaelArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    q1: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    q2: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    x: u64,
    /// Shift; 0 is allowed here and probes c_q(0) = phi(q).
    #[arg(long, default_value_t = 0)]
    h: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    kmax: u32,
    #[arg(long, default_value_t = 5)]
    lmax: u32,
    /// Number of primes in the grid, starting from 2.
    #[arg(long, default_value_t = 15)]
    primes: usize,
    #[arg(long, default_value_t = 4)]
    alpha_max: u32,
}

#[derive(Debug, Args)]
struct RfCoeffArgs {
    #[arg(long)]
    k: u32,
    /// Largest modulus in the table.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    qmax: u64,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Largest truncation point; partial sums are reported at powers of 10
    /// up to this value and at the value itself.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    qmax: u64,
}

fn memory_budget() -> Result<MemoryBudget, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(MemoryBudget::new)
            .map_err(|_| {
                CliError::Config(format!("{BUDGET_ENV} must be a byte count, got {raw:?}"))
            }),
        Err(std::env::VarError::NotPresent) => Ok(MemoryBudget::default()),
        Err(e) => Err(CliError::Config(format!("{BUDGET_ENV}: {e}"))),
    }
}

fn emit<R: Report + Serialize>(
    format: Format,
    path: Option<&Path>,
    report: &R,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Human => report.human(&mut buf)?,
        Format::Csv => report.csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, report)?;
            buf.push(b'\n');
        }
    }
    match path {
        Some(p) => std::fs::write(p, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn local_factor_report(
    a: &LocalFactorArgs,
    mode: SignMode,
    mode_name: &str,
) -> Result<LocalFactorReport, CliError> {
    let fact = factorize(a.h)?;
    let f_rf = f_of_h(a.k, a.l, &fact, Form::Rf, mode)?;
    let f_ngthom = f_of_h(a.k, a.l, &fact, Form::NgThom, mode)?;
    let mut primes = Vec::with_capacity(fact.factors().len());
    for &(p, alpha) in fact.factors() {
        let rf = local_factor_value(a.k, a.l, p, alpha, Form::Rf, mode)?;
        let ng = local_factor_value(a.k, a.l, p, alpha, Form::NgThom, mode)?;
        let f_at = |v: Option<divcor_core::BigRational>| {
            // alpha >= 1 for every prime of h, so the factor is present.
            RationalDto::new(&v.expect("local factor at a prime of h"))
        };
        primes.push(LocalFactorRow {
            p,
            alpha,
            c_rf: RationalDto::new(&rf.c_factor),
            c_ngthom: RationalDto::new(&ng.c_factor),
            f_rf: f_at(rf.f_factor),
            f_ngthom: f_at(ng.f_factor),
        });
    }
    Ok(LocalFactorReport {
        k: a.k,
        l: a.l,
        h: a.h,
        h_is_prime: is_prime(a.h),
        sign_mode: mode_name.to_owned(),
        forms_agree: f_rf == f_ngthom,
        f_rf: RationalDto::new(&f_rf),
        f_ngthom: RationalDto::new(&f_ngthom),
        primes,
    })
}

fn predict_report(
    a: &PredictArgs,
    mode: SignMode,
    mode_name: &str,
) -> Result<PredictReport, CliError> {
    let series = b_via_euler(a.k, a.l, a.h, a.tol, mode)?;
    let predicted = predict_main_term(a.k, a.l, a.h, a.x, a.tol, mode)?;
    Ok(PredictReport {
        k: a.k,
        l: a.l,
        h: a.h,
        h_is_prime: is_prime(a.h),
        x: a.x,
        tol: a.tol,
        sign_mode: mode_name.to_owned(),
        c_truncated: series.c_truncated,
        c_tail_bound: series.c_tail_bound,
        f_exact: RationalDto::new(&series.f_exact),
        b: series.b,
        predicted,
    })
}

fn carmichael_report(a: &CarmichaelArgs, budget: MemoryBudget) -> Result<CarmichaelReport, CliError> {
    let sum = carmichael_sum(a.q1, a.q2, a.x, a.h, budget)?;
    let average = sum as f64 / a.x as f64;
    let reference = if a.q1 == a.q2 {
        ramanujan_sum(a.q1, a.h)? as f64
    } else {
        0.0
    };
    Ok(CarmichaelReport {
        q1: a.q1,
        q2: a.q2,
        x: a.x,
        h: a.h,
        sum: sum.to_string(),
        average,
        reference,
        abs_gap: (average - reference).abs(),
    })
}

fn reconstruct_report(
    a: &ReconstructArgs,
    mode: SignMode,
    mode_name: &str,
) -> Result<ReconstructReport, CliError> {
    let mut checkpoints = Vec::new();
    let mut q = 1u64;
    while q <= a.qmax {
        checkpoints.push(q);
        match q.checked_mul(10) {
            Some(next) => q = next,
            None => break,
        }
    }
    if checkpoints.last() != Some(&a.qmax) {
        checkpoints.push(a.qmax);
    }
    let mut rows = Vec::with_capacity(checkpoints.len());
    for q_max in checkpoints {
        rows.push(ReconstructRow {
            q_max,
            partial_sum: rf_truncated(a.k, a.n, q_max, mode)?,
        });
    }
    Ok(ReconstructReport {
        k: a.k,
        n: a.n,
        q_max: a.qmax,
        sign_mode: mode_name.to_owned(),
        tau_exact: tau_k_at(a.k, &factorize(a.n)?),
        rows,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mode = cli.sign_mode.mode();
    let mode_name = cli.sign_mode.name();
    let format = cli.format;
    let path = cli.output.as_deref();
    match &cli.command {
        Command::Constant(a) => {
            let c = c_constant(a.k, a.l, a.tol, mode)?;
            emit(
                format,
                path,
                &ConstantReport::new(a.k, a.l, a.tol, mode_name, &c),
            )
        }
        Command::LocalFactor(a) => emit(format, path, &local_factor_report(a, mode, mode_name)?),
        Command::Singular(a) => {
            let series = b_via_euler(a.k, a.l, a.h, a.tol, mode)?;
            let b_qsum = b_via_qsum(a.k, a.l, a.h, a.qmax, mode)?;
            emit(
                format,
                path,
                &SingularReport::new(a.tol, a.qmax, mode_name, &series, b_qsum, is_prime(a.h)),
            )
        }
        Command::Predict(a) => emit(format, path, &predict_report(a, mode, mode_name)?),
        Command::Correlate(a) => {
            let budget = memory_budget()?;
            let run = correlation_report(a.k, a.l, a.h, &a.x_list, a.tol, mode, budget)?;
            emit(
                format,
                path,
                &CorrelateReport::new(a.k, a.l, a.h, a.tol, mode_name, &run, is_prime(a.h)),
            )
        }
        Command::Carmichael(a) => {
            let budget = memory_budget()?;
            emit(format, path, &carmichael_report(a, budget)?)
        }
        Command::VerifyTheorem1(a) => {
            let grid = verify_theorem1(a.kmax, a.lmax, a.primes, a.alpha_max, mode)?;
            emit(
                format,
                path,
                &TheoremReport {
                    k_max: a.kmax,
                    l_max: a.lmax,
                    prime_count: a.primes,
                    alpha_max: a.alpha_max,
                    sign_mode: mode_name.to_owned(),
                    checks: grid.checks,
                    mismatch_count: grid.mismatches.len(),
                    mismatches: grid.mismatches.iter().map(MismatchRow::new).collect(),
                },
            )
        }
        Command::RfCoeff(a) => {
            let mut rows = Vec::with_capacity(a.qmax as usize);
            for q in 1..=a.qmax {
                let c = rf_coefficient(a.k, q, mode)?;
                rows.push(RfCoeffRow {
                    q,
                    mult_part: RationalDto::new(&c.mult_part),
                    value: c.value,
                });
            }
            emit(
                format,
                path,
                &RfCoeffReport {
                    k: a.k,
                    q_max: a.qmax,
                    sign_mode: mode_name.to_owned(),
                    rows,
                },
            )
        }
        Command::RfReconstruct(a) => emit(format, path, &reconstruct_report(a, mode, mode_name)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
