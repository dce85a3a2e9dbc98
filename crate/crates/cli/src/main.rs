//! `condcode` — reproducible experiments on conditional vs. residual coding.
//!
//! One subcommand per experiment: entropy sweeps over the switch-error
//! probability (`sweep-p`) and the prediction noise level (`sweep-sigma`),
//! randomized re-verification of the entropy identities (`verify`), a Monte
//! Carlo cross-check of the exact engine (`mc`), and empirical mutual
//! information between a prediction image and its residual (`empirical-mi`).
//!
//! Machine-readable output (CSV, reports) goes to the chosen destination and
//! nothing else is printed there; human progress logs go to stderr. Every
//! command is deterministic given its flags and seeds.
//!
//! Exit codes: 0 success, 1 I/O or image-parse failure, 2 usage error,
//! 3 identity-verification failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use condcode_core::{
    empirical_mi_binned, load_pgm, mixture_channel, monte_carlo_check, run_identity_suite_with_grid,
    sweep_p, sweep_sigma, uniform_quantizer, write_csv, write_csv_path, BoundaryMode, CurveTable,
    Error, GaussianSpec, Pmf, QuantizerSpec, Result, SweepConfig, SweepVariable, SwitchSpec,
    DEFAULT_CLOSED_FORM_GRID, IDENTITY_TOLERANCE,
};

#[derive(Parser)]
#[command(
    name = "condcode",
    version,
    about = "Exact entropy analysis of conditional vs. residual interframe coding",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the wrong-reference probability p of the switch predictor and
    /// tabulate residual and conditional coding rates as CSV
    SweepP(SweepPArgs),
    /// Sweep the prediction noise level sigma_p at fixed p values (long CSV)
    SweepSigma(SweepSigmaArgs),
    /// Re-verify the entropy identities on randomized models and check the
    /// closed-form curve; exits 3 if any residual exceeds tolerance
    Verify(VerifyArgs),
    /// Monte Carlo cross-check: plug-in entropy estimates vs. the exact engine
    Mc(McArgs),
    /// Empirical mutual information between a prediction image and the signed
    /// residual it leaves against the original (binary 8-bit PGM inputs)
    EmpiricalMi(EmpiricalMiArgs),
}

#[derive(Args)]
struct SweepPArgs {
    /// Alphabet maximum N (255 = 8-bit pixels)
    #[arg(long, default_value_t = 255)]
    n: u32,
    /// Wrong-reference value w of the switch predictor
    #[arg(long, default_value_t = 0)]
    w: u32,
    /// First p value of the grid
    #[arg(long = "p-min", default_value_t = 0.0)]
    p_min: f64,
    /// Last p value of the grid
    #[arg(long = "p-max", default_value_t = 1.0)]
    p_max: f64,
    /// Grid step
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Bottleneck widths in bits (repeat the flag or comma-separate)
    #[arg(long = "bottleneck", value_delimiter = ',', default_values_t = [7, 6])]
    bottleneck: Vec<u8>,
    /// Output CSV path; "-" writes to standard output
    /// [default: $CONDCODE_OUTPUT_DIR/sweep_p.csv]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepSigmaArgs {
    /// Alphabet maximum N (255 = 8-bit pixels)
    #[arg(long, default_value_t = 255)]
    n: u32,
    /// Wrong-reference value w of the switch predictor
    #[arg(long, default_value_t = 0)]
    w: u32,
    /// Fixed p values, one curve family per value (comma-separate or repeat)
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.4])]
    p: Vec<f64>,
    /// First sigma_p value of the grid
    #[arg(long = "sigma-min", default_value_t = 0.0)]
    sigma_min: f64,
    /// Last sigma_p value of the grid
    #[arg(long = "sigma-max", default_value_t = 20.0)]
    sigma_max: f64,
    /// Grid step
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// Bottleneck widths in bits (repeat the flag or comma-separate)
    #[arg(long = "bottleneck", value_delimiter = ',', default_values_t = [7])]
    bottleneck: Vec<u8>,
    /// Boundary handling of the discretized noise: clip or renormalize
    #[arg(long, default_value = "clip", value_parser = BoundaryMode::from_str)]
    boundary: BoundaryMode,
    /// Output CSV path; "-" writes to standard output
    /// [default: $CONDCODE_OUTPUT_DIR/sweep_sigma.csv]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random (prior, channel, map) triples to check
    #[arg(long, default_value_t = 1000)]
    trials: u32,
    /// RNG seed for the randomized trials
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of p-grid points for the closed-form comparison
    #[arg(long = "closed-form-grid", default_value_t = DEFAULT_CLOSED_FORM_GRID)]
    closed_form_grid: usize,
}

#[derive(Args)]
struct McArgs {
    /// Alphabet maximum N (255 = 8-bit pixels)
    #[arg(long, default_value_t = 255)]
    n: u32,
    /// Wrong-reference probability of the switch predictor
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Wrong-reference value w
    #[arg(long, default_value_t = 0)]
    w: u32,
    /// Noise standard deviation sigma_p on the correct branch
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Boundary handling of the discretized noise: clip or renormalize
    #[arg(long, default_value = "clip", value_parser = BoundaryMode::from_str)]
    boundary: BoundaryMode,
    /// Also estimate H(x | f(x_p)) through a uniform quantizer of this width
    #[arg(long)]
    bottleneck: Option<u8>,
    /// Number of samples to draw
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// RNG seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct EmpiricalMiArgs {
    /// Original frame (binary 8-bit PGM)
    original: PathBuf,
    /// Prediction frame (binary 8-bit PGM, same dimensions)
    prediction: PathBuf,
    /// Histogram bin width in pixel values
    #[arg(long = "bin-width", default_value_t = 1)]
    bin_width: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SweepP(args) => cmd_sweep_p(args),
        Command::SweepSigma(args) => cmd_sweep_sigma(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Mc(args) => cmd_mc(args),
        Command::EmpiricalMi(args) => cmd_empirical_mi(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Stable exit-code contract: 1 = I/O or parse failure, 2 = usage error,
/// 3 = verification failure. (Flag-syntax errors exit 2 via the parser.)
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::PgmFormat { .. } => 1,
        Error::InvalidArgument(_) | Error::AlphabetMismatch(_) => 2,
        Error::IdentityViolation { .. } => 3,
    }
}

/// Where a table should be written.
enum OutputDest {
    Stdout,
    File(PathBuf),
}

/// `--output -` means stdout; an explicit path wins; otherwise the default
/// file name goes into `$CONDCODE_OUTPUT_DIR` (or the working directory).
fn resolve_output(given: Option<PathBuf>, default_name: &str) -> OutputDest {
    match given {
        Some(path) if path.as_os_str() == "-" => OutputDest::Stdout,
        Some(path) => OutputDest::File(path),
        None => {
            let dir = std::env::var_os("CONDCODE_OUTPUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            OutputDest::File(dir.join(default_name))
        }
    }
}

fn emit_table(table: &CurveTable, dest: &OutputDest) -> Result<()> {
    match dest {
        OutputDest::Stdout => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let annotate = |source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            };
            write_csv(table, &mut lock).map_err(annotate)?;
            lock.flush().map_err(annotate)?;
        }
        OutputDest::File(path) => {
            write_csv_path(table, path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
    }
    Ok(())
}

/// Builds min, min+step, … as an inclusive grid. When (max − min) is an
/// integer number of steps up to rounding, the last point is snapped exactly
/// onto max; otherwise the grid stops at the last value below max.
fn build_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() || !step.is_finite() {
        return Err(Error::invalid("grid bounds and step must be finite"));
    }
    if step <= 0.0 {
        return Err(Error::invalid(format!("grid step must be positive, got {step}")));
    }
    if max < min {
        return Err(Error::invalid(format!(
            "grid maximum {max} is below the minimum {min}"
        )));
    }
    let span = max - min;
    let rounded = (span / step).round();
    let snap = (rounded * step - span).abs() <= step * 1e-6;
    let points = if snap { rounded } else { (span / step).floor() } as usize;
    let mut grid: Vec<f64> = (0..=points).map(|k| min + k as f64 * step).collect();
    if snap {
        *grid.last_mut().expect("grid is non-empty") = max;
    }
    Ok(grid)
}

fn cmd_sweep_p(args: SweepPArgs) -> Result<()> {
    let config = SweepConfig {
        n_max: args.n,
        variable: SweepVariable::ErrorProbability,
        grid: build_grid(args.p_min, args.p_max, args.step)?,
        fixed_p: Vec::new(),
        w: args.w,
        bottlenecks: args.bottleneck,
        boundary_mode: BoundaryMode::Clip,
    };
    let table = sweep_p(&config)?;
    emit_table(&table, &resolve_output(args.output, "sweep_p.csv"))
}

fn cmd_sweep_sigma(args: SweepSigmaArgs) -> Result<()> {
    let config = SweepConfig {
        n_max: args.n,
        variable: SweepVariable::NoiseSigma,
        grid: build_grid(args.sigma_min, args.sigma_max, args.step)?,
        fixed_p: args.p,
        w: args.w,
        bottlenecks: args.bottleneck,
        boundary_mode: args.boundary,
    };
    let table = sweep_sigma(&config)?;
    emit_table(&table, &resolve_output(args.output, "sweep_sigma.csv"))
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let report = run_identity_suite_with_grid(args.trials, args.seed, args.closed_form_grid)?;
    let (trial, rows, cols, outs) = report.worst_case;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "randomized identity suite: trials={} seed={}",
        report.trials, report.seed
    );
    let _ = writeln!(
        text,
        "  residual-coding identity max error:        {:.3e}",
        report.max_residual_identity_error
    );
    let _ = writeln!(
        text,
        "  bottleneck subtraction identity max error: {:.3e}",
        report.max_cmi_identity_error
    );
    let _ = writeln!(
        text,
        "  bottleneck combined identity max error:    {:.3e}",
        report.max_combined_identity_error
    );
    let _ = writeln!(
        text,
        "  worst trial: #{trial} ({rows}x{cols} joint, {outs} map outputs)"
    );
    let _ = writeln!(
        text,
        "closed-form curve: N=255, {} grid points, w in {{0, 100, 255}}",
        report.closed_form_points
    );
    let _ = writeln!(
        text,
        "  enumeration vs closed form max error: {:.3e}",
        report.closed_form_max_error
    );
    let _ = writeln!(
        text,
        "  spread across w values:               {:.3e}",
        report.w_spread_max
    );
    let _ = writeln!(text, "linear-chord deviation of the closed-form curve:");
    for &(n, dev) in &report.linearity {
        let _ = writeln!(text, "  N={n}: {dev:.12}");
    }
    let _ = writeln!(
        text,
        "  strictly decreasing with N: {}",
        if report.linearity_strictly_decreasing { "yes" } else { "no" }
    );
    let _ = writeln!(
        text,
        "verdict: {}",
        if report.all_within_tolerance() {
            "all identities within tolerance"
        } else {
            "VIOLATION"
        }
    );
    print!("{text}");
    if report.all_within_tolerance() {
        Ok(())
    } else {
        Err(Error::IdentityViolation {
            context: format!(
                "randomized identity suite (trials={}, seed={}, worst trial #{trial}: \
                 {rows}x{cols} joint, {outs} map outputs)",
                report.trials, report.seed
            ),
            residual: report
                .max_residual_identity_error
                .max(report.max_cmi_identity_error)
                .max(report.max_combined_identity_error)
                .max(report.closed_form_max_error),
            tolerance: IDENTITY_TOLERANCE,
        })
    }
}

fn cmd_mc(args: McArgs) -> Result<()> {
    let prior = Pmf::uniform(args.n as usize + 1, 0)?;
    let channel = mixture_channel(
        &SwitchSpec {
            n_max: args.n,
            p: args.p,
            w: args.w,
        },
        &GaussianSpec {
            n_max: args.n,
            sigma_p: args.sigma,
            boundary_mode: args.boundary,
        },
    )?;
    let quantizer = args
        .bottleneck
        .map(|bits| uniform_quantizer(&QuantizerSpec { output_bits: bits }))
        .transpose()?;
    let est = monte_carlo_check(&prior, &channel, quantizer.as_ref(), args.samples, args.seed)?;
    println!("samples={} seed={}", est.samples, est.seed);
    println!(
        "h_residual={:.9} deviation_from_exact={:.9}",
        est.h_residual, est.dev_h_residual
    );
    println!(
        "h_cond={:.9} deviation_from_exact={:.9}",
        est.h_cond, est.dev_h_cond
    );
    if let (Some(h), Some(dev)) = (est.h_cond_tilde, est.dev_h_cond_tilde) {
        println!("h_cond_bottleneck={h:.9} deviation_from_exact={dev:.9}");
    }
    Ok(())
}

fn cmd_empirical_mi(args: EmpiricalMiArgs) -> Result<()> {
    let original = load_pgm(&args.original)?;
    let prediction = load_pgm(&args.prediction)?;
    let est = empirical_mi_binned(&original, &prediction, args.bin_width)?;
    println!("samples={}", est.samples);
    println!("h_pred={:.9}", est.h_pred);
    println!("h_resid={:.9}", est.h_resid);
    println!("mi={:.9}", est.mi);
    Ok(())
}
