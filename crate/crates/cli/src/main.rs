//! `hsr`: generate, verify and inspect uniform curves on `H^{s,r}`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 verification
//! failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use hsr_core::bundle::bundle_dim;
use hsr_core::export::{self, TrajectoryRecord};
use hsr_core::transform::{apply, block_rotation, boost, is_isometry};
use hsr_core::verify::{verify_grid, Fault, VerifyConfig, ODE_TOL};
use hsr_core::{
    closed_form_trajectory, integrate, point_at, CurveSpec, IntegratorConfig, Signature,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hsr",
    version,
    about = "Uniform curves on the pseudo-hyperbolic space H^{s,r}"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// `s,r` pair, e.g. `2,3`.
#[derive(Debug, Clone, Copy)]
struct SigArg(Signature);

impl FromStr for SigArg {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (s, r) = text
            .split_once(',')
            .ok_or_else(|| format!("expected s,r but got {text:?}"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Signature::new(parse(s)?, parse(r)?)
            .map(SigArg)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    ClosedForm,
    Integrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the uniform curve and write the trajectory
    Generate {
        /// Signature as s,r
        #[arg(long, default_value = "1,1")]
        sig: SigArg,
        /// Quadric constant R
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        psi_start: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        psi_end: f64,
        /// Number of intervals; the file holds steps + 1 rows
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Tolerance (relative to R²) for the residual summary on stderr
        #[arg(long, default_value_t = hsr_core::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Mode::ClosedForm)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite over every signature (s, r) with s, r <= max-sig
    Verify {
        #[arg(long, default_value_t = 4)]
        max_sig: usize,
        /// Comma-separated list of radii
        #[arg(long, value_delimiter = ',', default_value = "1")]
        radius: Vec<f64>,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        psi_start: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        psi_end: f64,
        /// Number of ψ intervals for the closed-form checks
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// RK4 steps for the integrated comparison
        #[arg(long, default_value_t = 2000)]
        ode_steps: usize,
        #[arg(long, default_value_t = hsr_core::DEFAULT_TOL)]
        tol: f64,
        /// Use R instead of R/√r as the curve amplitude
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write the report table to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the dimension 2^p·n of the order-p tangent bundle
    Dims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
    },
    /// Apply one generator to a curve point and report the form before and after
    Transform {
        #[arg(long, default_value = "1,1")]
        sig: SigArg,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        psi: f64,
        /// First axis (zero based over the [t | x] layout)
        #[arg(long, default_value_t = 0)]
        axis_a: usize,
        /// Second axis; a boost when the signs differ, a rotation otherwise
        #[arg(long, default_value_t = 1)]
        axis_b: usize,
        /// Rapidity for a boost, angle for a rotation
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        amount: f64,
    },
}

enum Failure {
    Config(String),
    Io(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) | Failure::Verify(m) => m,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn io_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Io(e.to_string())
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("tol must be positive, got {tol}")))
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_with(
    path: &Option<PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> hsr_core::Result<()>,
) -> Result<(), Failure> {
    let mut out = open_out(path)?;
    f(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    sig: Signature,
    radius: f64,
    psi_start: f64,
    psi_end: f64,
    steps: usize,
    tol: f64,
    mode: Mode,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    check_tol(tol)?;
    let spec = CurveSpec::new(sig, radius).map_err(config)?;
    let cfg = IntegratorConfig::new(psi_start, psi_end, steps, spec).map_err(config)?;
    let traj = match mode {
        Mode::ClosedForm => closed_form_trajectory(&cfg),
        // starts from the closed-form point at psi_start, which is the
        // initial condition when psi_start = 0
        Mode::Integrated => integrate(&cfg, &point_at(psi_start, &spec)),
    }
    .map_err(config)?;
    let record = TrajectoryRecord::from_trajectory(&traj);

    write_with(out, |w| match format {
        Format::Csv => export::write_csv(&record, w),
        Format::Json => export::write_json(&record, w),
    })?;

    let r2 = radius * radius;
    let worst = record
        .samples
        .iter()
        .map(|s| s.form_residual.abs().max(s.ortho_residual.abs()) / r2)
        .fold(0.0f64, f64::max);
    let limit = match mode {
        Mode::ClosedForm => tol,
        Mode::Integrated => tol.max(ODE_TOL),
    };
    eprintln!(
        "{} rows, signature {sig}, worst invariant residual {worst:.3e}·R² ({})",
        record.samples.len(),
        if worst <= limit { "ok" } else { "exceeds tol" }
    );
    Ok(())
}

fn cmd_verify(cfg: &VerifyConfig, format: Format, out: &Option<PathBuf>) -> Result<(), Failure> {
    check_tol(cfg.tol)?;
    let rows = verify_grid(cfg).map_err(config)?;

    println!(
        "{:>2} {:>2} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  {:>4} {:>6}  result",
        "s",
        "r",
        "R",
        "form",
        "ortho",
        "vnorm",
        "ode/bound",
        "conserve",
        "transform",
        "unif",
        "bundle"
    );
    for c in &rows {
        let failures = c.failures(cfg.tol);
        println!(
            "{:>2} {:>2} {:>8.4} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e}  {:>4} {:>6}  {}",
            c.s,
            c.r,
            c.radius,
            c.form,
            c.ortho,
            c.velocity_norm,
            c.ode_ratio,
            c.conservation,
            c.transform,
            if c.uniform { "yes" } else { "no" },
            if c.bundle { "yes" } else { "no" },
            if failures.is_empty() {
                "PASS".to_string()
            } else {
                format!("FAIL ({})", failures.join(", "))
            }
        );
    }

    if out.is_some() {
        write_with(out, |w| match format {
            Format::Csv => export::write_report_csv(&rows, w),
            Format::Json => export::write_report_json(&rows, w),
        })?;
    }

    let failed = rows.iter().filter(|c| !c.passed).count();
    println!(
        "{} cells, {} passed, {failed} failed",
        rows.len(),
        rows.len() - failed
    );
    if failed > 0 {
        return Err(Failure::Verify(format!("{failed} cells failed")));
    }
    Ok(())
}

fn cmd_dims(n: usize, p: u32) -> Result<(), Failure> {
    println!("{}", bundle_dim(n, p).map_err(config)?);
    Ok(())
}

fn cmd_transform(
    sig: Signature,
    radius: f64,
    psi: f64,
    a: usize,
    b: usize,
    amount: f64,
) -> Result<(), Failure> {
    let spec = CurveSpec::new(sig, radius).map_err(config)?;
    if a >= sig.n() || b >= sig.n() {
        return Err(Failure::Config(format!(
            "axes ({a}, {b}) out of range for signature {sig}"
        )));
    }
    let map = if sig.is_temporal(a) == sig.is_temporal(b) {
        block_rotation(sig, a, b, amount)
    } else if sig.is_temporal(a) {
        boost(sig, a, b, amount)
    } else {
        boost(sig, b, a, amount)
    }
    .map_err(config)?;
    let p = point_at(psi, &spec);
    let q = apply(&map, &p).map_err(config)?;
    let fmt = |c: &[f64]| {
        c.iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("point:  ({})", fmt(p.coords()));
    println!("image:  ({})", fmt(q.coords()));
    println!("form before: {:.16e}", p.quadratic_form());
    println!("form after:  {:.16e}", q.quadratic_form());
    println!("isometry (1e-12): {}", is_isometry(&map, 1e-12));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            sig,
            radius,
            psi_start,
            psi_end,
            steps,
            tol,
            mode,
            format,
            out,
        } => cmd_generate(
            sig.0, radius, psi_start, psi_end, steps, tol, mode, format, &out,
        ),
        Command::Verify {
            max_sig,
            radius,
            psi_start,
            psi_end,
            steps,
            ode_steps,
            tol,
            inject_fault,
            format,
            out,
        } => {
            let cfg = VerifyConfig {
                max_count: max_sig,
                radii: radius,
                psi_start,
                psi_end,
                samples: steps,
                ode_steps,
                tol,
                fault: inject_fault.then_some(Fault::UnscaledAmplitude),
            };
            cmd_verify(&cfg, format, &out)
        }
        Command::Dims { n, p } => cmd_dims(n, p),
        Command::Transform {
            sig,
            radius,
            psi,
            axis_a,
            axis_b,
            amount,
        } => cmd_transform(sig.0, radius, psi, axis_a, axis_b, amount),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
