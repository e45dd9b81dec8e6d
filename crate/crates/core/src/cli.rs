//! Command-line surface: `run`, `linearize`, `diagnose` and `squirt-check`.
//!
//! Exit status: 0 success, 2 validation error, 3 numerical halt, 4 verdict failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{qtc_witness, SquirtProbe, SquirtVerdict};
use crate::error::{MuskatError, Result};
use crate::evolution::HaltReason;
use crate::io::{parse_scenario, rediagnose, run_scenario, squirt_check, RunOptions};
use crate::linear::{mode_rates, FlatBase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_HALT: i32 = 3;
pub const EXIT_VERDICT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "muskat",
    version,
    about = "Three-phase Muskat contour dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a scenario and write diagnostics, snapshots and a summary.
    Run(RunArgs),
    /// Print the linearized rates for a range of wavenumbers as CSV.
    Linearize(LinearizeArgs),
    /// Recompute diagnostics from the snapshots of a finished run.
    Diagnose(DiagnoseArgs),
    /// Apply the squirt-volume monitor to a finished run.
    SquirtCheck(SquirtArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Record every this many steps (overrides the scenario).
    #[arg(long)]
    cadence: Option<u64>,
    /// Continue from a snapshot written by an earlier run into `--out`.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinearizeArgs {
    /// Upper jump rho2 - rho1.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    a12: f64,
    /// Lower jump rho3 - rho2.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    a23: f64,
    /// Vertical gap between the flat interfaces.
    #[arg(long, default_value_t = 1.0)]
    gap: f64,
    #[arg(long, default_value_t = 1.0)]
    k_min: f64,
    #[arg(long, default_value_t = 4.0)]
    k_max: f64,
    #[arg(long, default_value_t = 1.0)]
    k_step: f64,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Output directory of a finished run.
    #[arg(long)]
    run: PathBuf,
    /// Print the energy growth table `t,energy,de_dt` instead of NDJSON records.
    #[arg(long)]
    qtc: bool,
}

#[derive(Debug, Args)]
struct SquirtArgs {
    /// Output directory of a finished run.
    #[arg(long)]
    run: PathBuf,
    /// Probe as `x1,x2,aperture`; repeatable. Defaults to the scenario's probes.
    #[arg(long, value_parser = parse_probe)]
    probe: Vec<SquirtProbe>,
}

fn parse_probe(s: &str) -> std::result::Result<SquirtProbe, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [x1, x2, a] => Ok(SquirtProbe {
            center: [x1, x2],
            aperture: a,
        }),
        _ => Err("expected x1,x2,aperture".into()),
    }
}

fn cmd_run(args: &RunArgs, err: &mut dyn Write) -> Result<i32> {
    let scenario = parse_scenario(&args.config)?;
    let opts = RunOptions {
        cadence: args.cadence,
        resume: args.resume.clone(),
    };
    let report = run_scenario(&scenario, &args.out, &opts)?;
    let s = &report.summary;
    writeln!(
        err,
        "halt: {:?} at t = {} after {} steps",
        s.halt, s.final_t, s.steps
    )?;
    if let Some(e) = &report.error {
        writeln!(err, "detail: {e}")?;
    }
    if s.under_resolved {
        writeln!(
            err,
            "warning: the gap fell below the trusted resolution floor"
        )?;
    }
    for p in &s.squirt {
        writeln!(err, "squirt probe {:?}: {:?}", p.probe, p.verdict)?;
    }
    Ok(match s.halt {
        HaltReason::Collision | HaltReason::NumericalFailure => EXIT_HALT,
        _ if s.squirt.iter().any(|p| p.verdict == SquirtVerdict::Fail) => EXIT_VERDICT,
        _ => EXIT_OK,
    })
}

fn cmd_linearize(args: &LinearizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if !(args.k_step > 0.0 && args.k_min > 0.0 && args.k_max >= args.k_min) {
        return Err(MuskatError::validation(
            "k",
            "need 0 < k_min <= k_max and k_step > 0",
        ));
    }
    let base = FlatBase::new(args.gap, 0.0, args.a12, args.a23)?;
    writeln!(
        out,
        "k,self_upper,self_lower,cross_upper,cross_lower,lambda_minus,lambda_plus"
    )?;
    let count = ((args.k_max - args.k_min) / args.k_step + 1e-9).floor() as usize + 1;
    for i in 0..count {
        let k = args.k_min + i as f64 * args.k_step;
        let r = mode_rates([k, 0.0], &base)?;
        let m = r.matrix;
        let [lm, lp] = r.eigenvalues;
        if lm.im != 0.0 {
            writeln!(err, "k = {k}: complex rates, imaginary part {}", lp.im)?;
        }
        writeln!(
            out,
            "{k},{},{},{},{},{},{}",
            m[0][0], m[1][1], m[0][1], m[1][0], lm.re, lp.re
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_diagnose(args: &DiagnoseArgs, out: &mut dyn Write) -> Result<i32> {
    let records = rediagnose(&args.run)?;
    if args.qtc {
        let t: Vec<f64> = records.iter().map(|r| r.t).collect();
        let e: Vec<f64> = records.iter().map(|r| r.energy).collect();
        writeln!(out, "t,energy,de_dt")?;
        for row in qtc_witness(&t, &e)? {
            writeln!(out, "{},{},{}", row.t, row.energy, row.de_dt)?;
        }
    } else {
        for r in &records {
            let line =
                serde_json::to_string(r).map_err(|e| MuskatError::InvalidInput(e.to_string()))?;
            writeln!(out, "{line}")?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_squirt(args: &SquirtArgs, out: &mut dyn Write) -> Result<i32> {
    let probes = (!args.probe.is_empty()).then(|| args.probe.clone());
    let outcomes = squirt_check(&args.run, probes)?;
    let mut code = EXIT_OK;
    for o in &outcomes {
        let verdict = match o.verdict {
            SquirtVerdict::Pass => "PASS",
            SquirtVerdict::Fail => "FAIL",
            SquirtVerdict::ProbeInactive => "INACTIVE",
        };
        writeln!(
            out,
            "probe ({}, {}) aperture {}: {verdict} (worst relative drop {:.3e})",
            o.probe.center[0], o.probe.center[1], o.probe.aperture, o.worst_relative_drop
        )?;
        if o.verdict == SquirtVerdict::Fail {
            code = EXIT_VERDICT;
        }
    }
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, err),
        Command::Linearize(a) => cmd_linearize(a, out, err),
        Command::Diagnose(a) => cmd_diagnose(a, out),
        Command::SquirtCheck(a) => cmd_squirt(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
