//! `siegel`: generate lattices and Siegel objects, extract, dualize and
//! verify them. Documents are JSON on stdin/stdout; field elements are
//! strings in the canonical grammar.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 usage or parse error.

mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use siegel_core::arith::{theta_shift, FieldSpec, FieldValue};
use siegel_core::io::{
    laurent_to_json, lattice_from_json, lattice_to_json, ptable_to_json, siegel_from_json, siegel_to_json,
};
use siegel_core::lattice::{arrange_segments, extract_siegel, random_lattice, roundtrip_dual, LatticeInstance};
use siegel_core::siegel::{compute_p, dual_siegel, SiegelObject};

use config::{emit, parse_field, read_input, trial_rng, CliError, RandomArgs};
use verify::Check;

#[derive(Parser)]
#[command(name = "siegel", version, about = "Exact Siegel objects of lattices with a nilpotent operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random lattice instance or Siegel object.
    Gen(GenArgs),
    /// Siegel object of a lattice instance.
    Extract(IoArgs),
    /// Table of P-matrices of a lattice instance or Siegel object.
    P(IoArgs),
    /// Dual Siegel object of a Siegel object or lattice instance.
    Dualize(IoArgs),
    /// Runs the identity checks on random Siegel objects.
    Verify(VerifyArgs),
    /// Laurent expansion of a rational function of T around T = theta.
    Expand(ExpandArgs),
    /// Compares the Siegel object of the dual lattice with the dual Siegel object.
    Roundtrip(RoundtripArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lattice,
    Siegel,
}

#[derive(Args)]
struct IoArgs {
    /// Input document; stdin when absent or `-`.
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    mode: Mode,
    #[command(flatten)]
    random: RandomArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    random: RandomArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Subset of checks to run; all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    checks: Option<Vec<Check>>,
    /// Leave durations out of the report so that it is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Rational function, e.g. `1/T` or `(T + 1)/(T - theta)^2`.
    expr: String,
    /// Highest power of N kept.
    #[arg(long, default_value_t = 5)]
    order: i64,
    /// Coefficient field containing theta.
    #[arg(long, default_value = "qt")]
    field: String,
    /// Name of the variable of the rational function.
    #[arg(long, default_value = "T")]
    var: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Lattice instance (`-` for stdin); random instances are drawn when absent.
    input: Option<PathBuf>,
    #[command(flatten)]
    random: RandomArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Extract(a) => {
            let lattice = lattice_from_json(&read_input(a.input.as_deref())?)?;
            emit(a.out.as_ref(), &siegel_to_json(&extract(&lattice)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::P(a) => {
            let s = siegel_or_lattice(&read_input(a.input.as_deref())?)?;
            emit(a.out.as_ref(), &ptable_to_json(&compute_p(&s)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dualize(a) => {
            let s = siegel_or_lattice(&read_input(a.input.as_deref())?)?;
            emit(a.out.as_ref(), &siegel_to_json(&dual_siegel(&s)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(a) => {
            let checks = a.checks.unwrap_or_else(|| Check::ALL.to_vec());
            let report = verify::verify(&a.random, &checks, a.trials as usize, !a.no_timing)?;
            let s = &report.summary;
            eprintln!(
                "verify: {} checks, {} passed, {} failed, {} skipped: {}",
                s.checks, s.passed, s.failed, s.skipped, s.status
            );
            emit(a.out.as_ref(), &serde_json::to_value(&report).expect("report serializes"))?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Expand(a) => {
            let base = parse_field(&a.field)?;
            let spec = FieldSpec::ratfunc(base.as_ref().clone(), &a.var).map_err(|e| CliError::Usage(e.to_string()))?;
            let f = FieldValue::parse(Arc::new(spec), &a.expr).map_err(|e| CliError::Usage(e.to_string()))?;
            if a.order < 0 {
                return Err(CliError::Usage("--order must be non-negative".into()));
            }
            let series = theta_shift(&f, a.order).map_err(|e| CliError::Math(e.to_string()))?;
            emit(a.out.as_ref(), &laurent_to_json(&series))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Roundtrip(a) => roundtrip(a),
    }
}

fn extract(lattice: &LatticeInstance) -> Result<SiegelObject, CliError> {
    let arranged = arrange_segments(lattice)?;
    Ok(extract_siegel(lattice, &arranged)?)
}

fn siegel_or_lattice(doc: &Value) -> Result<SiegelObject, CliError> {
    if doc.get("basis").is_some() {
        extract(&lattice_from_json(doc)?)
    } else {
        Ok(siegel_from_json(doc)?)
    }
}

fn gen(a: GenArgs) -> Result<ExitCode, CliError> {
    let args = &a.random;
    args.validate()?;
    let spec = args.spec()?;
    let bound = args.bound()?;
    let mut rng = trial_rng(args.seed, 0);
    let doc = match a.mode {
        Mode::Siegel => {
            let shape = args.shape(&mut rng)?;
            siegel_to_json(&SiegelObject::random(spec, shape, &mut rng, bound)?)
        }
        Mode::Lattice => {
            let jordan = args.jordan(&mut rng)?;
            lattice_to_json(&random_lattice(spec, jordan, &mut rng, bound, args.attempts)?)
        }
    };
    emit(a.out.as_ref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn roundtrip(a: RoundtripArgs) -> Result<ExitCode, CliError> {
    if let Some(path) = &a.input {
        let lattice = lattice_from_json(&read_input(Some(path))?)?;
        let rep = roundtrip_dual(&lattice)?;
        let doc = json!({
            "status": rep.status,
            "expected": siegel_to_json(&rep.expected),
            "found": rep.found.as_ref().map(siegel_to_json),
            "dual": lattice_to_json(&rep.dual),
        });
        emit(a.out.as_ref(), &doc)?;
        return Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }

    let args = &a.random;
    args.validate()?;
    let spec = args.spec()?;
    let bound = args.bound()?;
    let results: Vec<Value> = (0..a.trials as usize)
        .into_par_iter()
        .map(|t| -> Result<Value, CliError> {
            let mut rng = trial_rng(args.seed, t);
            let jordan = args.jordan(&mut rng)?;
            let lattice = random_lattice(spec.clone(), jordan, &mut rng, bound, args.attempts)?;
            let rep = roundtrip_dual(&lattice)?;
            Ok(json!({
                "trial": t,
                "d": lattice.jordan().d().parts(),
                "status": rep.status,
            }))
        })
        .collect::<Result<_, _>>()?;
    let count = |name: &str| results.iter().filter(|r| r["status"]["status"] == name).count();
    let equal = count("equal");
    let inadmissible = count("inadmissible");
    let failed = results.len() - equal - inadmissible;
    let admissible = results.len() - inadmissible;
    let mut config = args.to_json()?;
    config["trials"] = json!(a.trials);
    let doc = json!({
        "config": config,
        "results": results,
        "summary": {
            "trials": results.len(),
            "equal": equal,
            "inadmissible": inadmissible,
            "failed": failed,
            "admissible_fraction": format!("{admissible}/{}", results.len()),
        },
    });
    eprintln!(
        "roundtrip: {} trials, {equal} equal, {inadmissible} inadmissible, {failed} failed",
        results.len()
    );
    emit(a.out.as_ref(), &doc)?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
