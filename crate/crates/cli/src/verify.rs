use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use siegel_core::arith::random::EntryBound;
use siegel_core::arith::FieldSpec;
use siegel_core::io::{lattice_to_json, mat_to_json, siegel_to_json};
use siegel_core::lattice::{
    random_lattice, roundtrip_dual, verify_pairing, LatticeError, LatticeInstance, RoundtripStatus,
};
use siegel_core::linalg::Mat;
use siegel_core::partition::JordanData;
use siegel_core::siegel::{
    build_b, build_bbar, build_gothic_p, build_gothic_s, dual_siegel, recover_bbar, verify_b_bbar,
    verify_gothic_inverse, verify_recurrence, SiegelObject,
};

use crate::config::{trial_rng, CliError, RandomArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Recurrence,
    BBbar,
    RecoverBbar,
    GothicInverse,
    Pairing,
    DoubleDual,
    NegatedTranspose,
    Roundtrip,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Recurrence,
        Check::BBbar,
        Check::RecoverBbar,
        Check::GothicInverse,
        Check::Pairing,
        Check::DoubleDual,
        Check::NegatedTranspose,
        Check::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Recurrence => "recurrence",
            Check::BBbar => "b-bbar",
            Check::RecoverBbar => "recover-bbar",
            Check::GothicInverse => "gothic-inverse",
            Check::Pairing => "pairing",
            Check::DoubleDual => "double-dual",
            Check::NegatedTranspose => "negated-transpose",
            Check::Roundtrip => "roundtrip",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Offending instance and the coefficient matrix that exposes the failure.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub instance: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub trial: usize,
    pub shape: Vec<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_us: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub status: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config: Value,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}

struct Outcome {
    status: Status,
    detail: Option<String>,
    counterexample: Option<Counterexample>,
}

impl Outcome {
    fn pass() -> Self {
        Outcome {
            status: Status::Pass,
            detail: None,
            counterexample: None,
        }
    }

    fn skipped(detail: impl Into<String>) -> Self {
        Outcome {
            status: Status::Skipped,
            detail: Some(detail.into()),
            counterexample: None,
        }
    }

    fn fail(detail: impl Into<String>, instance: Value, witness: Option<&Mat>) -> Self {
        Outcome {
            status: Status::Fail,
            detail: Some(detail.into()),
            counterexample: Some(Counterexample {
                instance,
                witness: witness.map(mat_to_json),
            }),
        }
    }
}

/// First entry of `expected` that `found` lacks or disagrees with, and the
/// matrix found there.
fn first_difference(expected: &SiegelObject, found: &SiegelObject) -> Option<(String, Mat)> {
    expected.entries().find_map(|(idx, m)| match found.get(idx.u, idx.y, idx.z) {
        Some(f) if f == m => None,
        Some(f) => Some((idx.to_string(), f.clone())),
        None => Some((idx.to_string(), m.clone())),
    })
}

fn run_check(
    check: Check,
    s: &SiegelObject,
    lattice: impl FnOnce() -> Result<Option<LatticeInstance>, LatticeError>,
) -> Outcome {
    let instance = || siegel_to_json(s);
    match check {
        Check::Recurrence => {
            let rep = verify_recurrence(s);
            match rep.failures.first() {
                None => Outcome::pass(),
                Some(f) => Outcome::fail(
                    format!(
                        "{} form nonzero at i={}, j={}, psi={}, xi={} ({} of {} evaluations failed)",
                        f.form,
                        f.i,
                        f.j,
                        f.psi,
                        f.xi,
                        rep.failures.len(),
                        rep.checked
                    ),
                    instance(),
                    Some(&f.residual),
                ),
            }
        }
        Check::BBbar => {
            let rep = verify_b_bbar(s);
            match rep.failures.first() {
                None => Outcome::pass(),
                Some(&mu) => Outcome::fail(
                    format!("coefficient of N^{mu} in B^t Bbar is wrong"),
                    instance(),
                    Some(&rep.coefficients[mu]),
                ),
            }
        }
        Check::RecoverBbar => {
            let expected = build_bbar(s);
            match recover_bbar(&build_b(s), s.shape()) {
                Err(e) => Outcome::fail(format!("recovery failed: {e}"), instance(), None),
                Ok(x) if x == expected => Outcome::pass(),
                Ok(x) => {
                    let top = x.degree().max(expected.degree()).unwrap_or(0);
                    let mu = (0..=top).find(|&mu| x.coeff(mu) != expected.coeff(mu)).unwrap_or(0);
                    Outcome::fail(
                        format!("recovered coefficient of N^{mu} differs from Bbar"),
                        instance(),
                        Some(&x.coeff(mu)),
                    )
                }
            }
        }
        Check::GothicInverse => {
            if verify_gothic_inverse(s) {
                Outcome::pass()
            } else {
                let prod = build_gothic_p(s).mul(&build_gothic_s(s)).expect("square");
                Outcome::fail("GP GS is not the identity", instance(), Some(&prod))
            }
        }
        Check::Pairing => {
            let rep = verify_pairing(s);
            match rep.failures.first() {
                None => Outcome::pass(),
                Some((a, b, p)) => Outcome::fail(
                    format!("<omega_{a}, chi_{b}> = {p} ({} bad entries)", rep.failures.len()),
                    instance(),
                    None,
                ),
            }
        }
        Check::DoubleDual => {
            let dd = dual_siegel(&dual_siegel(s));
            match first_difference(s, &dd) {
                None => Outcome::pass(),
                Some((idx, m)) => Outcome::fail(format!("double dual differs at {idx}"), instance(), Some(&m)),
            }
        }
        Check::NegatedTranspose => {
            if s.m() != 1 {
                return Outcome::skipped("only defined for m = 1");
            }
            let dual = dual_siegel(s);
            let got = dual.get(1, 2, 0).expect("single entry");
            if *got == s.get(1, 2, 0).expect("single entry").transpose().neg() {
                Outcome::pass()
            } else {
                Outcome::fail("dual is not the negated transpose", instance(), Some(got))
            }
        }
        Check::Roundtrip => {
            let lat = match lattice() {
                Ok(Some(l)) => l,
                Ok(None) => return Outcome::skipped("no spanning lattice within the attempt bound"),
                Err(e) => return Outcome::fail(format!("lattice generation failed: {e}"), Value::Null, None),
            };
            let inst = || lattice_to_json(&lat);
            match roundtrip_dual(&lat) {
                Err(e) => Outcome::fail(e.to_string(), inst(), None),
                Ok(rep) => match &rep.status {
                    RoundtripStatus::Equal => Outcome::pass(),
                    RoundtripStatus::Inadmissible { permutation } => {
                        Outcome::skipped(format!("dual basis needs the permutation {permutation:?}"))
                    }
                    RoundtripStatus::DualSpanFailure => Outcome::fail("dual basis does not span", inst(), None),
                    RoundtripStatus::Mismatch { indices } => {
                        let witness = rep
                            .found
                            .as_ref()
                            .and_then(|f| first_difference(&rep.expected, f))
                            .map(|(_, m)| m);
                        Outcome::fail(
                            format!("dual lattice Siegel object differs at {}", indices.join(" ")),
                            inst(),
                            witness.as_ref(),
                        )
                    }
                },
            }
        }
    }
}

fn lattice_for(
    spec: &Arc<FieldSpec>,
    shape: &[usize],
    rng: &mut ChaCha8Rng,
    bound: EntryBound,
    attempts: usize,
) -> Result<Option<LatticeInstance>, LatticeError> {
    let jordan = JordanData::from_shape(shape)?;
    match random_lattice(spec.clone(), jordan, rng, bound, attempts) {
        Ok(l) => Ok(Some(l)),
        Err(LatticeError::SpanFailure) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_trial(args: &RandomArgs, checks: &[Check], trial: usize, timing: bool) -> Result<Vec<CheckResult>, CliError> {
    let spec = args.spec()?;
    let bound = args.bound()?;
    let mut rng = trial_rng(args.seed, trial);
    let shape = args.shape(&mut rng)?;
    let s = SiegelObject::random(spec.clone(), shape.clone(), &mut rng, bound)?;
    let mut out = Vec::with_capacity(checks.len());
    for &check in checks {
        let start = Instant::now();
        let outcome = run_check(check, &s, || lattice_for(&spec, &shape, &mut rng, bound, args.attempts));
        out.push(CheckResult {
            check: check.name(),
            trial,
            shape: shape.clone(),
            status: outcome.status,
            detail: outcome.detail,
            counterexample: outcome.counterexample,
            duration_us: timing.then(|| start.elapsed().as_micros() as u64),
        });
    }
    Ok(out)
}

/// Runs every check on `trials` random Siegel objects; trials run in
/// parallel and are reported in trial order.
pub fn verify(args: &RandomArgs, checks: &[Check], trials: usize, timing: bool) -> Result<VerifyReport, CliError> {
    args.validate()?;
    let per_trial: Vec<Vec<CheckResult>> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(args, checks, t, timing))
        .collect::<Result<_, _>>()?;
    let results: Vec<CheckResult> = per_trial.into_iter().flatten().collect();
    let count = |st: Status| results.iter().filter(|r| r.status == st).count();
    let failed = count(Status::Fail);
    let summary = Summary {
        checks: results.len(),
        passed: count(Status::Pass),
        failed,
        skipped: count(Status::Skipped),
        status: if failed == 0 { "pass" } else { "fail" },
    };
    let mut config = args.to_json()?;
    config["trials"] = json!(trials);
    config["checks"] = json!(checks.iter().map(|c| c.name()).collect::<Vec<_>>());
    Ok(VerifyReport {
        config,
        results,
        summary,
    })
}
