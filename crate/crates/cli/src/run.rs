//! Trial runner for the four solvers.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use charshift::algorithms::{
    solve_sjsp, solve_sjsp_unknown_n, solve_slsp, solve_sqcp, SolveOptions, SolveReport,
};
use charshift::{FactoredOddSquarefree, FieldSpec, OracleParams, Shift, ShiftOracle};
use charshift::field::parse_coeffs;
use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::{open_output, CliError, CliResult, Format, RunArgs};

#[derive(Debug, Clone)]
pub enum Problem {
    Slsp { p: u64 },
    Sjsp { n: u64 },
    SjspUnknown { n: u64, m: u64 },
    Sqcp { p: u64, r: usize, modulus: Option<String> },
}

/// Validated problem: oracle parameters plus whatever the solver needs.
struct Setup {
    command: &'static str,
    params: serde_json::Value,
    oracle: OracleParams,
    moduli: Option<FactoredOddSquarefree>,
    field: Option<Arc<FieldSpec>>,
}

fn setup(problem: &Problem) -> CliResult<Setup> {
    Ok(match problem {
        Problem::Slsp { p } => Setup {
            command: "slsp",
            params: json!({ "p": p }),
            oracle: OracleParams::Legendre { p: *p },
            moduli: None,
            field: None,
        },
        Problem::Sjsp { n } => Setup {
            command: "sjsp",
            params: json!({ "n": n }),
            oracle: OracleParams::Jacobi { n: *n },
            moduli: Some(FactoredOddSquarefree::new(*n).map_err(CliError::config)?),
            field: None,
        },
        Problem::SjspUnknown { n, m } => Setup {
            command: "sjsp-unknown",
            params: json!({ "n": n, "M": m }),
            oracle: OracleParams::JacobiUnknown { n: *n, m: *m },
            moduli: None,
            field: None,
        },
        Problem::Sqcp { p, r, modulus } => {
            let coeffs = modulus
                .as_deref()
                .map(parse_coeffs)
                .transpose()
                .map_err(CliError::config)?;
            let field = Arc::new(FieldSpec::new(*p, *r, coeffs.as_deref()).map_err(CliError::config)?);
            Setup {
                command: "sqcp",
                params: json!({
                    "p": p,
                    "r": r,
                    "modulus": charshift::field::format_coeffs(field.modulus()),
                }),
                oracle: OracleParams::Field(field.clone()),
                moduli: None,
                field: Some(field),
            }
        }
    })
}

fn parse_shift(text: &str, setup: &Setup) -> CliResult<Option<Shift>> {
    if text == "random" {
        return Ok(None);
    }
    let shift = match &setup.field {
        Some(field) => Shift::Field(field.parse_element(text).map_err(CliError::config)?),
        None => Shift::Int(
            text.parse()
                .map_err(|_| CliError::Config(format!("shift {text:?} is neither an integer nor \"random\"")))?,
        ),
    };
    Ok(Some(shift))
}

#[derive(Debug, Serialize)]
struct TrialRecord {
    trial: u64,
    shift: String,
    recovered_s: String,
    recovered_n: Option<u64>,
    correct: bool,
    attempts: u32,
    coherent_queries: u64,
    classical_queries: u64,
    collapse_trials: u32,
    collapse_accepted: u32,
    direct_branch: bool,
    first_candidate_n: Option<u64>,
    exact_success_probability: Option<f64>,
}

fn solve_one(setup: &Setup, fixed: Option<&Shift>, seed: u64, trial: u64) -> CliResult<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial);
    let oracle = match fixed {
        Some(s) => ShiftOracle::new(setup.oracle.clone(), s.clone()),
        None => ShiftOracle::with_random_shift(setup.oracle.clone(), &mut rng),
    }
    .map_err(CliError::config)?;
    let options = SolveOptions::default();
    let report: SolveReport = match (&setup.oracle, &setup.moduli) {
        (OracleParams::Legendre { .. }, _) => solve_slsp(&oracle, &mut rng, &options),
        (OracleParams::Jacobi { .. }, Some(moduli)) => solve_sjsp(moduli, &oracle, &mut rng, &options),
        (OracleParams::JacobiUnknown { .. }, _) => solve_sjsp_unknown_n(&oracle, &mut rng, &options),
        (OracleParams::Field(_), _) => solve_sqcp(&oracle, &mut rng, &options),
        (OracleParams::Jacobi { .. }, None) => unreachable!("known-modulus setup always factors n"),
    }
    .map_err(CliError::sim)?;
    let (secret, secret_n) = oracle.reveal_secret();
    let correct = report.recovered_s == secret && report.recovered_n.is_none_or(|n| Some(n) == secret_n);
    debug!("trial {trial}: {} attempts, correct={correct}", report.attempts);
    Ok(TrialRecord {
        trial,
        shift: secret.to_string(),
        recovered_s: report.recovered_s.to_string(),
        recovered_n: report.recovered_n,
        correct,
        attempts: report.attempts,
        coherent_queries: report.coherent_queries,
        classical_queries: report.classical_queries,
        collapse_trials: report.collapse_trials,
        collapse_accepted: report.collapse_accepted,
        direct_branch: report.direct_branch,
        first_candidate_n: report.first_candidate_n,
        exact_success_probability: report.exact_success_probability,
    })
}

#[derive(Debug, Serialize)]
struct Summary {
    command: &'static str,
    params: serde_json::Value,
    trials: u64,
    success_rate: f64,
    mean_attempts: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_attempt_probability: Option<f64>,
    coherent_queries_total: u64,
    wall_time_ms: Option<u64>,
}

pub fn run(problem: Problem, args: &RunArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let setup = setup(&problem)?;
    let fixed = parse_shift(&args.shift, &setup)?;
    // Surface parameter errors before spinning up workers.
    ShiftOracle::with_random_shift(setup.oracle.clone(), &mut ChaCha8Rng::seed_from_u64(args.seed))
        .map_err(CliError::config)?;
    if let Some(s) = &fixed {
        ShiftOracle::new(setup.oracle.clone(), s.clone()).map_err(CliError::config)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(CliError::sim)?;
    info!("{}: {} trials on {} workers", setup.command, args.trials, pool.current_num_threads());
    let started = Instant::now();
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|t| solve_one(&setup, fixed.as_ref(), args.seed, t))
            .collect::<CliResult<_>>()
    })?;
    let elapsed = started.elapsed();

    let trials = records.len() as f64;
    let probs: Vec<f64> = records.iter().filter_map(|r| r.exact_success_probability).collect();
    let summary = Summary {
        command: setup.command,
        params: setup.params.clone(),
        trials: args.trials,
        success_rate: records.iter().filter(|r| r.correct).count() as f64 / trials,
        mean_attempts: records.iter().map(|r| f64::from(r.attempts)).sum::<f64>() / trials,
        exact_attempt_probability: (!probs.is_empty())
            .then(|| probs.iter().sum::<f64>() / probs.len() as f64),
        coherent_queries_total: records.iter().map(|r| r.coherent_queries).sum(),
        wall_time_ms: args.timing.then_some(elapsed.as_millis() as u64),
    };
    write_records(args, &records, &summary)
}

fn write_records(args: &RunArgs, records: &[TrialRecord], summary: &Summary) -> CliResult<()> {
    let mut out = open_output(args.out.as_ref())?;
    match args.format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut out, r).map_err(CliError::sim)?;
                writeln!(out).map_err(CliError::sim)?;
            }
            serde_json::to_writer(&mut out, summary).map_err(CliError::sim)?;
            writeln!(out).map_err(CliError::sim)?;
        }
        Format::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut out);
                for r in records {
                    w.serialize(r).map_err(CliError::sim)?;
                }
                w.flush().map_err(CliError::sim)?;
            }
            writeln!(out).map_err(CliError::sim)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record([
                "command",
                "params",
                "trials",
                "success_rate",
                "mean_attempts",
                "exact_attempt_probability",
                "coherent_queries_total",
                "wall_time_ms",
            ])
            .map_err(CliError::sim)?;
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                summary.command.to_string(),
                summary.params.to_string(),
                summary.trials.to_string(),
                summary.success_rate.to_string(),
                summary.mean_attempts.to_string(),
                opt(summary.exact_attempt_probability.map(|v| v.to_string())),
                summary.coherent_queries_total.to_string(),
                opt(summary.wall_time_ms.map(|v| v.to_string())),
            ])
            .map_err(CliError::sim)?;
            w.flush().map_err(CliError::sim)?;
        }
    }
    out.flush().map_err(CliError::sim)
}
