//! End-to-end solvers for the four shifted character problems, plus exact
//! checks of the identities they rely on.
//!
//! Every solver verifies its candidate against the oracle with classical
//! probes and retries on mismatch, so a returned shift is always correct and
//! only the number of attempts is random.

mod identities;
mod sjsp;
mod slsp;
mod sqcp;
mod unknown;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::field::FieldElement;
use crate::number::jacobi_odd;
use crate::oracle::{
    apply_result_phase, discard_result_register, result_value, ShiftOracle, ZeroPolicy,
    RESULT_DIM,
};
use crate::qsim::StateVector;

pub use identities::{
    repeated_sampling_comparison, verify_jacobi_qft_lemma, verify_trace_fourier_transform,
    DistributionComparison, TftCheck,
};
pub use sjsp::{sjsp_exact_analysis, solve_sjsp, SjspAnalysis};
pub use slsp::{slsp_exact_analysis, solve_slsp, SlspAnalysis};
pub use sqcp::{solve_sqcp, sqcp_exact_analysis, SqcpAnalysis};
pub use unknown::solve_sjsp_unknown_n;

/// Retry cap for every solver.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

/// Checkpoints are only kept for states up to this dimension.
pub const TRANSCRIPT_MAX_DIM: usize = 1 << 12;

/// How the first step of the prime-field solver builds its character state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlspPreparation {
    /// Value query, collapse onto nonzero results, phase, uncompute. Yields
    /// the exact normalized character state with two coherent queries.
    #[default]
    CollapseNonzero,
    /// One phase query reading the single zero of `f_s` as `+1`.
    PhaseAsPlusOne,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_attempts: u32,
    pub transcript: bool,
    pub preparation: SlspPreparation,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            transcript: false,
            preparation: SlspPreparation::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Slsp,
    Sjsp,
    SjspUnknown,
    Sqcp,
}

/// A labelled intermediate state.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub label: String,
    pub state: StateVector,
}

/// Outcome and bookkeeping of one solver call.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub variant: Variant,
    pub recovered_s: crate::oracle::Shift,
    pub recovered_n: Option<u64>,
    /// Full attempts, including the successful one.
    pub attempts: u32,
    pub coherent_queries: u64,
    pub classical_queries: u64,
    /// Noiseless probability that the final measurement of the main branch
    /// yields the answer, evaluated on the successful attempt's state.
    pub exact_success_probability: Option<f64>,
    /// Noiseless probability that the value register collapses to a nonzero
    /// result.
    pub exact_collapse_probability: Option<f64>,
    pub collapse_trials: u32,
    pub collapse_accepted: u32,
    /// Answer came from the zero-result branch rather than the transform.
    pub direct_branch: bool,
    /// First modulus candidate produced by continued fractions.
    pub first_candidate_n: Option<u64>,
    #[serde(skip)]
    pub transcript: Vec<Checkpoint>,
}

impl SolveReport {
    fn new(variant: Variant, recovered_s: crate::oracle::Shift) -> Self {
        Self {
            variant,
            recovered_s,
            recovered_n: None,
            attempts: 0,
            coherent_queries: 0,
            classical_queries: 0,
            exact_success_probability: None,
            exact_collapse_probability: None,
            collapse_trials: 0,
            collapse_accepted: 0,
            direct_branch: false,
            first_candidate_n: None,
            transcript: Vec::new(),
        }
    }
}

/// Oracle access with per-call query accounting, independent of other users
/// of the same oracle.
pub(crate) struct Tally<'a> {
    pub oracle: &'a ShiftOracle,
    pub coherent: u64,
    pub classical: u64,
}

impl<'a> Tally<'a> {
    pub fn new(oracle: &'a ShiftOracle) -> Self {
        Self {
            oracle,
            coherent: 0,
            classical: 0,
        }
    }

    pub fn query(&mut self, x: u64) -> Result<i8> {
        self.classical += 1;
        self.oracle.query(x)
    }

    pub fn query_field(&mut self, x: &FieldElement) -> Result<i8> {
        self.classical += 1;
        self.oracle.query_field(x)
    }

    pub fn value_query(&mut self, state: &StateVector) -> Result<StateVector> {
        self.coherent += 1;
        self.oracle.value_query_superposed(state)
    }

    pub fn uncompute(&mut self, joint: &mut StateVector) -> Result<()> {
        self.coherent += 1;
        self.oracle.apply_value_oracle(joint)
    }

    pub fn phase_query(&mut self, state: &mut StateVector, policy: ZeroPolicy) -> Result<()> {
        self.coherent += 1;
        self.oracle.phase_query(state, policy)
    }
}

/// Result of the shared first step: a character state or a direct zero hit.
pub(crate) enum Prepared {
    /// `sum chi(x+s) |x>` restricted to the nonzero results, normalized.
    Main(StateVector),
    /// The value register read 0 at basis index `x`.
    Zero(usize),
}

/// Value query, measure whether the result is nonzero, then either put the
/// result into the phase and uncompute, or read off the zero. Uses exactly two
/// coherent queries either way.
pub(crate) fn prepare_character_state<R: Rng + ?Sized>(
    tally: &mut Tally<'_>,
    input: &StateVector,
    rng: &mut R,
) -> Result<(Prepared, StateVector)> {
    let mut joint = tally.value_query(input)?;
    let before = joint.clone();
    if joint.measure_predicate(crate::oracle::result_is_nonzero, rng) {
        apply_result_phase(&mut joint)?;
        tally.uncompute(&mut joint)?;
        Ok((Prepared::Main(discard_result_register(&joint)?), before))
    } else {
        let index = joint.measure(rng);
        tally.uncompute(&mut joint)?;
        Ok((Prepared::Zero(index / RESULT_DIM), before))
    }
}

/// Noiseless nonzero branch of a joint `|x, f(x)>` state with the value
/// moved into the phase, read directly off the amplitudes.
pub(crate) fn main_branch_of(joint: &StateVector) -> (f64, Option<StateVector>) {
    let dim = joint.dim() / RESULT_DIM;
    let amps: Vec<Complex64> = (0..dim)
        .map(|x| {
            (1..RESULT_DIM)
                .map(|c| joint.amplitude(x * RESULT_DIM + c) * f64::from(result_value(c)))
                .sum()
        })
        .collect();
    let prob: f64 = amps.iter().map(Complex64::norm_sqr).sum();
    (prob, StateVector::normalized(amps).ok())
}

/// `(y/m)` with the zero value read as `+1`, as a phase.
pub(crate) fn symbol_phase_as_one(y: u64, m: u64) -> Complex64 {
    let v = jacobi_odd(y % m, m);
    Complex64::new(if v == 0 { 1.0 } else { f64::from(v) }, 0.0)
}

pub(crate) fn record(report: &mut SolveReport, enabled: bool, label: &str, state: &StateVector) {
    if enabled && state.dim() <= TRANSCRIPT_MAX_DIM {
        report.transcript.push(Checkpoint {
            label: label.to_string(),
            state: state.clone(),
        });
    }
}
