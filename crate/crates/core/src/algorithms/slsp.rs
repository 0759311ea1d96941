//! Prime-field solver: prepare `sum (x+s / p)|x>`, Fourier transform, undo the
//! `(y/p)` phases, inverse transform, measure `-s`.

use rand::Rng;

use super::{
    main_branch_of, prepare_character_state, record, symbol_phase_as_one, Prepared,
    SlspPreparation, SolveOptions, SolveReport, Tally, Variant,
};
use crate::error::{Error, Result};
use crate::oracle::{OracleKind, Shift, ShiftOracle, ZeroPolicy};
use crate::qsim::{Direction, StateVector};

fn prime_of(oracle: &ShiftOracle) -> Result<u64> {
    match oracle.kind() {
        OracleKind::Legendre { p } => Ok(*p),
        other => Err(Error::VariantMismatch(format!("expected a Legendre oracle, got {other:?}"))),
    }
}

/// Steps 2 to 4 on a prepared state: transform, `(y/p)` phases with zero
/// read as `+1`, inverse transform. Returns the state before measurement and
/// the state after the first transform.
pub(crate) fn transform_steps(mut state: StateVector, p: u64) -> Result<(StateVector, StateVector)> {
    state.qft(Direction::Forward);
    let after_transform = state.clone();
    state.apply_phase(|y| symbol_phase_as_one(y as u64, p))?;
    state.qft(Direction::Inverse);
    Ok((state, after_transform))
}

/// Two probes: `f(-s') = 0` holds only for the true shift, `f(1-s') = 1`
/// cross-checks the character.
pub(crate) fn verify_prime_shift(tally: &mut Tally<'_>, p: u64, candidate: u64) -> Result<bool> {
    let zero_at = (p - candidate) % p;
    if tally.query(zero_at)? != 0 {
        return Ok(false);
    }
    Ok(tally.query((zero_at + 1) % p)? == 1)
}

/// Solves the shifted Legendre symbol problem for a Legendre oracle.
pub fn solve_slsp<R: Rng + ?Sized>(
    oracle: &ShiftOracle,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let p = prime_of(oracle)?;
    let mut tally = Tally::new(oracle);
    let mut report = SolveReport::new(Variant::Slsp, Shift::Int(0));
    for attempt in 1..=options.max_attempts {
        report.attempts = attempt;
        let mut uniform = StateVector::basis(p as usize, 0);
        uniform.qft(Direction::Forward);
        record(&mut report, options.transcript, "uniform", &uniform);

        let (candidate, main) = match options.preparation {
            SlspPreparation::CollapseNonzero => {
                report.collapse_trials += 1;
                let (prepared, joint) = prepare_character_state(&mut tally, &uniform, rng)?;
                let (p_nonzero, main) = main_branch_of(&joint);
                report.exact_collapse_probability = Some(p_nonzero);
                match prepared {
                    Prepared::Zero(x) => {
                        report.direct_branch = true;
                        ((p - x as u64) % p, main)
                    }
                    Prepared::Main(state) => {
                        report.collapse_accepted += 1;
                        report.direct_branch = false;
                        record(&mut report, options.transcript, "character-state", &state);
                        let (mut out, transformed) = transform_steps(state, p)?;
                        record(&mut report, options.transcript, "after-transform", &transformed);
                        record(&mut report, options.transcript, "before-measure", &out);
                        let y = out.measure(rng) as u64;
                        ((p - y) % p, main)
                    }
                }
            }
            SlspPreparation::PhaseAsPlusOne => {
                let mut state = uniform;
                tally.phase_query(&mut state, ZeroPolicy::AsPlusOne)?;
                record(&mut report, options.transcript, "character-state", &state);
                let (mut out, transformed) = transform_steps(state.clone(), p)?;
                record(&mut report, options.transcript, "after-transform", &transformed);
                let y = out.measure(rng) as u64;
                ((p - y) % p, Some(state))
            }
        };

        if verify_prime_shift(&mut tally, p, candidate)? {
            if let Some(main) = main {
                let (out, _) = transform_steps(main, p)?;
                report.exact_success_probability =
                    Some(out.distribution()[((p - candidate) % p) as usize]);
            }
            report.recovered_s = Shift::Int(candidate);
            report.coherent_queries = tally.coherent;
            report.classical_queries = tally.classical;
            return Ok(report);
        }
    }
    Err(Error::RetriesExhausted {
        attempts: options.max_attempts,
    })
}

/// Noiseless view of one attempt.
#[derive(Debug, Clone)]
pub struct SlspAnalysis {
    /// Probability of the nonzero-result branch.
    pub collapse_probability: f64,
    /// Main-branch state after the first transform.
    pub after_transform: StateVector,
    /// Main-branch output distribution.
    pub final_distribution: Vec<f64>,
}

/// Runs the pipeline with projections instead of samples.
pub fn slsp_exact_analysis(oracle: &ShiftOracle, preparation: SlspPreparation) -> Result<SlspAnalysis> {
    let p = prime_of(oracle)?;
    let mut tally = Tally::new(oracle);
    let mut uniform = StateVector::basis(p as usize, 0);
    uniform.qft(Direction::Forward);
    let (collapse_probability, prepared) = match preparation {
        SlspPreparation::CollapseNonzero => {
            let joint = tally.value_query(&uniform)?;
            let (prob, main) = main_branch_of(&joint);
            (prob, main.ok_or(Error::InvalidInput("empty nonzero branch".into()))?)
        }
        SlspPreparation::PhaseAsPlusOne => {
            let mut state = uniform;
            tally.phase_query(&mut state, ZeroPolicy::AsPlusOne)?;
            (1.0, state)
        }
    };
    let (out, after_transform) = transform_steps(prepared, p)?;
    Ok(SlspAnalysis {
        collapse_probability,
        after_transform,
        final_distribution: out.distribution(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(p: u64, s: u64) -> ShiftOracle {
        ShiftOracle::new(OracleParams::Legendre { p }, Shift::Int(s)).unwrap()
    }

    #[test]
    fn recovers_shift_p7() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = oracle(7, 3);
        let r = solve_slsp(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_s, Shift::Int(3));
        assert_eq!(r.coherent_queries, 2 * u64::from(r.attempts));
        if !r.direct_branch {
            assert!((r.exact_success_probability.unwrap() - 6.0 / 7.0).abs() < 1e-9);
        }
    }

    #[test]
    fn recovers_zero_shift_p3() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let o = oracle(3, 0);
        let r = solve_slsp(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_s, Shift::Int(0));
        let a = slsp_exact_analysis(&o, SlspPreparation::CollapseNonzero).unwrap();
        assert!((a.final_distribution[0] - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn p5_distribution() {
        for s in 0..5 {
            let a = slsp_exact_analysis(&oracle(5, s), SlspPreparation::CollapseNonzero).unwrap();
            let target = ((5 - s) % 5) as usize;
            for (y, &pr) in a.final_distribution.iter().enumerate() {
                let expected = if y == target { 0.8 } else { 0.05 };
                assert!((pr - expected).abs() < 1e-9, "s={s} y={y} pr={pr}");
            }
        }
    }

    #[test]
    fn plus_one_route_still_recovers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = oracle(11, 4);
        let opts = SolveOptions {
            preparation: SlspPreparation::PhaseAsPlusOne,
            ..SolveOptions::default()
        };
        let r = solve_slsp(&o, &mut rng, &opts).unwrap();
        assert_eq!(r.recovered_s, Shift::Int(4));
        assert_eq!(r.coherent_queries, u64::from(r.attempts));
    }

    #[test]
    fn rejects_other_variants() {
        let o = ShiftOracle::new(OracleParams::Jacobi { n: 15 }, Shift::Int(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            solve_slsp(&o, &mut rng, &SolveOptions::default()),
            Err(Error::VariantMismatch(_))
        ));
    }
}
