//! Jacobi solver when only the domain size `M > n^2` is known: Fourier sample
//! the repeated character state over `Z_M`, read the period off a continued
//! fraction convergent, then solve with the recovered modulus.

use rand::Rng;

use super::{prepare_character_state, sjsp, Prepared, SolveOptions, SolveReport, Tally, Variant};
use crate::error::{Error, Result};
use crate::number::{best_convergent, factor_trial, FactoredOddSquarefree};
use crate::oracle::{OracleKind, ShiftOracle};
use crate::qsim::{Direction, StateVector};

/// Periodicity probes per candidate modulus.
pub const PERIOD_PROBES: usize = 20;

/// Retry cap for the inner known-modulus solve on a candidate.
const INNER_ATTEMPTS: u32 = 8;

fn looks_periodic<R: Rng + ?Sized>(tally: &mut Tally<'_>, m: u64, period: u64, rng: &mut R) -> Result<bool> {
    for _ in 0..PERIOD_PROBES {
        let x = rng.gen_range(0..m - period);
        if tally.query(x)? != tally.query(x + period)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classical checks on a candidate: odd, square-free, `n^2 < M`, periodic.
/// A periodic candidate is shrunk to the smallest periodic divisor.
fn validate<R: Rng + ?Sized>(
    tally: &mut Tally<'_>,
    m: u64,
    candidate: u64,
    rng: &mut R,
) -> Result<Option<FactoredOddSquarefree>> {
    if candidate < 3 || candidate.is_multiple_of(2) || (candidate as u128).pow(2) >= m as u128 {
        return Ok(None);
    }
    let Ok(mut moduli) = factor_trial(candidate) else {
        return Ok(None);
    };
    if !looks_periodic(tally, m, candidate, rng)? {
        return Ok(None);
    }
    'shrink: loop {
        for &p in moduli.factors() {
            let smaller = moduli.n() / p;
            if smaller >= 3 && looks_periodic(tally, m, smaller, rng)? {
                moduli = factor_trial(smaller)?;
                continue 'shrink;
            }
        }
        return Ok(Some(moduli));
    }
}

/// Recovers `(n, s)` from an unknown-modulus Jacobi oracle.
pub fn solve_sjsp_unknown_n<R: Rng + ?Sized>(
    oracle: &ShiftOracle,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let OracleKind::JacobiUnknown { m } = *oracle.kind() else {
        return Err(Error::VariantMismatch(format!(
            "expected an unknown-modulus oracle, got {:?}",
            oracle.kind()
        )));
    };
    let mut tally = Tally::new(oracle);
    let mut first_candidate = None;
    let (mut trials, mut accepted) = (0u32, 0u32);
    let mut saw_convergent = false;
    for attempt in 1..=options.max_attempts {
        let mut uniform = StateVector::basis(m as usize, 0);
        uniform.qft(Direction::Forward);
        let mut state = loop {
            trials += 1;
            if let (Prepared::Main(state), _) = prepare_character_state(&mut tally, &uniform, rng)? {
                accepted += 1;
                break state;
            }
        };
        state.qft(Direction::Forward);
        let i = state.measure(rng) as u64;
        let candidate = best_convergent(i, m).den();
        first_candidate.get_or_insert(candidate);
        saw_convergent |= candidate > 1;

        let Some(moduli) = validate(&mut tally, m, candidate, rng)? else {
            continue;
        };
        let inner = SolveOptions {
            max_attempts: INNER_ATTEMPTS,
            ..options.clone()
        };
        match sjsp::run(&moduli, &mut tally, rng, &inner) {
            Ok(found) => {
                return Ok(SolveReport {
                    variant: Variant::SjspUnknown,
                    attempts: attempt,
                    coherent_queries: tally.coherent,
                    classical_queries: tally.classical,
                    collapse_trials: trials + found.collapse_trials,
                    collapse_accepted: accepted + found.collapse_accepted,
                    first_candidate_n: first_candidate,
                    ..found
                });
            }
            Err(Error::RetriesExhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if !saw_convergent {
        return Err(Error::NoValidConvergent);
    }
    Err(Error::RetriesExhausted {
        attempts: options.max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{OracleParams, Shift};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn n15_m16384() {
        let o = ShiftOracle::new(OracleParams::JacobiUnknown { n: 15, m: 1 << 14 }, Shift::Int(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = solve_sjsp_unknown_n(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_n, Some(15));
        assert_eq!(r.recovered_s, Shift::Int(4));
        assert_eq!(r.variant, Variant::SjspUnknown);
    }

    #[test]
    fn n3_m1024() {
        let o = ShiftOracle::new(OracleParams::JacobiUnknown { n: 3, m: 1024 }, Shift::Int(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = solve_sjsp_unknown_n(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_n, Some(3));
        assert_eq!(r.recovered_s, Shift::Int(0));
    }

    #[test]
    fn exact_multiple_gives_exact_denominator() {
        // i/M = j/n exactly with gcd(j, n) = 1
        let m = 15 * 64;
        for j in [1u64, 2, 4, 7, 8, 11, 13, 14] {
            assert_eq!(best_convergent(j * 64, m).den(), 15);
        }
    }

    #[test]
    fn shrinks_multiples_of_the_period() {
        let o = ShiftOracle::new(OracleParams::JacobiUnknown { n: 21, m: 1 << 14 }, Shift::Int(5)).unwrap();
        let mut tally = Tally::new(&o);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let found = validate(&mut tally, 1 << 14, 105, &mut rng).unwrap().unwrap();
        assert_eq!(found.n(), 21);
        assert!(validate(&mut tally, 1 << 14, 35, &mut rng).unwrap().is_none());
    }
}
