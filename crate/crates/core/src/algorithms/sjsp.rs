//! Jacobi solver with a known factorization: prepare the character state on
//! `Z_n`, split it into `Z_p1 x ... x Z_pk` by CRT, and run the prime-field
//! steps on each factor register.

use rand::Rng;

use super::{
    main_branch_of, prepare_character_state, record, symbol_phase_as_one, Prepared,
    SolveOptions, SolveReport, Tally, Variant,
};
use crate::error::{Error, Result};
use crate::number::{crt_compose, crt_split, jacobi_odd, FactoredOddSquarefree};
use crate::oracle::{OracleKind, Shift, ShiftOracle};
use crate::qsim::{Direction, RegisterLayout, StateVector};

/// Largest modulus checked exhaustively during verification.
const EXHAUSTIVE_CHECK_MAX: u64 = 1 << 16;
const RANDOM_CHECKS: usize = 64;

fn check_oracle(oracle: &ShiftOracle, moduli: &FactoredOddSquarefree) -> Result<()> {
    match oracle.kind() {
        OracleKind::Jacobi { n } if *n == moduli.n() => Ok(()),
        OracleKind::JacobiUnknown { m } if moduli.n() < *m => Ok(()),
        other => Err(Error::VariantMismatch(format!(
            "oracle {other:?} does not match modulus {}",
            moduli.n()
        ))),
    }
}

fn crt_layout(moduli: &FactoredOddSquarefree) -> RegisterLayout {
    RegisterLayout::new(moduli.factors().iter().map(|&p| p as usize).collect())
        .expect("factors are positive")
}

/// CRT relabeling followed by the prime-field steps on every factor.
pub(crate) fn factor_steps(mut state: StateVector, moduli: &FactoredOddSquarefree) -> Result<StateVector> {
    let layout = crt_layout(moduli);
    state.permute_basis(|x| {
        let digits: Vec<usize> = crt_split(x as u64, moduli).into_iter().map(|d| d as usize).collect();
        layout.encode(&digits)
    })?;
    for (axis, &p) in moduli.factors().iter().enumerate() {
        let stride = layout.stride(axis);
        state.qft_register(&layout, axis, Direction::Forward)?;
        state.apply_phase(|i| symbol_phase_as_one(((i / stride) % p as usize) as u64, p))?;
        state.qft_register(&layout, axis, Direction::Inverse)?;
    }
    Ok(state)
}

/// Basis index (in the CRT layout) that encodes `-s`.
fn answer_index(s: u64, moduli: &FactoredOddSquarefree) -> usize {
    let n = moduli.n();
    let digits: Vec<usize> = crt_split((n - s % n) % n, moduli)
        .into_iter()
        .map(|d| d as usize)
        .collect();
    crt_layout(moduli).encode(&digits)
}

/// `f(-s') = 0` and `f(1-s') = 1`, then a comparison of `f` against
/// `((x+s')/n)` over all of `Z_n` (or random points beyond desk scale).
pub(crate) fn verify_jacobi_shift<R: Rng + ?Sized>(
    tally: &mut Tally<'_>,
    n: u64,
    candidate: u64,
    rng: &mut R,
) -> Result<bool> {
    let zero_at = (n - candidate) % n;
    if tally.query(zero_at)? != 0 || tally.query((zero_at + 1) % n)? != 1 {
        return Ok(false);
    }
    let expect = |x: u64| jacobi_odd((x + candidate) % n, n);
    if n <= EXHAUSTIVE_CHECK_MAX {
        for x in 0..n {
            if tally.query(x)? != expect(x) {
                return Ok(false);
            }
        }
    } else {
        for _ in 0..RANDOM_CHECKS {
            let x = rng.gen_range(0..n);
            if tally.query(x)? != expect(x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Solves the shifted Jacobi symbol problem for a known square-free `n`.
///
/// Also accepts an unknown-modulus oracle whose domain contains `Z_n`.
pub fn solve_sjsp<R: Rng + ?Sized>(
    moduli: &FactoredOddSquarefree,
    oracle: &ShiftOracle,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport> {
    check_oracle(oracle, moduli)?;
    let mut tally = Tally::new(oracle);
    let report = run(moduli, &mut tally, rng, options)?;
    Ok(SolveReport {
        coherent_queries: tally.coherent,
        classical_queries: tally.classical,
        ..report
    })
}

pub(crate) fn run<R: Rng + ?Sized>(
    moduli: &FactoredOddSquarefree,
    tally: &mut Tally<'_>,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let n = moduli.n();
    let layout = crt_layout(moduli);
    let mut report = SolveReport::new(Variant::Sjsp, Shift::Int(0));
    report.recovered_n = Some(n);
    for attempt in 1..=options.max_attempts {
        report.attempts = attempt;
        let mut uniform = StateVector::basis(n as usize, 0);
        uniform.qft(Direction::Forward);

        // repeat the collapse until the value register reads nonzero
        let (state, main) = loop {
            report.collapse_trials += 1;
            let (prepared, joint) = prepare_character_state(tally, &uniform, rng)?;
            if let Prepared::Main(state) = prepared {
                report.collapse_accepted += 1;
                let (prob, main) = main_branch_of(&joint);
                report.exact_collapse_probability = Some(prob);
                break (state, main);
            }
            if report.collapse_trials >= options.max_attempts * 64 {
                return Err(Error::RetriesExhausted { attempts: attempt });
            }
        };
        record(&mut report, options.transcript, "character-state", &state);
        let mut out = factor_steps(state, moduli)?;
        record(&mut report, options.transcript, "before-measure", &out);
        let digits: Vec<u64> = layout
            .decode(out.measure(rng))
            .into_iter()
            .zip(moduli.factors())
            .map(|(t, &p)| (p - t as u64) % p)
            .collect();
        let candidate = crt_compose(&digits, moduli);
        if verify_jacobi_shift(tally, n, candidate, rng)? {
            if let Some(main) = main {
                let out = factor_steps(main, moduli)?;
                report.exact_success_probability = Some(out.distribution()[answer_index(candidate, moduli)]);
            }
            report.recovered_s = Shift::Int(candidate);
            return Ok(report);
        }
    }
    Err(Error::RetriesExhausted {
        attempts: options.max_attempts,
    })
}

/// Noiseless view of one attempt.
#[derive(Debug, Clone)]
pub struct SjspAnalysis {
    pub collapse_probability: f64,
    /// Output distribution over the CRT layout, conditional on the collapse.
    pub final_distribution: Vec<f64>,
    /// Layout index encoding `-s` for a given `s`.
    pub layout: RegisterLayout,
}

impl SjspAnalysis {
    /// Probability of reading `-s` for the shift `s`.
    pub fn probability_of_shift(&self, s: u64, moduli: &FactoredOddSquarefree) -> f64 {
        self.final_distribution[answer_index(s, moduli)]
    }
}

pub fn sjsp_exact_analysis(moduli: &FactoredOddSquarefree, oracle: &ShiftOracle) -> Result<SjspAnalysis> {
    check_oracle(oracle, moduli)?;
    let mut tally = Tally::new(oracle);
    let mut uniform = StateVector::basis(moduli.n() as usize, 0);
    uniform.qft(Direction::Forward);
    let joint = tally.value_query(&uniform)?;
    let (collapse_probability, main) = main_branch_of(&joint);
    let main = main.ok_or(Error::InvalidInput("empty nonzero branch".into()))?;
    Ok(SjspAnalysis {
        collapse_probability,
        final_distribution: factor_steps(main, moduli)?.distribution(),
        layout: crt_layout(moduli),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::factor_trial;
    use crate::oracle::OracleParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle(n: u64, s: u64) -> ShiftOracle {
        ShiftOracle::new(OracleParams::Jacobi { n }, Shift::Int(s)).unwrap()
    }

    #[test]
    fn n15_examples() {
        let m = factor_trial(15).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in [7, 0] {
            let o = oracle(15, s);
            let r = solve_sjsp(&m, &o, &mut rng, &SolveOptions::default()).unwrap();
            assert_eq!(r.recovered_s, Shift::Int(s));
            assert!((r.exact_success_probability.unwrap() - 8.0 / 15.0).abs() < 1e-9);
            let a = sjsp_exact_analysis(&m, &o).unwrap();
            assert!((a.collapse_probability - 8.0 / 15.0).abs() < 1e-9);
            assert!((a.probability_of_shift(s, &m) - 8.0 / 15.0).abs() < 1e-9);
        }
    }

    #[test]
    fn n33_example() {
        let m = factor_trial(33).unwrap();
        let o = oracle(33, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = solve_sjsp(&m, &o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_s, Shift::Int(10));
        assert!((r.exact_collapse_probability.unwrap() - 20.0 / 33.0).abs() < 1e-9);
    }

    #[test]
    fn crt_relabel_of_seven() {
        let m = factor_trial(15).unwrap();
        let layout = crt_layout(&m);
        let digits: Vec<usize> = crt_split(7, &m).into_iter().map(|d| d as usize).collect();
        assert_eq!(layout.encode(&digits), 7);
    }

    #[test]
    fn mismatched_modulus_rejected() {
        let m = factor_trial(21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            solve_sjsp(&m, &oracle(15, 1), &mut rng, &SolveOptions::default()),
            Err(Error::VariantMismatch(_))
        ));
    }
}
