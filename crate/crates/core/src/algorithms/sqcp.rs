//! General finite field solver. The register is `Z_(q+1)`: indices `0..q`
//! are field elements and index `q` is the dummy slot. The dummy carries the
//! weight that the zero of `chi` removes, and is moved onto `|0>` with the
//! exact Gauss sum unit before the inverse trace-Fourier transform.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::{
    main_branch_of, prepare_character_state, record, Prepared, SolveOptions, SolveReport, Tally,
    Variant,
};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::number::{gauss_sum_closed_form, GaussSumSpec};
use crate::oracle::{OracleKind, Shift, ShiftOracle};
use crate::qsim::{Direction, StateVector, ZERO_AMPLITUDE};

fn field_of(oracle: &ShiftOracle) -> Result<Arc<FieldSpec>> {
    match oracle.kind() {
        OracleKind::Field(spec) => Ok(spec.clone()),
        other => Err(Error::VariantMismatch(format!("expected a field oracle, got {other:?}"))),
    }
}

/// Steps 2 to 4 on the prepared `(q+1)`-dimensional state. Returns the state
/// before measurement and the state right after the first transform.
pub(crate) fn transform_steps(mut state: StateVector, field: &FieldSpec) -> Result<(StateVector, StateVector)> {
    let q = field.q();
    state.trace_fourier_transform(field, Direction::Forward)?;
    let after_transform = state.clone();

    // chi(0) = 0, so |0> carries no weight here and takes phase +1
    if state.amplitude(0).norm() > ZERO_AMPLITUDE {
        return Err(Error::InvalidInput("amplitude at zero before phase correction".into()));
    }
    let chi: Vec<i8> = field
        .elements()
        .map(|y| field.quadratic_character(&y))
        .collect::<Result<_>>()?;
    state.apply_phase(|y| match chi.get(y) {
        Some(&v) if v != 0 => Complex64::new(f64::from(v), 0.0),
        _ => Complex64::new(1.0, 0.0),
    })?;

    let unit = gauss_sum_closed_form(&GaussSumSpec::Field(Arc::new(field.clone())))?.unit;
    state.permute_basis(|i| match i {
        0 => q,
        i if i == q => 0,
        i => i,
    })?;
    state.apply_phase(|i| if i == 0 { unit.to_complex() } else { Complex64::new(1.0, 0.0) })?;

    state.trace_fourier_transform(field, Direction::Inverse)?;
    Ok((state, after_transform))
}

/// `chi(s - s') = 0` only for the true shift; `f(1 - s') = chi(1) = 1`.
fn verify_field_shift(tally: &mut Tally<'_>, field: &FieldSpec, candidate: &FieldElement) -> Result<bool> {
    let zero_at = field.neg(candidate);
    if tally.query_field(&zero_at)? != 0 {
        return Ok(false);
    }
    Ok(tally.query_field(&field.add(&zero_at, &field.one()))? == 1)
}

/// Solves the shifted quadratic character problem over GF(p^r), p odd.
pub fn solve_sqcp<R: Rng + ?Sized>(
    oracle: &ShiftOracle,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let field = field_of(oracle)?;
    let q = field.q();
    let mut tally = Tally::new(oracle);
    let mut report = SolveReport::new(Variant::Sqcp, Shift::Field(field.zero()));
    for attempt in 1..=options.max_attempts {
        report.attempts = attempt;
        report.collapse_trials += 1;
        let mut uniform = StateVector::basis(q + 1, 0);
        uniform.qft(Direction::Forward);
        let (prepared, joint) = prepare_character_state(&mut tally, &uniform, rng)?;
        let (p_nonzero, main) = main_branch_of(&joint);
        report.exact_collapse_probability = Some(p_nonzero);
        let candidate = match prepared {
            Prepared::Zero(x) => {
                report.direct_branch = true;
                field.neg(&field.from_index(x))
            }
            Prepared::Main(state) => {
                report.direct_branch = false;
                report.collapse_accepted += 1;
                record(&mut report, options.transcript, "character-state", &state);
                let (mut out, transformed) = transform_steps(state, &field)?;
                record(&mut report, options.transcript, "after-transform", &transformed);
                record(&mut report, options.transcript, "before-measure", &out);
                let y = out.measure(rng);
                if y >= q {
                    continue;
                }
                field.neg(&field.from_index(y))
            }
        };
        if verify_field_shift(&mut tally, &field, &candidate)? {
            if let Some(main) = main {
                let (out, _) = transform_steps(main, &field)?;
                report.exact_success_probability =
                    Some(out.distribution()[field.index(&field.neg(&candidate))]);
            }
            report.recovered_s = Shift::Field(candidate);
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
pub struct SqcpAnalysis {
    /// Probability that the value register reads zero.
    pub direct_probability: f64,
    /// Main-branch state right after the first trace-Fourier transform.
    pub after_transform: StateVector,
    /// Main-branch output distribution over the `q + 1` slots.
    pub final_distribution: Vec<f64>,
}

pub fn sqcp_exact_analysis(oracle: &ShiftOracle) -> Result<SqcpAnalysis> {
    let field = field_of(oracle)?;
    let mut tally = Tally::new(oracle);
    let mut uniform = StateVector::basis(field.q() + 1, 0);
    uniform.qft(Direction::Forward);
    let joint = tally.value_query(&uniform)?;
    let (p_nonzero, main) = main_branch_of(&joint);
    let main = main.ok_or(Error::InvalidInput("empty nonzero branch".into()))?;
    let (out, after_transform) = transform_steps(main, &field)?;
    Ok(SqcpAnalysis {
        direct_probability: 1.0 - p_nonzero,
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

    fn oracle(field: &Arc<FieldSpec>, s: FieldElement) -> ShiftOracle {
        ShiftOracle::new(OracleParams::Field(field.clone()), Shift::Field(s)).unwrap()
    }

    #[test]
    fn gf9_shift() {
        let f = Arc::new(FieldSpec::new(3, 2, None).unwrap());
        let s = f.element(&[2, 1]).unwrap();
        let o = oracle(&f, s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = solve_sqcp(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_s, Shift::Field(s.clone()));
        assert_eq!(r.coherent_queries, 2 * u64::from(r.attempts));
        let a = sqcp_exact_analysis(&o).unwrap();
        let target = f.index(&f.neg(&s));
        assert!((a.final_distribution[target] - 1.0).abs() < 1e-9);
        assert!((a.direct_probability - 0.1).abs() < 1e-9);
    }

    #[test]
    fn gf25_zero_shift() {
        let f = Arc::new(FieldSpec::new(5, 2, None).unwrap());
        let o = oracle(&f, f.zero());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = solve_sqcp(&o, &mut rng, &SolveOptions::default()).unwrap();
        assert_eq!(r.recovered_s, Shift::Field(f.zero()));
    }

    #[test]
    fn prime_field_agrees_with_slsp() {
        let f = Arc::new(FieldSpec::new(7, 1, None).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for s in 0..7 {
            let fo = oracle(&f, f.constant(s));
            let lo = ShiftOracle::new(OracleParams::Legendre { p: 7 }, Shift::Int(s)).unwrap();
            let a = solve_sqcp(&fo, &mut rng, &SolveOptions::default()).unwrap();
            let b = super::super::solve_slsp(&lo, &mut rng, &SolveOptions::default()).unwrap();
            assert_eq!(a.recovered_s, Shift::Field(f.constant(s)));
            assert_eq!(b.recovered_s, Shift::Int(s));
            let an = sqcp_exact_analysis(&fo).unwrap();
            assert!((an.final_distribution[((7 - s) % 7) as usize] - 1.0).abs() < 1e-9);
        }
    }
}
