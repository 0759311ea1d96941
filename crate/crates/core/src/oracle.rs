//! Query-counting black boxes for `f_s(x) = chi(x + s)`.
//!
//! The secret shift (and, for the unknown-modulus variant, the modulus) is
//! held privately. Two counters are kept: classical evaluations and coherent
//! applications to a whole superposition.
//!
//! Superposed value queries write into a three-level result register laid
//! out as `index = 3 x + code`, with codes `0 -> 0`, `+1 -> 1`, `-1 -> 2`.
//! The oracle swaps code 0 with the code of `f(x)`, so a second application
//! uncomputes the first. Basis indices at or beyond the domain size are
//! dummy slots: they read as `+1` and take no phase.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::number::{factor_trial, is_prime, jacobi_odd};
use crate::qsim::{StateVector, ZERO_AMPLITUDE};

/// Dimension of the result register.
pub const RESULT_DIM: usize = 3;

/// Register code of a character value.
pub fn result_code(value: i8) -> usize {
    match value {
        0 => 0,
        1 => 1,
        _ => 2,
    }
}

/// Character value of a register code.
pub fn result_value(code: usize) -> i8 {
    match code {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// A shift: a residue or a field element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shift {
    Int(u64),
    Field(FieldElement),
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::Int(s) => write!(f, "{s}"),
            Shift::Field(e) => write!(f, "{e}"),
        }
    }
}

/// Parameters selecting the problem variant.
#[derive(Debug, Clone)]
pub enum OracleParams {
    Legendre { p: u64 },
    Jacobi { n: u64 },
    JacobiUnknown { n: u64, m: u64 },
    Field(Arc<FieldSpec>),
}

/// The publicly visible part of an oracle.
#[derive(Debug, Clone)]
pub enum OracleKind {
    Legendre { p: u64 },
    Jacobi { n: u64 },
    /// Only the domain size `M` is visible.
    JacobiUnknown { m: u64 },
    Field(Arc<FieldSpec>),
}

/// How a phase query treats inputs where `f_s` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroPolicy {
    /// Use phase `+1` where `f_s(x) = 0`.
    AsPlusOne,
    /// Fail if any amplitude sits on a zero of `f_s`.
    Reject,
}

enum Secret {
    Residue { modulus: u64, s: u64 },
    Field { spec: Arc<FieldSpec>, s: FieldElement },
}

/// Black box for one of the four shifted character problems.
pub struct ShiftOracle {
    kind: OracleKind,
    secret: Secret,
    queries: AtomicU64,
    coherent_queries: AtomicU64,
}

impl fmt::Debug for ShiftOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftOracle")
            .field("kind", &self.kind)
            .field("queries", &self.query_count())
            .field("coherent_queries", &self.phase_query_count())
            .finish_non_exhaustive()
    }
}

fn check_odd_squarefree(n: u64) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenInput(n));
    }
    factor_trial(n).map(|_| ())
}

impl ShiftOracle {
    pub fn new(params: OracleParams, shift: Shift) -> Result<Self> {
        let (kind, secret) = match (params, shift) {
            (OracleParams::Legendre { p }, Shift::Int(s)) => {
                if p == 2 || !is_prime(p) {
                    return Err(Error::NotOddPrime(p));
                }
                (OracleKind::Legendre { p }, Secret::Residue { modulus: p, s })
            }
            (OracleParams::Jacobi { n }, Shift::Int(s)) => {
                check_odd_squarefree(n)?;
                (OracleKind::Jacobi { n }, Secret::Residue { modulus: n, s })
            }
            (OracleParams::JacobiUnknown { n, m }, Shift::Int(s)) => {
                check_odd_squarefree(n)?;
                if (n as u128) * (n as u128) >= m as u128 {
                    return Err(Error::ModulusTooLargeForM { n, m });
                }
                (OracleKind::JacobiUnknown { m }, Secret::Residue { modulus: n, s })
            }
            (OracleParams::Field(spec), Shift::Field(s)) => {
                if spec.p() == 2 {
                    return Err(Error::EvenCharacteristic);
                }
                spec.element(s.coeffs()).map_err(|_| Error::ShiftOutOfRange)?;
                (
                    OracleKind::Field(spec.clone()),
                    Secret::Field { spec, s },
                )
            }
            (params, shift) => {
                return Err(Error::VariantMismatch(format!(
                    "shift {shift} does not fit {params:?}"
                )))
            }
        };
        if let Secret::Residue { modulus, s } = secret {
            if s >= modulus {
                return Err(Error::ShiftOutOfRange);
            }
        }
        Ok(Self {
            kind,
            secret,
            queries: AtomicU64::new(0),
            coherent_queries: AtomicU64::new(0),
        })
    }

    /// Draws the shift uniformly from the variant's shift domain.
    pub fn with_random_shift<R: Rng + ?Sized>(params: OracleParams, rng: &mut R) -> Result<Self> {
        let shift = match &params {
            OracleParams::Legendre { p } => Shift::Int(rng.gen_range(0..*p)),
            OracleParams::Jacobi { n } | OracleParams::JacobiUnknown { n, .. } => {
                Shift::Int(rng.gen_range(0..*n))
            }
            OracleParams::Field(spec) => Shift::Field(spec.from_index(rng.gen_range(0..spec.q()))),
        };
        Self::new(params, shift)
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    /// Size of the query domain: `p`, `n`, `M` or `q`.
    pub fn domain_size(&self) -> usize {
        match &self.kind {
            OracleKind::Legendre { p } => *p as usize,
            OracleKind::Jacobi { n } => *n as usize,
            OracleKind::JacobiUnknown { m } => *m as usize,
            OracleKind::Field(spec) => spec.q(),
        }
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn phase_query_count(&self) -> u64 {
        self.coherent_queries.load(Ordering::Relaxed)
    }

    /// Secret parameters: the shift and, for every integer variant, the
    /// modulus it lives in.
    #[cfg(feature = "audit")]
    pub fn reveal_secret(&self) -> (Shift, Option<u64>) {
        match &self.secret {
            Secret::Residue { modulus, s } => (Shift::Int(*s), Some(*modulus)),
            Secret::Field { s, .. } => (Shift::Field(s.clone()), None),
        }
    }

    /// `f_s` at a basis index, without counting.
    fn eval(&self, index: usize) -> i8 {
        match &self.secret {
            Secret::Residue { modulus, s } => {
                let x = (index as u64 % modulus + s) % modulus;
                jacobi_odd(x, *modulus)
            }
            Secret::Field { spec, s } => {
                let x = spec.add(&spec.from_index(index), s);
                spec.quadratic_character(&x).expect("odd characteristic")
            }
        }
    }

    /// Classical query at an integer point of `Z_p`, `Z_n` or `Z_M`.
    pub fn query(&self, x: u64) -> Result<i8> {
        if matches!(self.kind, OracleKind::Field(_)) {
            return Err(Error::DomainViolation("field oracle takes field elements".into()));
        }
        if x >= self.domain_size() as u64 {
            return Err(Error::DomainViolation(format!(
                "{x} outside domain of size {}",
                self.domain_size()
            )));
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.eval(x as usize))
    }

    /// Classical query at a field element.
    pub fn query_field(&self, x: &FieldElement) -> Result<i8> {
        let OracleKind::Field(spec) = &self.kind else {
            return Err(Error::DomainViolation("integer oracle takes integers".into()));
        };
        let x = spec
            .element(x.coeffs())
            .map_err(|e| Error::DomainViolation(e.to_string()))?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.eval(spec.index(&x)))
    }

    /// Number of leading basis indices that are real domain points for a
    /// state of dimension `dim`.
    fn evaluated_prefix(&self, dim: usize) -> Result<usize> {
        let domain = self.domain_size();
        let sub_domain_ok = matches!(self.kind, OracleKind::JacobiUnknown { .. });
        if dim < domain && !sub_domain_ok {
            return Err(Error::DimensionMismatch {
                expected: domain,
                actual: dim,
            });
        }
        Ok(dim.min(domain))
    }

    /// Multiplies each amplitude by `f_s(x)`; one coherent query.
    pub fn phase_query(&self, state: &mut StateVector, policy: ZeroPolicy) -> Result<()> {
        let active = self.evaluated_prefix(state.dim())?;
        let values: Vec<i8> = (0..active).map(|x| self.eval(x)).collect();
        if policy == ZeroPolicy::Reject {
            if let Some(x) = (0..active).find(|&x| values[x] == 0 && state.amplitude(x).norm() > ZERO_AMPLITUDE) {
                return Err(Error::DomainViolation(format!("amplitude on zero of f_s at {x}")));
            }
        }
        self.coherent_queries.fetch_add(1, Ordering::Relaxed);
        state.apply_phase(|x| {
            let v = if x < active { values[x] } else { 1 };
            Complex64::new(if v == 0 { 1.0 } else { f64::from(v) }, 0.0)
        })
    }

    /// Attaches a result register in `|0>` and evaluates `|x,0> -> |x,f(x)>`;
    /// one coherent query.
    pub fn value_query_superposed(&self, state: &StateVector) -> Result<StateVector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); state.dim() * RESULT_DIM];
        for (x, &a) in state.amplitudes().iter().enumerate() {
            amps[x * RESULT_DIM] = a;
        }
        let mut joint = StateVector::from_amplitudes(amps)?;
        self.apply_value_oracle(&mut joint)?;
        Ok(joint)
    }

    /// The involution swapping result codes `0` and `code(f(x))`; one
    /// coherent query.
    pub fn apply_value_oracle(&self, joint: &mut StateVector) -> Result<()> {
        if !joint.dim().is_multiple_of(RESULT_DIM) {
            return Err(Error::DimensionMismatch {
                expected: joint.dim().next_multiple_of(RESULT_DIM),
                actual: joint.dim(),
            });
        }
        let dim = joint.dim() / RESULT_DIM;
        let active = self.evaluated_prefix(dim)?;
        let codes: Vec<usize> = (0..dim)
            .map(|x| if x < active { result_code(self.eval(x)) } else { 1 })
            .collect();
        self.coherent_queries.fetch_add(1, Ordering::Relaxed);
        joint.permute_basis(|i| {
            let (x, c) = (i / RESULT_DIM, i % RESULT_DIM);
            let f = codes[x];
            let swapped = if c == 0 {
                f
            } else if c == f {
                0
            } else {
                c
            };
            x * RESULT_DIM + swapped
        })
    }
}

/// Multiplies `|x, v>` by `v` (with `0` read as `+1`).
pub fn apply_result_phase(joint: &mut StateVector) -> Result<()> {
    joint.apply_phase(|i| {
        let v = result_value(i % RESULT_DIM);
        Complex64::new(if v == 0 { 1.0 } else { f64::from(v) }, 0.0)
    })
}

/// Drops a result register that is back in `|0>`.
pub fn discard_result_register(joint: &StateVector) -> Result<StateVector> {
    if !joint.dim().is_multiple_of(RESULT_DIM) {
        return Err(Error::DimensionMismatch {
            expected: joint.dim().next_multiple_of(RESULT_DIM),
            actual: joint.dim(),
        });
    }
    let leftover: f64 = joint
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i % RESULT_DIM != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if leftover > 1e-18 {
        return Err(Error::InvalidInput(format!(
            "result register not cleared (weight {leftover})"
        )));
    }
    StateVector::normalized(joint.amplitudes().iter().step_by(RESULT_DIM).copied().collect())
}

/// Whether a joint-register index carries a nonzero character value.
pub fn result_is_nonzero(index: usize) -> bool {
    !index.is_multiple_of(RESULT_DIM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::legendre;
    use crate::qsim::max_deviation;

    fn legendre_oracle(p: u64, s: u64) -> ShiftOracle {
        ShiftOracle::new(OracleParams::Legendre { p }, Shift::Int(s)).unwrap()
    }

    #[test]
    fn construction_examples() {
        let o = legendre_oracle(7, 3);
        assert_eq!(o.query(0).unwrap(), legendre(3, 7).unwrap());
        assert_eq!(o.query(0).unwrap(), -1);
        let j = ShiftOracle::new(OracleParams::Jacobi { n: 15 }, Shift::Int(0)).unwrap();
        for x in 0..15 {
            assert_eq!(j.query(x).unwrap(), crate::number::jacobi(x as i64, 15).unwrap());
        }
        assert_eq!(
            ShiftOracle::new(OracleParams::JacobiUnknown { n: 15, m: 224 }, Shift::Int(0)).unwrap_err(),
            Error::ModulusTooLargeForM { n: 15, m: 224 }
        );
        assert!(ShiftOracle::new(OracleParams::JacobiUnknown { n: 15, m: 226 }, Shift::Int(0)).is_ok());
        assert_eq!(
            ShiftOracle::new(OracleParams::Jacobi { n: 45 }, Shift::Int(0)).unwrap_err(),
            Error::NotSquareFree(45)
        );
        assert_eq!(
            ShiftOracle::new(OracleParams::Legendre { p: 7 }, Shift::Int(7)).unwrap_err(),
            Error::ShiftOutOfRange
        );
    }

    #[test]
    fn query_examples() {
        let o = legendre_oracle(7, 3);
        assert_eq!(o.query(4).unwrap(), 0);
        assert_eq!(o.query_count(), 1);
        assert!(matches!(o.query(7), Err(Error::DomainViolation(_))));
        let u = ShiftOracle::new(OracleParams::JacobiUnknown { n: 15, m: 300 }, Shift::Int(2)).unwrap();
        assert_eq!(u.domain_size(), 300);
        assert_eq!(u.query(1).unwrap(), 0);
        assert_eq!(u.query(16).unwrap(), 0);
        assert_eq!(u.query(2).unwrap(), 1);
        assert_eq!(u.query(17).unwrap(), 1);
        let f = Arc::new(FieldSpec::new(3, 2, None).unwrap());
        let fo = ShiftOracle::new(OracleParams::Field(f.clone()), Shift::Field(f.zero())).unwrap();
        assert_eq!(fo.query_field(&f.one()).unwrap(), 1);
        assert!(fo.query(1).is_err());
    }

    #[test]
    fn phase_query_examples() {
        let o = legendre_oracle(7, 0);
        let mut s = StateVector::uniform(7);
        o.phase_query(&mut s, ZeroPolicy::AsPlusOne).unwrap();
        let c = 1.0 / 7f64.sqrt();
        let expected: Vec<Complex64> = [1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0]
            .iter()
            .map(|&v| Complex64::new(v * c, 0.0))
            .collect();
        assert!(max_deviation(s.amplitudes(), &expected) < 1e-12);
        assert_eq!(o.phase_query_count(), 1);

        let mut b = StateVector::basis(7, 3);
        o.phase_query(&mut b, ZeroPolicy::Reject).unwrap();
        assert_eq!(b.amplitude(3), Complex64::new(-1.0, 0.0));
        let mut z = StateVector::basis(7, 0);
        assert!(matches!(
            o.phase_query(&mut z, ZeroPolicy::Reject),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            o.phase_query(&mut StateVector::uniform(5), ZeroPolicy::AsPlusOne),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn value_query_examples() {
        let o = ShiftOracle::new(OracleParams::Jacobi { n: 15 }, Shift::Int(0)).unwrap();
        let joint = o.value_query_superposed(&StateVector::uniform(15)).unwrap();
        let (p, _) = joint.project(result_is_nonzero);
        assert!((p - 8.0 / 15.0).abs() < 1e-12);

        let basis = o.value_query_superposed(&StateVector::basis(15, 2)).unwrap();
        assert_eq!(basis.distribution()[2 * RESULT_DIM + result_code(1)], 1.0);

        let mut twice = o.value_query_superposed(&StateVector::uniform(15)).unwrap();
        o.apply_value_oracle(&mut twice).unwrap();
        let back = discard_result_register(&twice).unwrap();
        assert!(max_deviation(back.amplitudes(), StateVector::uniform(15).amplitudes()) < 1e-12);
        assert_eq!(o.phase_query_count(), 4);
        assert!(discard_result_register(&joint).is_err());
    }

    #[test]
    fn dummy_slots_read_plus_one() {
        let f = Arc::new(FieldSpec::new(3, 2, None).unwrap());
        let o = ShiftOracle::new(OracleParams::Field(f), Shift::Field(FieldSpec::new(3, 2, None).unwrap().one())).unwrap();
        let joint = o.value_query_superposed(&StateVector::basis(10, 9)).unwrap();
        assert_eq!(joint.distribution()[9 * RESULT_DIM + 1], 1.0);
    }

    #[test]
    fn debug_hides_secret() {
        let o = ShiftOracle::new(OracleParams::JacobiUnknown { n: 15, m: 300 }, Shift::Int(7)).unwrap();
        let text = format!("{o:?}");
        assert!(text.contains("300"));
        assert!(!text.contains("15"));
    }
}
