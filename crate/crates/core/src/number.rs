//! Integer-side primitives: residue symbols, CRT, trial factoring, continued
//! fractions and quadratic Gauss sums.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Largest domain a brute-force Gauss sum will enumerate.
pub const GAUSS_BRUTEFORCE_LIMIT: u64 = 1_000_000;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut twos = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        twos += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduces a signed integer into `0..m`.
#[inline]
pub fn reduce(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// Modular inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Legendre symbol `(x/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(x: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let a = reduce(x, p);
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Jacobi symbol `(x/n)` for odd `n`, by quadratic reciprocity.
///
/// No factorization of `n` is performed.
pub fn jacobi(x: i64, n: u64) -> Result<i8> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    Ok(jacobi_odd(reduce(x, n), n))
}

/// Reciprocity loop; `n` must be odd and `a < n`.
pub(crate) fn jacobi_odd(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut sign = 1i8;
    a %= n;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// An odd square-free integer together with its sorted prime factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredOddSquarefree {
    n: u64,
    factors: Vec<u64>,
}

impl FactoredOddSquarefree {
    /// Factors `n` by trial division.
    pub fn new(n: u64) -> Result<Self> {
        factor_trial(n)
    }

    /// Builds the value from a list of distinct odd primes.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::InvalidInput("empty prime list".into()));
        }
        let mut factors = primes.to_vec();
        factors.sort_unstable();
        let mut n = 1u64;
        for (i, &p) in factors.iter().enumerate() {
            if p == 2 || !is_prime(p) {
                return Err(Error::NotOddPrime(p));
            }
            n = n
                .checked_mul(p)
                .ok_or_else(|| Error::InvalidInput("product overflows u64".into()))?;
            if i > 0 && factors[i - 1] == p {
                return Err(Error::NotSquareFree(n));
            }
        }
        Ok(Self { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }
}

/// Trial division up to `sqrt(n)`; rejects even and non-square-free input.
pub fn factor_trial(n: u64) -> Result<FactoredOddSquarefree> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenInput(n));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("{n} has no odd prime factor")));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 3u64;
    while d.saturating_mul(d) <= rest {
        if rest.is_multiple_of(d) {
            rest /= d;
            if rest.is_multiple_of(d) {
                return Err(Error::NotSquareFree(n));
            }
            factors.push(d);
        }
        d += 2;
    }
    if rest > 1 {
        factors.push(rest);
    }
    Ok(FactoredOddSquarefree { n, factors })
}

/// `phi(n) = prod (p_i - 1)` for square-free `n`.
pub fn euler_phi(moduli: &FactoredOddSquarefree) -> u64 {
    moduli.factors.iter().map(|p| p - 1).product()
}

/// `x -> (x mod p_1, ..., x mod p_k)`.
pub fn crt_split(x: u64, moduli: &FactoredOddSquarefree) -> Vec<u64> {
    moduli.factors.iter().map(|p| x % p).collect()
}

/// Inverse of [`crt_split`].
///
/// # Panics
/// If the residue count differs from the factor count or a residue is not
/// reduced.
pub fn crt_compose(residues: &[u64], moduli: &FactoredOddSquarefree) -> u64 {
    assert_eq!(residues.len(), moduli.factors.len(), "one residue per factor");
    let n = moduli.n;
    let mut acc = 0u64;
    for (&r, &p) in residues.iter().zip(&moduli.factors) {
        assert!(r < p, "residue {r} not reduced mod {p}");
        let rest = n / p;
        let inv = inv_mod(rest % p, p).expect("factors are pairwise coprime");
        let term = mul_mod(mul_mod(r, inv, p), rest, n);
        acc = (acc + term) % n;
    }
    acc
}

/// Fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    /// # Panics
    /// If `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Convergents of the continued fraction of `i/m`, ending at `i/m` reduced.
///
/// # Panics
/// Unless `0 <= i < m`.
pub fn convergents(i: u64, m: u64) -> Vec<Fraction> {
    assert!(i < m, "need 0 <= i < M");
    let (mut a, mut b) = (i as u128, m as u128);
    // h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1
    let (mut h1, mut h2) = (1u128, 0u128);
    let (mut k1, mut k2) = (0u128, 1u128);
    let mut out = Vec::new();
    loop {
        let q = a / b;
        let h = q * h1 + h2;
        let k = q * k1 + k2;
        out.push(Fraction {
            num: h as u64,
            den: k as u64,
        });
        let rem = a - q * b;
        if rem == 0 {
            break;
        }
        (a, b) = (b, rem);
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    out
}

/// The convergent of `i/m` with the largest denominator not exceeding
/// `floor(sqrt(m))`.
pub fn best_convergent(i: u64, m: u64) -> Fraction {
    let bound = isqrt(m);
    convergents(i, m)
        .into_iter().rfind(|c| c.den <= bound)
        .unwrap_or(Fraction { num: 0, den: 1 })
}

pub fn isqrt(m: u64) -> u64 {
    let mut r = (m as f64).sqrt() as u64;
    while r.saturating_mul(r) > m {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= m {
        r += 1;
    }
    r
}

/// A fourth root of unity `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit4 {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Unit4 {
    /// `i^k`.
    pub fn from_exponent(k: u64) -> Self {
        match k % 4 {
            0 => Unit4::One,
            1 => Unit4::I,
            2 => Unit4::MinusOne,
            _ => Unit4::MinusI,
        }
    }

    pub fn exponent(self) -> u64 {
        match self {
            Unit4::One => 0,
            Unit4::I => 1,
            Unit4::MinusOne => 2,
            Unit4::MinusI => 3,
        }
    }

    pub fn mul(self, other: Unit4) -> Unit4 {
        Unit4::from_exponent(self.exponent() + other.exponent())
    }

    pub fn conj(self) -> Unit4 {
        Unit4::from_exponent(4 - self.exponent())
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Unit4::One => Complex64::new(1.0, 0.0),
            Unit4::I => Complex64::new(0.0, 1.0),
            Unit4::MinusOne => Complex64::new(-1.0, 0.0),
            Unit4::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// An exact Gauss sum value `unit * sqrt(radicand)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactGauss {
    pub unit: Unit4,
    pub radicand: u64,
}

impl ExactGauss {
    pub fn to_complex(self) -> Complex64 {
        self.unit.to_complex() * (self.radicand as f64).sqrt()
    }
}

impl fmt::Display for ExactGauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.unit {
            Unit4::One => "",
            Unit4::I => "i*",
            Unit4::MinusOne => "-",
            Unit4::MinusI => "-i*",
        };
        write!(f, "{prefix}sqrt({})", self.radicand)
    }
}

/// Which quadratic Gauss sum to evaluate.
#[derive(Debug, Clone)]
pub enum GaussSumSpec {
    RingZp(u64),
    RingZn(FactoredOddSquarefree),
    Field(Arc<FieldSpec>),
}

impl GaussSumSpec {
    /// Number of terms in the defining sum.
    pub fn domain_size(&self) -> u64 {
        match self {
            GaussSumSpec::RingZp(p) => *p,
            GaussSumSpec::RingZn(n) => n.n(),
            GaussSumSpec::Field(f) => f.q() as u64,
        }
    }
}

/// Unit of `G(F_{p^r})` from the sign table: depends on `p mod 4` and `r`.
pub fn field_gauss_unit(p: u64, r: u64) -> Unit4 {
    if p % 4 == 1 {
        if r.is_multiple_of(2) {
            Unit4::MinusOne
        } else {
            Unit4::One
        }
    } else {
        match r % 4 {
            0 => Unit4::MinusOne,
            1 => Unit4::I,
            2 => Unit4::One,
            _ => Unit4::MinusI,
        }
    }
}

/// `(-1)^(r-1) * i^(r (p-1)^2 / 4)`, the same unit written as one formula.
pub fn field_gauss_unit_formula(p: u64, r: u64) -> Unit4 {
    let half = (p - 1) / 2;
    let exponent = (r % 4) * ((half % 4) * (half % 4) % 4);
    let sign = if r % 2 == 1 { Unit4::One } else { Unit4::MinusOne };
    sign.mul(Unit4::from_exponent(exponent))
}

/// Tabulated closed form of the quadratic Gauss sum.
pub fn gauss_sum_closed_form(spec: &GaussSumSpec) -> Result<ExactGauss> {
    match spec {
        GaussSumSpec::RingZp(p) => {
            if *p == 2 || !is_prime(*p) {
                return Err(Error::UnsupportedParameters(format!(
                    "{p} is not an odd prime"
                )));
            }
            let unit = if p % 4 == 1 { Unit4::One } else { Unit4::I };
            Ok(ExactGauss { unit, radicand: *p })
        }
        GaussSumSpec::RingZn(n) => {
            let unit = if n.n() % 4 == 1 { Unit4::One } else { Unit4::I };
            Ok(ExactGauss {
                unit,
                radicand: n.n(),
            })
        }
        GaussSumSpec::Field(f) => {
            if f.p() == 2 {
                return Err(Error::UnsupportedParameters(
                    "characteristic 2 has no quadratic Gauss sum".into(),
                ));
            }
            Ok(ExactGauss {
                unit: field_gauss_unit(f.p(), f.r() as u64),
                radicand: f.q() as u64,
            })
        }
    }
}

#[inline]
fn root_of_unity(k: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % m) as f64 / m as f64)
}

/// The literal defining sum, in double precision.
pub fn gauss_sum_bruteforce(spec: &GaussSumSpec) -> Result<Complex64> {
    let size = spec.domain_size();
    if size > GAUSS_BRUTEFORCE_LIMIT {
        return Err(Error::DomainTooLarge {
            size,
            limit: GAUSS_BRUTEFORCE_LIMIT,
        });
    }
    match spec {
        GaussSumSpec::RingZp(p) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..*p {
                acc += root_of_unity(x, *p) * f64::from(legendre(x as i64, *p)?);
            }
            Ok(acc)
        }
        GaussSumSpec::RingZn(n) => {
            let n = n.n();
            Ok((0..n)
                .map(|x| root_of_unity(x, n) * f64::from(jacobi_odd(x, n)))
                .sum())
        }
        GaussSumSpec::Field(f) => {
            let p = f.p();
            let mut acc = Complex64::new(0.0, 0.0);
            for x in f.elements() {
                let chi = f.quadratic_character(&x)?;
                acc += root_of_unity(f.trace(&x), p) * f64::from(chi);
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(p: u64) -> Vec<u64> {
        let mut s: Vec<u64> = (1..p).map(|y| y * y % p).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(561));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, 7).unwrap(), 0);
        assert_eq!(legendre(1, 13).unwrap(), 1);
        assert_eq!(squares(7), vec![1, 2, 4]);
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
        assert_eq!(legendre(3, 9), Err(Error::NotOddPrime(9)));
        assert_eq!(legendre(3, 2), Err(Error::NotOddPrime(2)));
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let sq = squares(p);
            for x in 1..p {
                let expected = if sq.binary_search(&x).is_ok() { 1 } else { -1 };
                assert_eq!(legendre(x as i64, p).unwrap(), expected);
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(2, 9).unwrap(), 1);
        assert_eq!(jacobi(3, 15).unwrap(), 0);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(5, 1).unwrap(), 1);
        assert_eq!(jacobi(1, 10), Err(Error::EvenModulus(10)));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_trial(15).unwrap().factors(), &[3, 5]);
        assert_eq!(factor_trial(3).unwrap().factors(), &[3]);
        assert_eq!(factor_trial(9), Err(Error::NotSquareFree(9)));
        assert_eq!(factor_trial(10), Err(Error::EvenInput(10)));
        assert_eq!(factor_trial(1155).unwrap().factors(), &[3, 5, 7, 11]);
        assert_eq!(factor_trial(999_999_000_001).unwrap().n(), 999_999_000_001);
    }

    #[test]
    fn phi_examples() {
        let f = |n| euler_phi(&factor_trial(n).unwrap());
        assert_eq!(f(15), 8);
        assert_eq!((1..15u64).filter(|&x| gcd(x, 15) == 1).count(), 8);
        assert_eq!(f(13), 12);
        assert_eq!(f(105), 48);
    }

    #[test]
    fn crt_examples() {
        let m = factor_trial(15).unwrap();
        assert_eq!(crt_split(7, &m), vec![1, 2]);
        assert_eq!(crt_compose(&[1, 2], &m), 7);
        assert_eq!(crt_split(0, &factor_trial(105).unwrap()), vec![0, 0, 0]);
    }

    #[test]
    fn from_primes_validates() {
        assert_eq!(
            FactoredOddSquarefree::from_primes(&[5, 3]).unwrap(),
            factor_trial(15).unwrap()
        );
        assert_eq!(
            FactoredOddSquarefree::from_primes(&[3, 3]),
            Err(Error::NotSquareFree(9))
        );
        assert_eq!(
            FactoredOddSquarefree::from_primes(&[2, 3]),
            Err(Error::NotOddPrime(2))
        );
    }

    #[test]
    fn convergent_examples() {
        let show = |v: Vec<Fraction>| v.iter().map(|f| f.to_string()).collect::<Vec<_>>();
        assert_eq!(show(convergents(0, 16)), ["0/1"]);
        assert_eq!(
            show(convergents(68, 256)),
            ["0/1", "1/3", "1/4", "4/15", "17/64"]
        );
        assert_eq!(show(convergents(1, 7)), ["0/1", "1/7"]);
        assert_eq!(best_convergent(68, 256), Fraction::new(4, 15));
    }

    #[test]
    fn gauss_closed_forms() {
        let zp = |p| gauss_sum_closed_form(&GaussSumSpec::RingZp(p)).unwrap();
        assert_eq!(zp(5).to_string(), "sqrt(5)");
        assert_eq!(zp(7).to_string(), "i*sqrt(7)");
        let zn = gauss_sum_closed_form(&GaussSumSpec::RingZn(factor_trial(15).unwrap())).unwrap();
        assert_eq!(zn.to_string(), "i*sqrt(15)");
        let f9 = Arc::new(FieldSpec::new(3, 2, None).unwrap());
        let g = gauss_sum_closed_form(&GaussSumSpec::Field(f9)).unwrap();
        assert_eq!(g.unit, Unit4::One);
        assert_eq!(g.to_string(), "sqrt(9)");
        assert!(gauss_sum_closed_form(&GaussSumSpec::RingZp(9)).is_err());
    }

    #[test]
    fn gauss_bruteforce_examples() {
        let g5 = gauss_sum_bruteforce(&GaussSumSpec::RingZp(5)).unwrap();
        assert!((g5 - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-9);
        let g15 = gauss_sum_bruteforce(&GaussSumSpec::RingZn(factor_trial(15).unwrap())).unwrap();
        assert!((g15 - Complex64::new(0.0, 3.872_983_346_207_417)).norm() < 1e-9);
        let f9 = Arc::new(FieldSpec::new(3, 2, None).unwrap());
        let g9 = gauss_sum_bruteforce(&GaussSumSpec::Field(f9)).unwrap();
        assert!((g9 - Complex64::new(3.0, 0.0)).norm() < 1e-9);
        assert!(matches!(
            gauss_sum_bruteforce(&GaussSumSpec::RingZp(1_000_003)),
            Err(Error::DomainTooLarge { .. })
        ));
    }

    #[test]
    fn sign_table_matches_formula() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            for r in 1..=12 {
                assert_eq!(field_gauss_unit(p, r), field_gauss_unit_formula(p, r), "p={p} r={r}");
            }
        }
    }

    #[test]
    fn unit_arithmetic() {
        assert_eq!(Unit4::I.mul(Unit4::I), Unit4::MinusOne);
        assert_eq!(Unit4::I.conj(), Unit4::MinusI);
        assert_eq!(Unit4::from_exponent(49), Unit4::I);
    }
}
