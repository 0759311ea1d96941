//! GF(p^r) as `Z_p[X]` modulo a monic irreducible polynomial of degree `r`.
//!
//! Elements are fixed-length coefficient vectors `x = sum x_j X^j`, always
//! reduced, so equality of elements is equality of vectors. Elements are
//! numbered by `index(x) = sum x_j p^j`; this ordering is also the basis
//! order used by the statevector simulator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::is_prime;

/// A concrete model of GF(p^r). Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    r: usize,
    q: usize,
    /// `r + 1` coefficients, low degree first, monic.
    modulus: Vec<u64>,
    /// `Tr(X^j)` for `j < 2r - 1`.
    trace_powers: Vec<u64>,
    /// Inverse of `M[i][j] = Tr(X^(i+j))` over Z_p.
    trace_matrix_inv: Vec<Vec<u64>>,
}

/// An element of a [`FieldSpec`]: exactly `r` reduced coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coeffs(&self.coeffs))
    }
}

/// Field operation selector for [`FieldSpec::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parses `"1,0,1"` (low degree first) into coefficients.
pub fn parse_coeffs(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))
        })
        .collect()
}

pub fn format_coeffs(coeffs: &[u64]) -> String {
    coeffs
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn trim(mut poly: Vec<u64>) -> Vec<u64> {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
    poly
}

/// Remainder of `a` modulo the monic polynomial `b` over Z_p.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return trim(rem);
    }
    for k in (db..rem.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        for (i, &bi) in b.iter().enumerate() {
            let slot = &mut rem[k - db + i];
            *slot = (*slot + p - c * bi % p) % p;
        }
    }
    rem.truncate(db);
    trim(rem)
}

/// Exhaustive irreducibility test: trial division of the monic `poly` by
/// every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u64, poly: &[u64]) -> bool {
    let poly = trim(poly.iter().map(|c| c % p).collect());
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        let mut divisor = vec![0u64; d + 1];
        divisor[d] = 1;
        for idx in 0..count {
            let mut rest = idx;
            for c in divisor.iter_mut().take(d) {
                *c = (rest % p as usize) as u64;
                rest /= p as usize;
            }
            if poly_rem(&poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `r`, enumerating the lower
/// coefficients as a base-p counter with the constant term varying fastest.
fn default_modulus(p: u64, r: usize) -> Vec<u64> {
    let count = (p as usize).pow(r as u32);
    let mut poly = vec![0u64; r + 1];
    poly[r] = 1;
    for idx in 0..count {
        let mut rest = idx;
        for c in poly.iter_mut().take(r) {
            *c = (rest % p as usize) as u64;
            rest /= p as usize;
        }
        if is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Inverts a square matrix over Z_p by Gauss-Jordan elimination.
fn invert_mod_p(m: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        let inv = crate::number::inv_mod(a[col][col], p)?;
        for v in a[col].iter_mut() {
            *v = *v * inv % p;
        }
        for row in 0..n {
            if row != col && a[row][col] != 0 {
                let factor = a[row][col];
                for k in 0..2 * n {
                    let sub = factor * a[col][k] % p;
                    a[row][k] = (a[row][k] + p - sub) % p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl FieldSpec {
    /// Builds GF(p^r). Without a modulus the smallest monic irreducible
    /// polynomial of degree `r` is used.
    pub fn new(p: u64, r: usize, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::InvalidModulus("degree must be positive".into()));
        }
        let q = (p as usize)
            .checked_pow(r as u32)
            .filter(|&q| q <= 1 << 24)
            .ok_or_else(|| Error::UnsupportedParameters(format!("{p}^{r} is too large")))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r + 1 || m[r] != 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected a monic polynomial of degree {r}, got {}",
                        format_coeffs(m)
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus("coefficients must be reduced mod p".into()));
                }
                if !is_irreducible(p, m) {
                    return Err(Error::ReducibleModulus { p });
                }
                m.to_vec()
            }
            None => default_modulus(p, r),
        };
        let mut spec = Self {
            p,
            r,
            q,
            modulus,
            trace_powers: Vec::new(),
            trace_matrix_inv: Vec::new(),
        };
        spec.trace_powers = (0..2 * r - 1)
            .map(|j| spec.trace_by_power_sum(&spec.x_pow(j as u64)))
            .collect::<Result<_>>()?;
        let matrix: Vec<Vec<u64>> = (0..r)
            .map(|i| (0..r).map(|j| spec.trace_powers[i + j]).collect())
            .collect();
        spec.trace_matrix_inv = invert_mod_p(&matrix, p).ok_or(Error::SingularTraceMatrix)?;
        Ok(spec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Validates and wraps a coefficient vector.
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.r {
            return Err(Error::InvalidElement(format!(
                "expected {} coefficients, got {}",
                self.r,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::InvalidElement(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        self.element(&parse_coeffs(text)?)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.r],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> FieldElement {
        let mut coeffs = vec![0; self.r];
        coeffs[0] = c % self.p;
        FieldElement { coeffs }
    }

    /// The class of `X`. For `r = 1` this is the root of the linear modulus.
    pub fn generator(&self) -> FieldElement {
        if self.r == 1 {
            self.constant((self.p - self.modulus[0]) % self.p)
        } else {
            let mut coeffs = vec![0; self.r];
            coeffs[1] = 1;
            FieldElement { coeffs }
        }
    }

    fn x_pow(&self, j: u64) -> FieldElement {
        self.pow(&self.generator(), j)
    }

    /// Basis index `sum x_j p^j`.
    pub fn index(&self, x: &FieldElement) -> usize {
        x.coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    /// # Panics
    /// If `index >= q`.
    pub fn from_index(&self, index: usize) -> FieldElement {
        assert!(index < self.q, "index {index} outside field of size {}", self.q);
        let p = self.p as usize;
        let mut rest = index;
        let coeffs = (0..self.r)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c as u64
            })
            .collect();
        FieldElement { coeffs }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |i| self.from_index(i))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: u64, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| x * (c % self.p) % self.p).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let r = self.r;
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        for k in (r..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..r {
                let slot = &mut prod[k - r + i];
                *slot = (*slot + p - c * self.modulus[i] % p) % p;
            }
        }
        prod.truncate(r);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, base: &FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn arith(&self, a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        self.element(&a.coeffs).map(|_| ())
    }

    /// `sum_j x^(p^j)` evaluated in the field; must land in the prime field.
    fn trace_by_power_sum(&self, x: &FieldElement) -> Result<u64> {
        let mut term = x.clone();
        let mut acc = self.zero();
        for _ in 0..self.r {
            acc = self.add(&acc, &term);
            term = self.pow(&term, self.p);
        }
        if acc.coeffs[1..].iter().any(|&c| c != 0) {
            return Err(Error::SingularTraceMatrix);
        }
        Ok(acc.coeffs[0])
    }

    /// `Tr(x) = sum_j x_j Tr(X^j)` using the precomputed traces of powers.
    pub fn trace(&self, x: &FieldElement) -> u64 {
        x.coeffs
            .iter()
            .zip(&self.trace_powers)
            .fold(0, |acc, (&c, &t)| (acc + c * t) % self.p)
    }

    /// Quadratic character via `x^((q-1)/2)`.
    pub fn quadratic_character(&self, x: &FieldElement) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if x.is_zero() {
            return Ok(0);
        }
        let e = self.pow(x, (self.q as u64 - 1) / 2);
        if e == self.one() {
            Ok(1)
        } else {
            debug_assert_eq!(e, self.constant(self.p - 1));
            Ok(-1)
        }
    }

    /// `T(x) = [Tr(x), Tr(xX), ..., Tr(xX^(r-1))]`.
    pub fn trace_coordinates(&self, x: &FieldElement) -> Vec<u64> {
        (0..self.r)
            .map(|i| {
                x.coeffs
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &c)| (acc + c * self.trace_powers[i + j]) % self.p)
            })
            .collect()
    }

    /// Solves `T(x) = coords` for `x`.
    pub fn from_trace_coordinates(&self, coords: &[u64]) -> Result<FieldElement> {
        if coords.len() != self.r || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidElement(format!(
                "trace coordinates {} do not fit the field",
                format_coeffs(coords)
            )));
        }
        let coeffs = self
            .trace_matrix_inv
            .iter()
            .map(|row| row.iter().zip(coords).fold(0, |acc, (&m, &c)| (acc + m * c) % self.p))
            .collect();
        Ok(FieldElement { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> FieldSpec {
        FieldSpec::new(3, 2, Some(&[1, 0, 1])).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f3 = FieldSpec::new(3, 1, None).unwrap();
        assert_eq!(f3.modulus(), &[0, 1]);
        assert_eq!(gf9().modulus(), &[1, 0, 1]);
        // X^2 + 2 = (X - 1)(X + 1) over Z_3
        assert_eq!(
            FieldSpec::new(3, 2, Some(&[2, 0, 1])),
            Err(Error::ReducibleModulus { p: 3 })
        );
        assert_eq!(FieldSpec::new(9, 1, None), Err(Error::NotPrime(9)));
        assert!(matches!(
            FieldSpec::new(3, 2, Some(&[1, 0, 2])),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn default_modulus_is_smallest() {
        assert_eq!(FieldSpec::new(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldSpec::new(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldSpec::new(2, 3, None).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::new(5, 2, None).unwrap().modulus(), &[2, 0, 1]);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(3, &[0, 1]));
        assert!(is_irreducible(3, &[1, 0, 1]));
        assert!(!is_irreducible(3, &[2, 0, 1]));
        // (X^2 + 1)^2 over Z_3 has no roots but is reducible
        assert!(!is_irreducible(3, &[1, 0, 2, 0, 1]));
    }

    #[test]
    fn arithmetic_examples() {
        let f = gf9();
        let x = f.generator();
        assert_eq!(f.arith(&x, &x, ArithOp::Mul).unwrap(), f.constant(2));
        let a = f.element(&[2, 1]).unwrap();
        assert_eq!(f.arith(&a, &f.zero(), ArithOp::Add).unwrap(), a);
        assert_eq!(
            f.arith(&f.one(), &x, ArithOp::Div).unwrap(),
            f.element(&[0, 2]).unwrap()
        );
        assert_eq!(f.arith(&a, &f.zero(), ArithOp::Div), Err(Error::DivisionByZero));
        assert!(f.arith(&a, &FieldElement { coeffs: vec![3, 0] }, ArithOp::Add).is_err());
    }

    #[test]
    fn trace_examples() {
        let f = gf9();
        assert_eq!(f.trace(&f.zero()), 0);
        assert_eq!(f.trace(&f.one()), 2);
        assert_eq!(f.trace(&f.generator()), 0);
        for x in f.elements() {
            assert_eq!(f.trace(&x), f.trace_by_power_sum(&x).unwrap());
        }
    }

    #[test]
    fn character_examples() {
        let f = gf9();
        assert_eq!(f.quadratic_character(&f.zero()).unwrap(), 0);
        assert_eq!(f.quadratic_character(&f.one()).unwrap(), 1);
        assert_eq!(f.quadratic_character(&f.constant(2)).unwrap(), 1);
        let gf4 = FieldSpec::new(2, 2, None).unwrap();
        assert_eq!(
            gf4.quadratic_character(&gf4.one()),
            Err(Error::EvenCharacteristic)
        );
    }

    #[test]
    fn trace_coordinate_examples() {
        let f = gf9();
        assert_eq!(f.trace_coordinates(&f.zero()), vec![0, 0]);
        assert_eq!(f.trace_coordinates(&f.one()), vec![2, 0]);
        assert_eq!(f.from_trace_coordinates(&[2, 0]).unwrap(), f.one());
    }

    #[test]
    fn index_roundtrip() {
        let f = FieldSpec::new(5, 2, None).unwrap();
        for i in 0..f.q() {
            assert_eq!(f.index(&f.from_index(i)), i);
        }
        assert_eq!(f.index(&f.element(&[1, 2]).unwrap()), 11);
    }

    #[test]
    fn prime_field_generator() {
        let f = FieldSpec::new(7, 1, Some(&[4, 1])).unwrap();
        // X = -4 = 3 in GF(7) with modulus X + 4
        assert_eq!(f.generator(), f.constant(3));
    }

    #[test]
    fn coefficient_text_format() {
        assert_eq!(parse_coeffs("1, 0,1").unwrap(), vec![1, 0, 1]);
        assert!(parse_coeffs("1,x").is_err());
        assert_eq!(format_coeffs(&[2, 1]), "2,1");
    }
}
