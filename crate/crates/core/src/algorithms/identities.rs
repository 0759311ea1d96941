//! Exact checks: the Fourier transform of the shifted Jacobi state, and the
//! reduced-fraction versus continued-fraction sampling distributions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::number::{best_convergent, euler_phi, jacobi_odd, FactoredOddSquarefree, Fraction, Unit4};
use crate::qsim::{max_deviation, Direction, StateVector};

/// Largest `M` for the exact distribution comparison.
pub const RFCF_MAX_M: u64 = 1 << 16;

fn jacobi_state(n: u64, s: u64, dim: u64) -> Result<StateVector> {
    let amps = (0..dim)
        .map(|x| Complex64::new(f64::from(jacobi_odd((x % n + s) % n, n)), 0.0))
        .collect();
    StateVector::normalized(amps)
}

/// Builds `qft( phi(n)^(-1/2) sum ((x+s)/n) |x> )` and the closed form
/// `i^((n-1)^2/4) phi(n)^(-1/2) sum w_n^(-sy) (y/n) |y>`, and returns the
/// largest entrywise deviation between them.
pub fn verify_jacobi_qft_lemma(moduli: &FactoredOddSquarefree, s: u64) -> Result<f64> {
    let n = moduli.n();
    let s = s % n;
    let mut lhs = jacobi_state(n, s, n)?;
    lhs.qft(Direction::Forward);

    let half = (n - 1) / 2;
    let unit = Unit4::from_exponent(half % 4 * (half % 4)).to_complex();
    let scale = 1.0 / (euler_phi(moduli) as f64).sqrt();
    let rhs: Vec<Complex64> = (0..n)
        .map(|y| {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * ((s * y) % n) as f64 / n as f64);
            unit * phase * f64::from(jacobi_odd(y, n)) * scale
        })
        .collect();
    Ok(max_deviation(lhs.amplitudes(), &rhs))
}

/// Exact reduced-fraction and continued-fraction distributions.
#[derive(Debug, Clone)]
pub struct DistributionComparison {
    pub n: u64,
    pub m: u64,
    pub s: u64,
    pub rf_distribution: BTreeMap<Fraction, f64>,
    pub cf_distribution: BTreeMap<Fraction, f64>,
    pub l1_distance: f64,
    /// Reference value `n / sqrt(M)`.
    pub bound: f64,
}

/// Fourier samples the Jacobi state on `Z_n` (outcomes reduced to `x/n`) and
/// its repetition on `Z_M` (outcomes mapped through the convergent rule),
/// without sampling, and compares the two distributions in L1.
pub fn repeated_sampling_comparison(
    moduli: &FactoredOddSquarefree,
    s: u64,
    m: u64,
) -> Result<DistributionComparison> {
    let n = moduli.n();
    if m > RFCF_MAX_M {
        return Err(Error::DomainTooLarge {
            size: m,
            limit: RFCF_MAX_M,
        });
    }
    if (n as u128).pow(2) >= m as u128 {
        return Err(Error::ModulusTooLargeForM { n, m });
    }
    let s = s % n;

    let mut short = jacobi_state(n, s, n)?;
    short.qft(Direction::Forward);
    let mut rf_distribution = BTreeMap::new();
    for (x, p) in short.distribution().into_iter().enumerate() {
        *rf_distribution.entry(Fraction::new(x as u64, n)).or_insert(0.0) += p;
    }

    let mut repeated = jacobi_state(n, s, m)?;
    repeated.qft(Direction::Forward);
    let mut cf_distribution = BTreeMap::new();
    for (i, p) in repeated.distribution().into_iter().enumerate() {
        *cf_distribution.entry(best_convergent(i as u64, m)).or_insert(0.0) += p;
    }

    let mut keys: Vec<&Fraction> = rf_distribution.keys().chain(cf_distribution.keys()).collect();
    keys.sort();
    keys.dedup();
    let l1_distance = keys
        .iter()
        .map(|k| {
            let a = rf_distribution.get(k).copied().unwrap_or(0.0);
            let b = cf_distribution.get(k).copied().unwrap_or(0.0);
            (a - b).abs()
        })
        .sum();
    Ok(DistributionComparison {
        n,
        m,
        s,
        rf_distribution,
        cf_distribution,
        l1_distance,
        bound: n as f64 / (m as f64).sqrt(),
    })
}

/// Agreement of the composed trace-Fourier transform with its defining
/// kernel.
#[derive(Debug, Clone, Copy)]
pub struct TftCheck {
    /// Largest entrywise gap to `q^(-1/2) w_p^Tr(xy)`.
    pub matrix_deviation: f64,
    /// Largest entrywise gap of `U^dagger U` to the identity.
    pub unitarity_deviation: f64,
    /// Whether `x -> T(x)` hits every coordinate vector exactly once and
    /// inverts back to `x`.
    pub coordinates_bijective: bool,
}

/// Applies the composed transform to every basis state of F_q and compares
/// the columns with the literal kernel computed from field multiplication and
/// the trace.
pub fn verify_trace_fourier_transform(field: &FieldSpec) -> Result<TftCheck> {
    let q = field.q();
    let p = field.p();
    let scale = 1.0 / (q as f64).sqrt();
    let mut columns = Vec::with_capacity(q);
    let mut matrix_deviation: f64 = 0.0;
    for (x_index, x) in field.elements().enumerate() {
        let mut state = StateVector::basis(q, x_index);
        state.trace_fourier_transform(field, Direction::Forward)?;
        for (y_index, y) in field.elements().enumerate() {
            let t = field.trace(&field.mul(&x, &y));
            let kernel = Complex64::from_polar(scale, 2.0 * PI * t as f64 / p as f64);
            matrix_deviation = matrix_deviation.max((state.amplitude(y_index) - kernel).norm());
        }
        columns.push(state);
    }
    let mut unitarity_deviation: f64 = 0.0;
    for a in 0..q {
        for b in a..q {
            let inner: Complex64 = columns[a]
                .amplitudes()
                .iter()
                .zip(columns[b].amplitudes())
                .map(|(u, v)| u.conj() * v)
                .sum();
            let expected = if a == b { 1.0 } else { 0.0 };
            unitarity_deviation = unitarity_deviation.max((inner - expected).norm());
        }
    }
    let mut seen = vec![false; q];
    let mut coordinates_bijective = true;
    for x in field.elements() {
        let coords = field.trace_coordinates(&x);
        let slot = coords.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize);
        if seen[slot] || field.from_trace_coordinates(&coords)? != x {
            coordinates_bijective = false;
        }
        seen[slot] = true;
    }
    Ok(TftCheck {
        matrix_deviation,
        unitarity_deviation,
        coordinates_bijective,
    })
}
