use std::f64::consts::PI;
use std::sync::Arc;

use charshift::qsim::{max_deviation, qft_direct, qft_fast};
use charshift::{Direction, FieldSpec, OracleParams, Shift, ShiftOracle, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_amps(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn literal_dft(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|y| {
            input
                .iter()
                .enumerate()
                .map(|(x, a)| a * Complex64::from_polar(1.0, sign * 2.0 * PI * ((x * y) % n) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

#[test]
fn direct_and_fast_agree_around_the_cutover() {
    for n in [4095, 4096, 4097] {
        let amps = random_amps(n, n as u64);
        for dir in [Direction::Forward, Direction::Inverse] {
            let d = max_deviation(&qft_direct(&amps, dir), &qft_fast(&amps, dir));
            assert!(d < 1e-9, "N = {n}: {d}");
        }
    }
}

#[test]
fn qft_matches_positive_sign_convention() {
    for n in 1..=64 {
        let amps = random_amps(n, 100 + n as u64);
        assert!(max_deviation(&qft_direct(&amps, Direction::Forward), &literal_dft(&amps, 1.0)) < 1e-9);
        assert!(max_deviation(&qft_direct(&amps, Direction::Inverse), &literal_dft(&amps, -1.0)) < 1e-9);
    }
}

#[test]
fn legendre_zero_set_is_the_negated_shift() {
    for p in [3u64, 5, 7, 11, 13] {
        for s in 0..p {
            let o = ShiftOracle::new(OracleParams::Legendre { p }, Shift::Int(s)).unwrap();
            let zeros: Vec<u64> = (0..p).filter(|&x| o.query(x).unwrap() == 0).collect();
            assert_eq!(zeros, vec![(p - s) % p]);
            assert_eq!(o.query_count(), p);
        }
    }
}

#[test]
fn field_oracle_zero_set() {
    let f = Arc::new(FieldSpec::new(3, 2, None).unwrap());
    for s in f.elements() {
        let o = ShiftOracle::new(OracleParams::Field(f.clone()), Shift::Field(s.clone())).unwrap();
        let zeros: Vec<_> = f.elements().filter(|x| o.query_field(x).unwrap() == 0).collect();
        assert_eq!(zeros, vec![f.neg(&s)]);
    }
}

proptest! {
    #[test]
    fn qft_is_unitary(n in 1usize..=64, seed in any::<u64>()) {
        let state = StateVector::normalized(random_amps(n, seed)).unwrap();
        let mut out = state.clone();
        out.qft(Direction::Forward);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        out.qft(Direction::Inverse);
        prop_assert!(max_deviation(out.amplitudes(), state.amplitudes()) < 1e-9);
    }

    #[test]
    fn permutation_moves_magnitudes(n in 2usize..200, k in 1usize..200, seed in any::<u64>()) {
        prop_assume!(charshift::number::gcd(k as u64, n as u64) == 1);
        let state = StateVector::normalized(random_amps(n, seed)).unwrap();
        let mut moved = state.clone();
        moved.permute_basis(|i| (i * k) % n).unwrap();
        for i in 0..n {
            prop_assert_eq!(moved.amplitude((i * k) % n), state.amplitude(i));
        }
    }

    #[test]
    fn unknown_modulus_oracle_is_periodic(
        n in prop::sample::select(vec![3u64, 5, 15, 21, 33, 35]),
        s in 0u64..1000,
        x in 0u64..5000,
    ) {
        let m = 8192;
        let o = ShiftOracle::new(OracleParams::JacobiUnknown { n, m }, Shift::Int(s % n)).unwrap();
        prop_assume!(x + n < m);
        prop_assert_eq!(o.query(x).unwrap(), o.query(x + n).unwrap());
    }
}
