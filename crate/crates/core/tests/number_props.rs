use approx::assert_abs_diff_eq;
use charshift::number::{
    best_convergent, convergents, crt_compose, crt_split, factor_trial, gauss_sum_bruteforce,
    gauss_sum_closed_form, gcd, is_prime, isqrt, jacobi, legendre, Fraction, GaussSumSpec,
};
use proptest::prelude::*;

const ODD_PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 101];

fn squares_mod(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for x in 1..p {
        sq[(x * x % p) as usize] = true;
    }
    sq
}

#[test]
fn legendre_matches_square_enumeration() {
    for p in ODD_PRIMES {
        let sq = squares_mod(p);
        for x in 0..p {
            let expected = if x == 0 { 0 } else if sq[x as usize] { 1 } else { -1 };
            assert_eq!(legendre(x as i64, p).unwrap(), expected, "({x}/{p})");
        }
        // negative inputs reduce first
        assert_eq!(legendre(-1, p).unwrap(), if p % 4 == 1 { 1 } else { -1 });
    }
}

#[test]
fn jacobi_sums_vanish() {
    for n in (3..=105u64).step_by(2) {
        let Ok(_) = factor_trial(n) else { continue };
        let total: i64 = (0..n).map(|x| i64::from(jacobi(x as i64, n).unwrap())).sum();
        assert_eq!(total, 0, "n = {n}");
    }
}

#[test]
fn gauss_closed_form_matches_sum() {
    for p in (3..=101u64).filter(|&p| is_prime(p)) {
        let spec = GaussSumSpec::RingZp(p);
        let exact = gauss_sum_closed_form(&spec).unwrap().to_complex();
        let brute = gauss_sum_bruteforce(&spec).unwrap();
        assert_abs_diff_eq!(exact.re, brute.re, epsilon = 1e-6);
        assert_abs_diff_eq!(exact.im, brute.im, epsilon = 1e-6);
    }
}

proptest! {
    #[test]
    fn jacobi_is_product_of_legendre(n in (1u64..60).prop_map(|k| 2 * k + 1), x in -500i64..500) {
        prop_assume!(factor_trial(n).is_ok());
        let m = factor_trial(n).unwrap();
        let product: i8 = m.factors().iter().map(|&p| legendre(x, p).unwrap()).product();
        prop_assert_eq!(jacobi(x, n).unwrap(), product);
    }

    #[test]
    fn jacobi_is_multiplicative_in_top(n in (1u64..200).prop_map(|k| 2 * k + 1), a in 0i64..1000, b in 0i64..1000) {
        prop_assert_eq!(
            jacobi(a * b, n).unwrap(),
            jacobi(a, n).unwrap() * jacobi(b, n).unwrap()
        );
    }

    #[test]
    fn crt_round_trip(n in (1u64..500).prop_map(|k| 2 * k + 1), x in 0u64..10_000) {
        prop_assume!(factor_trial(n).is_ok());
        let m = factor_trial(n).unwrap();
        let x = x % n;
        let residues = crt_split(x, &m);
        for (&r, &p) in residues.iter().zip(m.factors()) {
            prop_assert_eq!(r, x % p);
        }
        prop_assert_eq!(crt_compose(&residues, &m), x);
    }

    #[test]
    fn convergents_are_consecutive(m in 2u64..100_000, i in 0u64..100_000) {
        let i = i % m;
        let cs = convergents(i, m);
        let g = gcd(i, m);
        prop_assert_eq!(*cs.last().unwrap(), Fraction::new(i / g, m / g));
        for w in cs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let det = a.num() as i128 * b.den() as i128 - b.num() as i128 * a.den() as i128;
            prop_assert_eq!(det.abs(), 1);
            prop_assert!(a.den() <= b.den());
        }
        let best = best_convergent(i, m);
        prop_assert!(best.den() <= isqrt(m));
        prop_assert!(cs.contains(&best) || best == Fraction::new(0, 1));
    }
}
