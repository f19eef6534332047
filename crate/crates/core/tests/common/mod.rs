//! Strategies, oracles and property checks shared by the integration targets.

#![allow(dead_code)]

use holodenom::denomlab::certify;
use holodenom::numkernel::{dn, primes_up_to, vp, Poly, Rational};
use holodenom::recurrence::{to_operator, to_recurrence};
use holodenom::DiffOp;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `sum_k C(n,k)^2 C(n+k,k)^2`.
pub fn apery_oracle(n: u64) -> BigInt {
    (0..=n).map(|k| (binom(n, k) * binom(n + k, k)).pow(2)).sum()
}

/// The second Apery sequence from its double-sum closed form.
pub fn apery_hat_oracle(n: u64) -> Rational {
    let h3: Rational = (1..=n as i64).map(|m| rat(1, m * m * m)).sum();
    (0..=n)
        .map(|k| {
            let w = Rational::from_integer((binom(n, k) * binom(n + k, k)).pow(2));
            let inner: Rational = (1..=k)
                .map(|m| {
                    let sign = if m % 2 == 1 { 1 } else { -1 };
                    let den = BigInt::from(2 * m * m * m) * binom(n, m) * binom(n + m, n);
                    Rational::new(BigInt::from(sign), den)
                })
                .sum();
            w * (&h3 + inner)
        })
        .sum()
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1i64..=1000).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-10_000i64..=-1, 1i64..=10_000], 1i64..=10_000).prop_map(|(n, d)| rat(n, d))
}

pub fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(primes_up_to(50))
}

/// Integer polynomial of degree at most `deg`, possibly zero.
pub fn int_poly(deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-9i64..=9, deg + 1).prop_map(|c| Poly::from_ints(&c))
}

/// Operators of order 1..=3 with coefficient degrees at most 3 and a nonzero leading coefficient.
pub fn small_operator() -> impl Strategy<Value = DiffOp> {
    (1usize..=3)
        .prop_flat_map(|mu| prop::collection::vec(int_poly(3), mu + 1))
        .prop_filter("leading coefficient must be nonzero", |cs| !cs.last().unwrap().is_zero())
        .prop_map(|cs| DiffOp::new(cs).unwrap())
}

/// Sequences whose denominators are products of small primes.
pub fn rational_sequence(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-50i64..=50, 1i64..=360), len).prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

pub fn check_dn_recurrence(n_max: u64) -> Result<(), String> {
    let mut iterated = BigUint::one();
    for n in 1..=n_max {
        iterated = iterated.lcm(&BigUint::from(n));
        let formula = dn(n);
        if formula != iterated {
            return Err(format!("D_{n}: prime-power formula {formula} != iterated lcm {iterated}"));
        }
        if n >= 2 && formula != dn(n - 1).lcm(&BigUint::from(n)) {
            return Err(format!("D_{n} != lcm(D_{}, {n})", n - 1));
        }
    }
    Ok(())
}

pub fn valuation_laws(x: &Rational, y: &Rational, p: u64) -> Result<(), TestCaseError> {
    let (vx, vy) = (vp(x, p).unwrap(), vp(y, p).unwrap());
    prop_assert_eq!(vp(&(x * y), p).unwrap(), vx + vy);
    let sum = x + y;
    if !sum.is_zero() {
        let vs = vp(&sum, p).unwrap();
        prop_assert!(vs >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }
    Ok(())
}

pub fn round_trip(l: &DiffOp) -> Result<(), TestCaseError> {
    let back = to_operator(&to_recurrence(l)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(back.equivalent(l), "L = {}, back = {}", l, back);
    Ok(())
}

pub fn certify_monotone(a: &[Rational]) -> Result<(), TestCaseError> {
    let one = BigUint::one();
    let n = a.len() - 1;
    let mut passed = false;
    for s in 0..=6 {
        let ok = certify(a, s, 1, 0, &one, n).passed();
        prop_assert!(!passed || ok, "pass at s = {} but fail at s = {}", s - 1, s);
        passed = ok;
    }
    Ok(())
}

/// Runs `check` on `cases` draws from `strategy` with a fixed seed.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(Default::default()));
    runner.run(&strategy, check).map_err(|e| e.to_string())
}
