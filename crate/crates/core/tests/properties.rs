//! Property tests for the invariants of every module.

mod common;

use std::collections::BTreeMap;

use common::*;
use holodenom::denomlab::{certify, delta_sequence, infer_c, infer_s, InferredS};
use holodenom::localsystem::{cd_bound_check, companion, frobenius_series, shear, verify_shearing};
use holodenom::matrix::{Matrix, Ring};
use holodenom::numkernel::{dn, int, rational_roots, Poly, PrimeWindow, Rational};
use holodenom::pcurvature::{p_curvature, reduce_system, FpPoly, ModPSystem};
use holodenom::pipeline::theorem_one_analyze;
use holodenom::recurrence::{residual, residual_required_len, to_operator, to_recurrence, unroll};
use holodenom::{DiffOp, InitialData, Recurrence, ThetaForm};
use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use proptest::prelude::*;

/// `prod (theta - e_k) + z P_1(theta)`, so the exponents at 0 are exactly `exps`.
fn operator_with_exponents(exps: &[i64], p1: &[i64]) -> DiffOp {
    let indicial = exps
        .iter()
        .fold(Poly::one(), |acc, &e| &acc * &Poly::from_ints(&[-e, 1]));
    let mut terms = BTreeMap::new();
    terms.insert(0, indicial);
    let p1 = Poly::from_ints(p1);
    if !p1.is_zero() {
        terms.insert(1, p1);
    }
    ThetaForm { terms }.to_operator().unwrap()
}

fn integer_exponent_operator() -> impl Strategy<Value = DiffOp> {
    (1usize..=3)
        .prop_flat_map(|mu| {
            (
                prop::collection::vec(0i64..=2, mu),
                prop::collection::vec(-4i64..=4, mu + 1),
            )
        })
        .prop_map(|(e, p1)| operator_with_exponents(&e, &p1))
}

fn monomial(s: usize) -> Poly {
    let mut c = vec![0; s + 1];
    c[s] = 1;
    Poly::from_ints(&c)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn dn_prime_power_formula(n in 2u64..=500) {
        prop_assert_eq!(dn(n), num_integer::Integer::lcm(&dn(n - 1), &BigUint::from(n)));
    }

    #[test]
    fn roots_with_multiplicity(roots in prop::collection::vec((-6i64..=6, 1i64..=4), 0..5), extra in 0i64..3) {
        let mut f = Poly::one();
        let mut want: Vec<Rational> = Vec::new();
        for (n, d) in &roots {
            f = &f * &Poly::from_ints(&[-n, *d]);
            want.push(rat(*n, *d));
        }
        // x^2 + 2 + extra has no rational roots
        f = &f * &Poly::from_ints(&[2 + extra, 0, 1]);
        want.sort();
        let r = rational_roots(&f).unwrap();
        prop_assert_eq!(r.roots, want);
        prop_assert!(!r.all_rational);
    }

    #[test]
    fn theta_form_is_z_mu_times_l(l in small_operator()) {
        let back = l.to_theta_form().to_operator().unwrap();
        let z_mu = monomial(l.order());
        for s in 0..=2 * l.order() {
            let zs = monomial(s);
            prop_assert_eq!(back.apply_poly(&zs), &z_mu * &l.apply_poly(&zs));
        }
    }

    #[test]
    fn pullback_scales_exponents(l in integer_exponent_operator(), b in 1u64..=3) {
        let e = l.exponents_at_zero().exponents;
        let mut scaled: Vec<Rational> = e.iter().map(|x| x * int(b as i64)).collect();
        scaled.sort();
        let mut got = l.pullback_power(b).exponents_at_zero().exponents;
        got.sort();
        prop_assert_eq!(got, scaled);
    }

    #[test]
    fn regular_point_exponents(l in small_operator(), alpha in -5i64..=5) {
        let a = int(alpha);
        prop_assume!(!l.leading().eval(&a).is_zero());
        let mu = l.order() as i64;
        let want: Vec<Rational> = (0..mu).map(int).collect();
        prop_assert_eq!(l.shift(&a).exponents_at_zero().exponents, want);
    }

    #[test]
    fn shifted_recurrence_gives_taylor_coefficients(alpha in -3i64..=3, c0 in -5i64..=5, c1 in -5i64..=5) {
        // (1 - z) y'' - y' = 0 is solved by c0 + c1 log(1 - z); shift where 1 - z != 0
        prop_assume!(alpha != 1);
        let l = DiffOp::from_ints(&[&[0], &[-1], &[1, -1]]).unwrap();
        let la = l.shift(&int(alpha));
        // Taylor coefficients of c0 + c1 log(w - z), w = 1 - alpha, from index 1 on
        let w = int(1 - alpha);
        let want: Vec<Rational> = (1..=12i64).map(|n| int(-c1) / (int(n) * Pow::pow(&w, n as u32))).collect();
        let init = InitialData::from_values([int(c0), want[0].clone()]);
        let v = unroll(&to_recurrence(&la), &init, 12).unwrap();
        prop_assert_eq!(&v[1..], &want[..]);
        prop_assert!(residual(&la, &v).unwrap().is_zero());
    }

    #[test]
    fn annihilation_of_unrolled_solutions(
        k in 1usize..=3,
        qs in prop::collection::vec(int_poly(2), 4),
        top in (1i64..=5, -3i64..=3),
        init in prop::collection::vec(-5i64..=5, 3),
    ) {
        // top coefficient (n + a)(c n + 1) with a, c >= 1 never vanishes for n >= 0
        let q_top = &Poly::from_ints(&[top.0, 1]) * &Poly::from_ints(&[1, top.1.abs() + 1]);
        let mut shifts: BTreeMap<i64, Poly> = (0..k as i64).map(|d| (d, qs[d as usize].clone())).collect();
        shifts.insert(k as i64, q_top);
        shifts.retain(|_, q| !q.is_zero());
        let r = Recurrence::new(shifts, 0).unwrap();
        let v = unroll(&r, &InitialData::from_values(init[..k].iter().map(|&x| int(x))), 30).unwrap();
        let op = to_operator(&r).unwrap();
        let need = residual_required_len(&op);
        prop_assume!(need <= v.len());
        prop_assert!(residual(&op, &v).unwrap().is_zero(), "R = {:?}, L = {}", r.shifts(), op);
    }

    #[test]
    fn companion_eigenvalues_are_exponents(l in integer_exponent_operator()) {
        let a0 = companion(&l).unwrap().residue();
        let mut eig = rational_roots(&a0.charpoly_poly()).unwrap().roots;
        eig.sort();
        prop_assert_eq!(eig, l.exponents_at_zero().exponents);
    }

    #[test]
    fn shearing_and_frobenius_contracts(l in integer_exponent_operator()) {
        let sys = companion(&l).unwrap();
        let sh = shear(&sys).unwrap();
        prop_assert!(verify_shearing(&sys, &sh));
        prop_assert!(sh.a_sheared.residue().pow(l.order() as u32).is_zero());
        let fs = frobenius_series(&sh.a_sheared, 12).unwrap();
        for n in 1..=12 {
            prop_assert!(fs.relation_defect(n).is_zero(), "n = {}", n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn valuation_bound_on_shifted_apery(alpha in 2i64..=6) {
        // L(z + alpha) is regular at 0 for these alpha; every prime that passes the
        // filter must satisfy the bound
        let sys = companion(&DiffOp::apery().shift(&int(alpha))).unwrap();
        let sh = shear(&sys).unwrap();
        let fs = frobenius_series(&sh.a_sheared, 40).unwrap();
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            if let Ok(rep) = cd_bound_check(&fs, p, 40) {
                prop_assert!(rep.holds(), "alpha = {}, p = {}: {:?}", alpha, p, rep.violations.first());
            }
        }
    }

    #[test]
    fn gauge_change_keeps_nilpotence(l in small_operator().prop_filter("order 2", |l| l.order() == 2), p in prop::sample::select(vec![5u64, 7, 11]), c in 1i64..5) {
        let sys = reduce_system(&l, p);
        prop_assume!(sys.is_ok());
        let sys = sys.unwrap();
        let z = FpPoly::from_i64s(p, &[0, c]);
        let one = FpPoly::constant(p, 1);
        let zero = FpPoly::zero(p);
        // T = I + c z E_01
        let t = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => z.clone(),
            _ if i == j => one.clone(),
            _ => zero.clone(),
        });
        let t_inv = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => z.neg(),
            _ if i == j => one.clone(),
            _ => zero.clone(),
        });
        let t_prime = Matrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { FpPoly::constant(p, c as u64) } else { zero.clone() });
        let d = sys.denominator().clone();
        let num = t.mul(sys.numerators()).mul(&t_inv).add(&t_prime.mul(&t_inv).scale(&d));
        let other = ModPSystem::new(p, num, d).unwrap();
        prop_assert_eq!(p_curvature(&sys).is_nilpotent(), p_curvature(&other).is_nilpotent());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn certify_is_monotone_in_s(a in rational_sequence(40)) {
        certify_monotone(&a)?;
    }

    #[test]
    fn delta_divisibility_agrees_with_certify(a in rational_sequence(30), s in 0u32..=3, b0 in 0u64..=2, c in 1u32..=6) {
        let c = BigUint::from(c);
        let n_max = a.len() - 1;
        let delta = delta_sequence(&a);
        let divides = (0..=n_max).all(|n| {
            let bound = dn(n as u64 + b0).pow(s) * Pow::pow(&c, n as u32 + 1);
            (bound % &delta[n]).is_zero()
        });
        // delta_n divides the bound for every n iff each a_n is cleared by its own bound,
        // because the bound is nondecreasing in n under divisibility
        prop_assert_eq!(divides, certify(&a, s, 1, b0, &c, n_max).passed());
    }

    #[test]
    fn inferred_parameters_certify(k in 1u32..=3, shift in 0i64..=3) {
        let a: Vec<Rational> = (0..=120i64).map(|n| rat(1, (n + 1 + shift).pow(k))).collect();
        let window = PrimeWindow::new(5, 47).unwrap();
        let b0 = (1 + shift) as u64;
        let InferredS::Found(s) = infer_s(&a, 1, b0, 120, &window, 8) else {
            return Err(TestCaseError::fail("no s found"));
        };
        prop_assert_eq!(s, k);
        let c = infer_c(&a, s, 1, b0, 120, &window.primes_below());
        prop_assert!(certify(&a, s, 1, b0, &c, 120).passed());
    }

    #[test]
    fn polylog_delta_is_power_of_dn(k in 1u32..=4) {
        let a: Vec<Rational> = (0..=80i64).map(|n| if n == 0 { Rational::zero() } else { rat(1, n.pow(k)) }).collect();
        let delta = delta_sequence(&a);
        for n in 0..=80u64 {
            prop_assert_eq!(&delta[n as usize], &dn(n).pow(k));
        }
    }

    #[test]
    fn integer_inputs_give_c_one(s in 0u32..=4, n in 10usize..=40) {
        let a: Vec<Rational> = (0..=n as u64).map(|m| Rational::from_integer(apery_oracle(m))).collect();
        prop_assert!(certify(&a, s, 1, 0, &BigUint::one(), n).passed());
        let window = PrimeWindow::new(19, 61).unwrap();
        let rep = theorem_one_analyze(&DiffOp::apery(), &a, n, &window).unwrap();
        prop_assert!(rep.certificate.passed());
        prop_assert!(rep.c.is_one());
        prop_assert_eq!((rep.b, rep.s, rep.b0), (1, 2, 0));
    }
}

#[test]
fn dn_matches_iterated_lcm_to_500() {
    check_dn_recurrence(500).unwrap();
}

#[test]
fn valuation_laws_on_ten_thousand_pairs() {
    run_cases(10_000, (nonzero_rational(), nonzero_rational(), small_prime()), |(x, y, p)| valuation_laws(&x, &y, p))
        .unwrap();
}

#[test]
fn recurrence_round_trip_on_random_operators() {
    run_cases(100, small_operator(), |l| round_trip(&l)).unwrap();
}

#[test]
fn certify_monotone_on_twenty_sequences() {
    run_cases(20, rational_sequence(40), |a| certify_monotone(&a)).unwrap();
}

#[test]
fn small_rationals_are_reduced() {
    run_cases(500, small_rational(), |x| {
        prop_assert!(num_integer::Integer::gcd(x.numer(), x.denom()).is_one());
        prop_assert!(x.denom() > &num_bigint::BigInt::zero());
        Ok(())
    })
    .unwrap();
}

#[test]
fn shear_of_d_compose_apery() {
    let l = DiffOp::apery().left_compose_derivative(0);
    let sys = companion(&l).unwrap();
    let sh = shear(&sys).unwrap();
    assert!(verify_shearing(&sys, &sh));
    assert!(sh.a_sheared.residue().pow(4).is_zero());
}
