//! Exact scalars, polynomials over Q, primes, `D_n` and p-adic valuations.

mod poly;
pub mod primes;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use poly::Poly;
pub use primes::{dn, floor_log, primes_up_to, PrimeWindow};

/// Arbitrary-precision rational, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("rational roots of the zero polynomial are undefined")]
    ZeroPolynomial,
    #[error("invalid prime window [{p_min}, {p_max}]")]
    BadWindow { p_min: u64, p_max: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

/// Parse `"p/q"` or `"p"`. The sign may only appear on the numerator.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        literal: s.to_string(),
        reason,
    };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.starts_with(['-', '+']) {
                return Err(err("sign not allowed on denominator"));
            }
            d.parse().map_err(|_| err("bad denominator"))?
        }
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// `v_p(x) = v_p(numerator) - v_p(denominator)`.
pub fn vp(x: &Rational, p: u64) -> Result<i64, NumError> {
    if !primes::is_prime(p) {
        return Err(NumError::NotPrime(p));
    }
    if x.is_zero() {
        return Err(NumError::ZeroValuation);
    }
    Ok(vp_int(x.numer(), p).unwrap() - vp_int(x.denom(), p).unwrap())
}

/// Least positive integer clearing every denominator in the list (1 when empty).
pub fn lcm_denominators(xs: &[Rational]) -> BigUint {
    xs.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
        .magnitude()
        .clone()
}

/// Rational roots of a polynomial with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    /// Each root repeated according to its multiplicity, ascending.
    pub roots: Vec<Rational>,
    /// True iff the multiplicities add up to the degree.
    pub all_rational: bool,
}

impl RootReport {
    pub fn multiplicities(&self) -> BTreeMap<Rational, usize> {
        let mut m = BTreeMap::new();
        for r in &self.roots {
            *m.entry(r.clone()).or_insert(0) += 1;
        }
        m
    }
}

/// All rational roots with multiplicity, via the rational-root theorem and
/// exact synthetic division.
pub fn rational_roots(f: &Poly) -> Result<RootReport, NumError> {
    let Some(deg) = f.degree() else {
        return Err(NumError::ZeroPolynomial);
    };
    let zero_mult = f.ord().unwrap();
    let mut roots = vec![Rational::zero(); zero_mult];
    let mut rest = f.div_xk(zero_mult);
    if rest.degree().unwrap() > 0 {
        let (_, ints) = rest.primitive_part();
        let lead = ints.last().unwrap().magnitude().clone();
        let constant = ints[0].magnitude().clone();
        let nums = primes::divisors(&constant);
        let dens = primes::divisors(&lead);
        let mut candidates: Vec<Rational> = Vec::new();
        for a in &nums {
            for b in &dens {
                if a.gcd(b).is_one() {
                    let r = Rational::new(
                        BigInt::from_biguint(Sign::Plus, a.clone()),
                        BigInt::from_biguint(Sign::Plus, b.clone()),
                    );
                    candidates.push(-r.clone());
                    candidates.push(r);
                }
            }
        }
        candidates.sort();
        for c in candidates {
            let lin = Poly::from_coeffs(vec![-c.clone(), Rational::one()]);
            loop {
                if rest.degree().unwrap_or(0) == 0 {
                    break;
                }
                let (q, r) = rest.div_rem(&lin);
                if !r.is_zero() {
                    break;
                }
                roots.push(c.clone());
                rest = q;
            }
        }
    }
    roots.sort();
    let all_rational = roots.len() == deg;
    Ok(RootReport {
        roots,
        all_rational,
    })
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/8").unwrap(), ratio(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(ratio(-3, 4).to_string(), "-3/4");
        assert_eq!(ratio(10, 5).to_string(), "2");
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&int(12), 2).unwrap(), 2);
        assert_eq!(vp(&ratio(1, 9), 3).unwrap(), -2);
        let d30 = Rational::from_integer(BigInt::from(dn(30)));
        assert_eq!(vp(&d30, 5).unwrap(), 2);
        assert_eq!(vp(&int(0), 5), Err(NumError::ZeroValuation));
        assert_eq!(vp(&int(3), 4), Err(NumError::NotPrime(4)));
    }

    #[test]
    fn lcm_of_denominators() {
        assert_eq!(lcm_denominators(&[int(1), int(5), int(73)]), BigUint::one());
        assert_eq!(
            lcm_denominators(&[int(1), ratio(1, 2), ratio(1, 3)]),
            BigUint::from(6u32)
        );
        assert_eq!(
            lcm_denominators(&[ratio(1, 4), ratio(1, 6)]),
            BigUint::from(12u32)
        );
        assert_eq!(lcm_denominators(&[]), BigUint::one());
    }

    #[test]
    fn roots_of_indicial_polynomials() {
        let cube = Poly::from_ints(&[0, 0, 0, 1]);
        let r = rational_roots(&cube).unwrap();
        assert_eq!(r.roots, vec![int(0); 3]);
        assert!(r.all_rational);

        // s(s-1)(2s-1)
        let f = &(&Poly::from_ints(&[0, 1]) * &Poly::from_ints(&[-1, 1])) * &Poly::from_ints(&[-1, 2]);
        let r = rational_roots(&f).unwrap();
        assert_eq!(r.roots, vec![int(0), ratio(1, 2), int(1)]);
        assert!(r.all_rational);

        let r = rational_roots(&Poly::from_ints(&[1, 0, 1])).unwrap();
        assert!(r.roots.is_empty());
        assert!(!r.all_rational);

        assert_eq!(rational_roots(&Poly::zero()), Err(NumError::ZeroPolynomial));
    }

    #[test]
    fn roots_with_multiplicity_and_leftover() {
        // (3s + 2)^2 (s^2 - 2)
        let l = Poly::from_ints(&[2, 3]);
        let f = &(&l * &l) * &Poly::from_ints(&[-2, 0, 1]);
        let r = rational_roots(&f).unwrap();
        assert_eq!(r.roots, vec![ratio(-2, 3), ratio(-2, 3)]);
        assert!(!r.all_rational);
        assert_eq!(r.multiplicities()[&ratio(-2, 3)], 2);
    }

    #[test]
    fn constants_have_no_roots() {
        let r = rational_roots(&Poly::from_ints(&[5])).unwrap();
        assert!(r.roots.is_empty());
        assert!(r.all_rational);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
    }
}
