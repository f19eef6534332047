use num_bigint::BigInt;
use num_traits::Zero;

use super::RatFunc;
use crate::matrix::Ring;
use crate::numkernel::{Poly, Rational};

/// `sum_t c_t z^t` with finitely many nonzero terms, `t` of either sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<Rational>,
}

impl LaurentPoly {
    pub fn new(low: i64, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        coeffs.drain(..lead);
        Self {
            low: low + lead as i64,
            coeffs,
        }
    }

    pub fn zero() -> Self {
        Self {
            low: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(c: Rational, t: i64) -> Self {
        Self::new(t, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest and highest exponents present.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.low, self.low + self.coeffs.len() as i64 - 1))
    }

    pub fn coeff(&self, t: i64) -> Rational {
        let k = t - self.low;
        if k < 0 {
            return Rational::zero();
        }
        self.coeffs.get(k as usize).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms `(t, c_t)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i64, c))
    }

    /// `z d/dz` applied termwise.
    pub fn theta(&self) -> Self {
        Self::new(
            self.low,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(self.low + k as i64)))
                .collect(),
        )
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        let Some((lo, _)) = self.degree_range() else {
            return RatFunc::zero();
        };
        let p = Poly::from_coeffs(self.coeffs.clone());
        RatFunc::from_poly(p).mul_zpow(lo)
    }
}

impl Ring for LaurentPoly {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::constant(Rational::from_integer(1.into()))
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let (Some((a0, a1)), Some((b0, b1))) = (self.degree_range(), rhs.degree_range()) else {
            return if self.is_zero() { rhs.clone() } else { self.clone() };
        };
        let (lo, hi) = (a0.min(b0), a1.max(b1));
        Self::new(lo, (lo..=hi).map(|t| self.coeff(t) + rhs.coeff(t)).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.low + rhs.low, out)
    }
    fn neg(&self) -> Self {
        Self {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
