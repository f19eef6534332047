use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::matrix::Ring;
use crate::numkernel::{Poly, Rational};

/// Quotient of polynomials over Q in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().unwrap().recip();
        Self {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn has_pole_at_zero(&self) -> bool {
        self.den.coeff(0).is_zero()
    }

    /// Value at `z = 0`, `None` at a pole.
    pub fn at_zero(&self) -> Option<Rational> {
        if self.has_pole_at_zero() {
            None
        } else {
            Some(self.num.coeff(0) / self.den.coeff(0))
        }
    }

    /// Multiply by `z^k`, `k` of either sign.
    pub fn mul_zpow(&self, k: i64) -> Self {
        if k >= 0 {
            Self::new(self.num.mul_xk(k as usize), self.den.clone())
        } else {
            Self::new(self.num.clone(), self.den.mul_xk((-k) as usize))
        }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den)
    }

    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// First `terms` Taylor coefficients at 0; requires no pole at 0.
    pub fn series(&self, terms: usize) -> Vec<Rational> {
        let d0 = self.den.coeff(0);
        assert!(!d0.is_zero(), "series expansion at a pole");
        let inv = d0.recip();
        let dc = self.den.coeffs();
        let mut out: Vec<Rational> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = self.num.coeff(k);
            for (j, d) in dc.iter().enumerate().skip(1).take(k) {
                if !d.is_zero() {
                    acc -= d * &out[k - j];
                }
            }
            out.push(acc * &inv);
        }
        out
    }
}

impl Ring for RatFunc {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Self::new(&self.num + &rhs.num, self.den.clone());
        }
        Self::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
    fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RatFunc", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.end()
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self::constant(c)
        }
    }
}
