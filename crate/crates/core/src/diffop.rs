//! Differential operators `sum_i B_i(z) (d/dz)^i` with coefficients in Q[z].
//!
//! Operators act on the left and are kept in the normal form with polynomial
//! coefficients to the left of the powers of `d/dz`. Local data at 0 is read
//! from the theta form `z^mu L = sum_j z^j c_j(theta)`, `theta = z d/dz`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::{binomial, rational_roots, Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffOpError {
    #[error("operator must have order at least 1")]
    OrderZero,
    #[error("leading coefficient B_mu is zero")]
    ZeroLeading,
    #[error("declared order {declared} does not match {found} coefficients")]
    OrderMismatch { declared: usize, found: usize },
    #[error("exponent {0} at 0 is not rational")]
    NonRationalExponents(String),
    #[error("theta form is zero")]
    ZeroThetaForm,
    #[error("b = {0} does not fit a machine integer")]
    Overflow(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    coeffs: Vec<Poly>,
}

impl DiffOp {
    /// Build `sum_i coeffs[i] (d/dz)^i`; trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<Poly>) -> Result<Self, DiffOpError> {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        match coeffs.len() {
            0 => Err(DiffOpError::ZeroLeading),
            1 => Err(DiffOpError::OrderZero),
            _ => Ok(Self { coeffs }),
        }
    }

    /// Convenience constructor from integer coefficient lists.
    pub fn from_ints(coeffs: &[&[i64]]) -> Result<Self, DiffOpError> {
        Self::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    /// The Apery operator annihilating `sum a_n z^n`, `a_n = sum_k C(n,k)^2 C(n+k,k)^2`.
    pub fn apery() -> Self {
        Self::from_ints(&[&[-5, 1], &[1, -112, 7], &[0, 3, -153, 6], &[0, 0, 1, -34, 1]]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &Poly {
        self.coeffs.last().unwrap()
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// `L(p)` for a polynomial `p`.
    pub fn apply_poly(&self, p: &Poly) -> Poly {
        let mut deriv = p.clone();
        let mut acc = Poly::zero();
        for b in &self.coeffs {
            acc = &acc + &(b * &deriv);
            deriv = deriv.derivative();
        }
        acc
    }

    /// Composition `self ∘ rhs`, using `(B D^i)(C D^j) = B sum_m C(i,m) C^(m) D^(i-m+j)`.
    pub fn compose(&self, rhs: &DiffOp) -> DiffOp {
        let mut out = vec![Poly::zero(); self.order() + rhs.order() + 1];
        for (i, b) in self.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (j, c) in rhs.coeffs.iter().enumerate() {
                let mut dc = c.clone();
                for m in 0..=i {
                    if dc.is_zero() {
                        break;
                    }
                    let k = Rational::from_integer(BigInt::from(binomial(i as u64, m as u64)));
                    let term = &(b * &dc).scale(&k);
                    out[i - m + j] = &out[i - m + j] + term;
                    dc = dc.derivative();
                }
            }
        }
        DiffOp::new(out).expect("composition of nonzero operators is nonzero")
    }

    /// `(d/dz)^(k+1) ∘ L`, which annihilates every `y` with `L y` a polynomial of degree `<= k`.
    pub fn left_compose_derivative(&self, k: usize) -> DiffOp {
        let d = DiffOp::new(vec![Poly::zero(), Poly::one()]).unwrap();
        (0..=k).fold(self.clone(), |acc, _| d.compose(&acc))
    }

    /// Canonical representative up to left multiplication by a nonzero rational
    /// monomial: common power of `z` removed, integral primitive coefficients,
    /// positive leading coefficient of `B_mu`.
    pub fn normalized(&self) -> DiffOp {
        let zpow = self.coeffs.iter().filter_map(Poly::ord).min().unwrap_or(0);
        let stripped: Vec<Poly> = self.coeffs.iter().map(|b| b.div_xk(zpow)).collect();
        let den = stripped
            .iter()
            .flat_map(|b| b.coeffs().iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num_gcd = stripped
            .iter()
            .flat_map(|b| b.coeffs().iter())
            .fold(BigInt::zero(), |acc, c| {
                acc.gcd(&(c * Rational::from_integer(den.clone())).to_integer())
            });
        let mut scale = Rational::new(den, num_gcd);
        if stripped.last().unwrap().leading().unwrap().is_negative() {
            scale = -scale;
        }
        DiffOp {
            coeffs: stripped.iter().map(|b| b.scale(&scale)).collect(),
        }
    }

    /// Equality up to a nonzero rational monomial left factor.
    pub fn equivalent(&self, other: &DiffOp) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn to_theta_form(&self) -> ThetaForm {
        let mu = self.order();
        let mut terms: BTreeMap<usize, Poly> = BTreeMap::new();
        for (i, b) in self.coeffs.iter().enumerate() {
            let ff = Poly::falling_factorial(i, 0);
            for (k, c) in b.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let j = k + mu - i;
                let e = terms.entry(j).or_default();
                *e = &*e + &ff.scale(c);
            }
        }
        terms.retain(|_, p| !p.is_zero());
        ThetaForm { terms }
    }

    /// Coefficient of the lowest power of `z` in `L(z^s)` as a polynomial in `s`.
    pub fn indicial_polynomial(&self) -> Poly {
        self.to_theta_form().lowest().1.clone()
    }

    /// 0 is an ordinary or regular singular point iff
    /// `ord(B_i) >= ord(B_mu) - (mu - i)` for every `i`.
    pub fn is_regular_at_zero(&self) -> bool {
        let mu = self.order() as i64;
        let lead_ord = self.leading().ord().unwrap() as i64;
        self.coeffs.iter().enumerate().all(|(i, b)| match b.ord() {
            None => true,
            Some(o) => o as i64 >= lead_ord - (mu - i as i64),
        })
    }

    pub fn exponents_at_zero(&self) -> ExponentReport {
        self.exponent_report(Point::Finite(Rational::zero()))
    }

    fn exponent_report(&self, point: Point) -> ExponentReport {
        let ind = self.indicial_polynomial();
        let roots = rational_roots(&ind).expect("indicial polynomial is nonzero");
        ExponentReport {
            point,
            exponents: roots.roots,
            all_rational: roots.all_rational,
            regular: self.is_regular_at_zero(),
        }
    }

    /// Exponents at a rational point (via [`DiffOp::shift`]) or at infinity (via [`DiffOp::invert`]).
    pub fn exponents_at(&self, point: &Point) -> ExponentReport {
        match point {
            Point::Finite(a) => self.shift(a).exponent_report(point.clone()),
            Point::Infinity => self.invert().exponent_report(Point::Infinity),
        }
    }

    /// Least common multiple of the denominators of the exponents at 0.
    pub fn compute_b(&self) -> Result<u64, DiffOpError> {
        let rep = self.exponents_at_zero();
        if !rep.all_rational {
            return Err(DiffOpError::NonRationalExponents(
                self.indicial_polynomial().to_string(),
            ));
        }
        compute_b_from_exponents(&rep.exponents)
    }

    /// `L_alpha` with coefficients `B_i(z + alpha)`; `L_alpha y(z) = 0` iff `L y(z - alpha) = 0`
    /// after the substitution, i.e. local solutions at `alpha` become local solutions at 0.
    pub fn shift(&self, alpha: &Rational) -> DiffOp {
        DiffOp {
            coeffs: self.coeffs.iter().map(|b| b.taylor_shift(alpha)).collect(),
        }
    }

    /// Operator `M` with `M(y(1/z)) = 0` iff `L(y) = 0`, normalized.
    pub fn invert(&self) -> DiffOp {
        let theta = self.to_theta_form();
        let top = *theta.terms.keys().next_back().unwrap();
        let minus_x = Poly::from_ints(&[0, -1]);
        let terms = theta
            .terms
            .iter()
            .map(|(j, c)| (top - j, c.compose(&minus_x)))
            .collect();
        ThetaForm { terms }
            .to_operator()
            .expect("inverted theta form is nonzero")
            .normalized()
    }

    /// Pullback along `z = x^b`: if `L` annihilates `sum a_n z^n` the result
    /// annihilates `sum a_n x^(bn)`. Normalized.
    pub fn pullback_power(&self, b: u64) -> DiffOp {
        assert!(b >= 1, "pullback exponent must be positive");
        let theta = self.to_theta_form();
        let scaled = Poly::from_coeffs(vec![Rational::zero(), Rational::new(1.into(), b.into())]);
        let terms = theta
            .terms
            .iter()
            .map(|(j, c)| (j * b as usize, c.compose(&scaled)))
            .collect();
        ThetaForm { terms }
            .to_operator()
            .expect("pulled back theta form is nonzero")
            .normalized()
    }
}

/// Least common multiple of the denominators of a list of rationals, as `u64`.
pub fn compute_b_from_exponents(exps: &[Rational]) -> Result<u64, DiffOpError> {
    let l = exps
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    l.to_u64().ok_or_else(|| DiffOpError::Overflow(l.to_string()))
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, b) in self.coeffs.iter().enumerate().rev() {
            if b.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let s = b.to_string_in("z");
            match i {
                0 => write!(f, "({s})")?,
                1 => write!(f, "({s})*D")?,
                _ => write!(f, "({s})*D^{i}")?,
            }
        }
        Ok(())
    }
}

/// `sum_j z^j c_j(theta)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ThetaForm {
    pub terms: BTreeMap<usize, Poly>,
}

impl ThetaForm {
    /// The lowest power of `z` with a nonzero coefficient and that coefficient.
    pub fn lowest(&self) -> (usize, &Poly) {
        let (j, c) = self.terms.iter().next().expect("theta form is nonzero");
        (*j, c)
    }

    /// Rewrite as `sum_i B_i (d/dz)^i` using `theta^(falling i) = z^i (d/dz)^i`.
    /// No power of `z` is stripped, so `from ∘ to` is left multiplication by `z^mu`.
    pub fn to_operator(&self) -> Result<DiffOp, DiffOpError> {
        let order = self
            .terms
            .values()
            .filter_map(Poly::degree)
            .max()
            .ok_or(DiffOpError::ZeroThetaForm)?;
        let mut cols: Vec<Vec<Rational>> = vec![Vec::new(); order + 1];
        for (j, c) in &self.terms {
            for (i, f) in c.to_falling_basis().into_iter().enumerate() {
                let col = &mut cols[i];
                let pos = i + j;
                if col.len() <= pos {
                    col.resize(pos + 1, Rational::zero());
                }
                col[pos] += f;
            }
        }
        let coeffs: Vec<Poly> = cols.into_iter().map(Poly::from_coeffs).collect();
        if coeffs.len() == 1 {
            return Err(DiffOpError::OrderZero);
        }
        DiffOp::new(coeffs)
    }
}

/// A point of the projective line with rational coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(a) => write!(f, "{a}"),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    pub point: Point,
    #[serde(serialize_with = "crate::io::ser_rationals")]
    pub exponents: Vec<Rational>,
    pub all_rational: bool,
    pub regular: bool,
}

/// Operator JSON: `{"variable": "z", "order": mu, "coefficients": [poly_0, ..., poly_mu]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub variable: String,
    pub order: usize,
    pub coefficients: Vec<Poly>,
}

impl From<&DiffOp> for OperatorJson {
    fn from(l: &DiffOp) -> Self {
        Self {
            variable: "z".into(),
            order: l.order(),
            coefficients: l.coeffs.clone(),
        }
    }
}

impl TryFrom<OperatorJson> for DiffOp {
    type Error = DiffOpError;
    fn try_from(j: OperatorJson) -> Result<Self, DiffOpError> {
        if j.coefficients.len() != j.order + 1 {
            return Err(DiffOpError::OrderMismatch {
                declared: j.order,
                found: j.coefficients.len(),
            });
        }
        if j.coefficients.last().is_none_or(Poly::is_zero) {
            return Err(DiffOpError::ZeroLeading);
        }
        DiffOp::new(j.coefficients)
    }
}
