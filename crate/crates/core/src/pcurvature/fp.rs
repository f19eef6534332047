use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::matrix::Ring;

/// Dense polynomial over F_p; the modulus travels with the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    pub fn zero(p: u64) -> Self {
        Self { p, c: Vec::new() }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        Self::new(p, vec![a])
    }

    /// Reduction of an integer polynomial.
    pub fn from_bigints(p: u64, cs: &[BigInt]) -> Self {
        let bp = BigInt::from(p);
        Self::new(p, cs.iter().map(|x| x.mod_floor(&bp).to_u64().unwrap()).collect())
    }

    pub fn from_i64s(p: u64, cs: &[i64]) -> Self {
        Self::new(p, cs.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| mulmod(a, k as u64 % p, p))
                .collect(),
        )
    }

    pub fn scale(&self, a: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&x| mulmod(x, a % self.p, self.p)).collect())
    }

    /// Quotient when `divisor` divides `self` exactly.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree().expect("division by zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        let p = self.p;
        let n = self.c.len();
        if n <= dd {
            return None;
        }
        let inv = inv_mod(divisor.c[dd], p);
        let mut rem = self.c.clone();
        let mut q = vec![0u64; n - dd];
        for i in (0..n - dd).rev() {
            let coef = mulmod(rem[i + dd], inv, p);
            q[i] = coef;
            if coef != 0 {
                for (j, &dj) in divisor.c.iter().enumerate() {
                    rem[i + j] = (rem[i + j] + p - mulmod(coef, dj, p)) % p;
                }
            }
        }
        rem[..dd].iter().all(|&x| x == 0).then(|| Self::new(p, q))
    }
}

impl Ring for FpPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.p)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.p, 1)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.c.len().max(rhs.c.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::new(self.p, (0..n).map(|i| (get(&self.c, i) + get(&rhs.c, i)) % self.p).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + rhs.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        Self::new(p, out)
    }
    fn neg(&self) -> Self {
        Self::new(self.p, self.c.iter().map(|&x| (self.p - x) % self.p).collect())
    }
}
