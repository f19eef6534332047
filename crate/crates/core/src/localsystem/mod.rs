//! First-order local systems `z Y' = A(z) Y` at a regular singular point 0:
//! companion form, shearing to a nilpotent residue, Frobenius series,
//! reconstruction of Taylor coefficients and the Christol–Dwork valuation check.

mod cdbound;
mod frobenius;
mod laurent;
mod ratfunc;
mod shear;

use serde::Serialize;
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::matrix::{Matrix, Ring};
use crate::numkernel::{int, Poly, Rational};

pub use cdbound::{cd_bound_check, cd_bound_check_window, cd_exponent, CdBoundReport, CdViolation};
pub use frobenius::{decompose, frobenius_series, log_power_matrices, Decomposition, FrobeniusSeries};
pub use laurent::LaurentPoly;
pub use ratfunc::RatFunc;
pub use shear::{shear, verify_shearing, ShearingResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("0 is an irregular singular point of the operator")]
    Irregular,
    #[error("residue matrix has a non-integer eigenvalue {0}")]
    NonIntegerEigenvalue(String),
    #[error("residue matrix has eigenvalues outside Q")]
    IrrationalEigenvalues,
    #[error("residue matrix is not nilpotent")]
    NotNilpotent,
    #[error("system has a pole at 0")]
    PoleAtZero,
    #[error("input is not a solution of L")]
    NotASolution,
    #[error("insufficient coefficients: linear system has rank {rank} < {needed}")]
    InsufficientCoefficients { rank: usize, needed: usize },
    #[error("Frobenius series has {have} terms, {need} required")]
    SeriesTooShort { need: usize, have: usize },
    #[error("reconstruction differs from the input at n = {0}")]
    ReconstructionMismatch(usize),
    #[error("bad prime {p} for this system: it divides the denominator {denominator} of A_{k}")]
    BadPrime { p: u64, k: usize, denominator: String },
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// `z Y' = A(z) Y` with `A` finite at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSystem {
    a: Matrix<RatFunc>,
}

impl LocalSystem {
    pub fn new(a: Matrix<RatFunc>) -> Result<Self, LocalError> {
        assert_eq!(a.rows(), a.cols(), "system matrix must be square");
        if a.iter().any(|(_, _, f)| f.has_pole_at_zero()) {
            return Err(LocalError::PoleAtZero);
        }
        Ok(Self { a })
    }

    /// Constant system `A(z) = A_0`.
    pub fn constant(a0: &Matrix<Rational>) -> Self {
        Self {
            a: a0.map(|c| RatFunc::from(c.clone())),
        }
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Matrix<RatFunc> {
        &self.a
    }

    /// `A(0)`.
    pub fn residue(&self) -> Matrix<Rational> {
        self.a.map(|f| f.at_zero().expect("pole-free by construction"))
    }

    /// `(q, P)` with `A = P / q`, `q` the lcm of the entry denominators scaled to `q(0) = 1`.
    pub fn over_common_denominator(&self) -> (Poly, Matrix<Poly>) {
        let lcm = self.a.iter().fold(Poly::one(), |acc, (_, _, f)| {
            let g = Poly::gcd(&acc, f.den());
            (&acc * f.den()).div_rem(&g).0
        });
        let q = lcm.scale(&lcm.coeff(0).recip());
        let p = self.a.map(|f| (&q * f.num()).div_rem(f.den()).0);
        (q, p)
    }

    /// Taylor coefficients `A_0, ..., A_{n}` of `A(z)`.
    pub fn series(&self, n: usize) -> Vec<Matrix<Rational>> {
        let mu = self.size();
        let entries: Vec<Vec<Rational>> = self.a.iter().map(|(_, _, f)| f.series(n + 1)).collect();
        (0..=n)
            .map(|k| Matrix::from_fn(mu, mu, |i, j| entries[i * mu + j][k].clone()))
            .collect()
    }
}

/// Companion system for `Y = (y, z y', ..., z^{mu-1} y^{(mu-1)})`.
pub fn companion(l: &DiffOp) -> Result<LocalSystem, LocalError> {
    let mu = l.order();
    let lead = l.leading().clone();
    let a: Vec<RatFunc> = (0..mu)
        .map(|i| RatFunc::new(l.coeff(i).mul_xk(mu - i), lead.clone()))
        .collect();
    if a.iter().any(RatFunc::has_pole_at_zero) {
        return Err(LocalError::Irregular);
    }
    let m = Matrix::from_fn(mu, mu, |r, c| {
        if r + 1 < mu {
            match c {
                _ if c == r && r > 0 => RatFunc::constant(int(r as i64)),
                _ if c == r + 1 => RatFunc::one(),
                _ => RatFunc::zero(),
            }
        } else {
            let diag = if c == mu - 1 {
                RatFunc::from(int(mu as i64 - 1))
            } else {
                RatFunc::zero()
            };
            diag.sub(&a[c])
        }
    });
    LocalSystem::new(m)
}

/// `z H' H^{-1} + H A H^{-1}`.
pub fn gauge_transform(
    a: &Matrix<RatFunc>,
    h: &Matrix<LaurentPoly>,
    h_inv: &Matrix<LaurentPoly>,
) -> Matrix<RatFunc> {
    let hr = h.map(LaurentPoly::to_ratfunc);
    let hir = h_inv.map(LaurentPoly::to_ratfunc);
    let dh = h.map(|e| e.theta().to_ratfunc());
    dh.mul(&hir).add(&hr.mul(a).mul(&hir))
}

pub(crate) fn is_nilpotent(m: &Matrix<Rational>) -> bool {
    m.pow(m.rows() as u32).is_zero()
}

pub(crate) fn laurent_identity(n: usize) -> Matrix<LaurentPoly> {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            LaurentPoly::constant(int(1))
        } else {
            LaurentPoly::zero()
        }
    })
}
