use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{FrobeniusSeries, LocalError};
use crate::numkernel::primes::is_prime;
use crate::numkernel::{binomial, factorial, floor_log, vp, vp_int, PrimeWindow};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdViolation {
    pub i: usize,
    pub j: usize,
    pub n: usize,
    pub vp: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdBoundReport {
    pub p: u64,
    pub mu: usize,
    pub beta: i64,
    pub exponent: i64,
    pub n_max: usize,
    pub violations: Vec<CdViolation>,
}

impl CdBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Serialize for CdBoundReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[i64; 4]> = self
            .violations
            .iter()
            .map(|x| [x.i as i64, x.j as i64, x.n as i64, x.vp])
            .collect();
        let mut st = s.serialize_struct("CDBoundReport", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("exponent", &self.exponent)?;
        st.serialize_field("violations", &v)?;
        st.end()
    }
}

/// `(beta_mu, mu - 1 + v_p((mu-1)!) + beta_mu)`.
pub fn cd_exponent(mu: usize, p: u64) -> (i64, i64) {
    let mu64 = mu as u64;
    let prod = (1..=mu64).fold(BigInt::from(1), |acc, j| acc * BigInt::from(binomial(mu64, j)));
    let beta = (mu as i64 - 1).min(vp_int(&prod, p).unwrap());
    let fact = BigInt::from(factorial(mu64.saturating_sub(1)));
    let exponent = mu as i64 - 1 + vp_int(&fact, p).unwrap() + beta;
    (beta, exponent)
}

/// Check `v_p(u_{i,j,n}) >= -e * floor(log_p n)` for `n <= n_max`.
pub fn cd_bound_check(fs: &FrobeniusSeries, p: u64, n_max: usize) -> Result<CdBoundReport, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    if n_max > fs.n_max() {
        return Err(LocalError::SeriesTooShort {
            need: n_max + 1,
            have: fs.u.len(),
        });
    }
    for (k, ak) in fs.a_series.iter().enumerate().take(n_max + 1) {
        for (_, _, x) in ak.iter() {
            if vp_int(x.denom(), p).unwrap() > 0 {
                return Err(LocalError::BadPrime {
                    p,
                    k,
                    denominator: x.denom().to_string(),
                });
            }
        }
    }
    let mu = fs.size();
    let (beta, exponent) = cd_exponent(mu, p);
    let mut violations = Vec::new();
    for (n, un) in fs.u.iter().enumerate().take(n_max + 1) {
        let bound = -exponent * floor_log(n as u64, p) as i64;
        for (i, j, x) in un.iter() {
            if x.is_zero() {
                continue;
            }
            let v = vp(x, p).unwrap();
            if v < bound {
                violations.push(CdViolation { i, j, n, vp: v });
            }
        }
    }
    Ok(CdBoundReport {
        p,
        mu,
        beta,
        exponent,
        n_max,
        violations,
    })
}

/// [`cd_bound_check`] over every prime of the window, in parallel, ordered by `p`.
pub fn cd_bound_check_window(
    fs: &FrobeniusSeries,
    window: &PrimeWindow,
    n_max: usize,
) -> Vec<(u64, Result<CdBoundReport, LocalError>)> {
    window
        .primes()
        .into_par_iter()
        .map(|p| (p, cd_bound_check(fs, p, n_max)))
        .collect()
}
