//! End-to-end denominator analysis for a series annihilated by a Fuchsian
//! operator: reduction to integer exponents, local normalization, per-prime
//! valuation checks, small-prime constant and a range-stamped certificate.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::denomlab::{certify, infer_c, DenomCertificate};
use crate::diffop::{DiffOp, ExponentReport};
use crate::localsystem::{
    cd_bound_check_window, companion, decompose, frobenius_series, shear, CdBoundReport, LocalError,
};
use crate::numkernel::primes::{factor, next_prime_after};
use crate::numkernel::{PrimeWindow, Rational};
use crate::recurrence::residual;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Residual,
    Exponents,
    Pullback,
    Companion,
    Shear,
    Frobenius,
    Decompose,
    CdCheck,
    Certify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

fn fail<E: fmt::Display>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        message: e.to_string(),
    }
}

/// Coefficients of `sum a_n x^{bn}`: `a_{m/b}` when `b | m`, else 0.
pub fn pullback_coefficients(coeffs: &[Rational], b: u64) -> Vec<Rational> {
    let b = b as usize;
    if coeffs.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); b * (coeffs.len() - 1) + 1];
    for (n, a) in coeffs.iter().enumerate() {
        out[b * n] = a.clone();
    }
    out
}

/// Heuristic window of "large" primes: from the first prime above `mu` and
/// every prime of the leading coefficient's integer content, 100 wide.
pub fn default_window(l: &DiffOp) -> PrimeWindow {
    let lead = l.normalized().leading().clone();
    let (_, ints) = lead.primitive_part();
    let largest = ints
        .iter()
        .filter(|c| !c.is_zero())
        .flat_map(|c| {
            let (fs, cof) = factor(c.magnitude());
            fs.into_iter().map(|(p, _)| p).chain(std::iter::once(cof))
        })
        .filter_map(|p| p.to_u64())
        .max()
        .unwrap_or(1);
    let p_min = next_prime_after(largest.max(l.order() as u64));
    PrimeWindow::new(p_min, p_min + 100).expect("window bounds are ordered")
}

#[derive(Clone, Debug, Serialize)]
pub struct CdStage {
    pub window: PrimeWindow,
    pub n_max: usize,
    pub primes_checked: Vec<u64>,
    pub skipped: Vec<SkippedPrime>,
    /// Reports with at least one violation.
    pub violating: Vec<CdBoundReport>,
    /// True when no checked prime violates the bound.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedPrime {
    pub p: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stages {
    pub exponents: ExponentReport,
    pub pulled_back_order: usize,
    pub shear_steps: usize,
    pub frobenius_terms: usize,
    #[serde(serialize_with = "crate::io::ser_rationals")]
    pub ell: Vec<Rational>,
    pub cd: CdStage,
    pub small_primes: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremOneReport {
    pub mu: usize,
    pub b: u64,
    pub b0: u64,
    #[serde(rename = "C", serialize_with = "crate::io::ser_display")]
    pub c: BigUint,
    pub s: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub cd_primes_checked: Vec<u64>,
    pub certificate: DenomCertificate,
    pub stages: Stages,
}

/// Runs every stage in order; the first failing precondition aborts with its stage tag.
pub fn theorem_one_analyze(
    l: &DiffOp,
    coeffs: &[Rational],
    n_max: usize,
    window: &PrimeWindow,
) -> Result<TheoremOneReport, PipelineError> {
    if coeffs.len() <= n_max {
        return Err(PipelineError {
            stage: Stage::Residual,
            message: format!("need {} coefficients, got {}", n_max + 1, coeffs.len()),
        });
    }
    let coeffs = &coeffs[..=n_max];
    let res = residual(l, coeffs).map_err(fail(Stage::Residual))?;
    if !res.is_zero() {
        let k = res.ord().unwrap();
        return Err(PipelineError {
            stage: Stage::Residual,
            message: format!("input is not a solution of L: coefficient of z^{k} in L(y) is {}", res.coeff(k)),
        });
    }

    let exponents = l.exponents_at_zero();
    if !exponents.regular {
        return Err(fail(Stage::Exponents)(LocalError::Irregular));
    }
    let b = l.compute_b().map_err(fail(Stage::Exponents))?;

    let lb = l.pullback_power(b);
    let pulled = pullback_coefficients(coeffs, b);

    let system = companion(&lb).map_err(fail(Stage::Companion))?;
    let sh = shear(&system).map_err(fail(Stage::Shear))?;
    let terms = pulled.len() - 1 + sh.b0 as usize;
    let fs = frobenius_series(&sh.a_sheared, terms).map_err(fail(Stage::Frobenius))?;
    let dec = decompose(&lb, &pulled, &sh, &fs).map_err(fail(Stage::Decompose))?;

    let mut primes_checked = Vec::new();
    let mut skipped = Vec::new();
    let mut violating = Vec::new();
    for (p, r) in cd_bound_check_window(&fs, window, terms) {
        match r {
            Ok(rep) => {
                primes_checked.push(p);
                if !rep.holds() {
                    violating.push(rep);
                }
            }
            Err(e @ LocalError::BadPrime { .. }) => skipped.push(SkippedPrime {
                p,
                reason: e.to_string(),
            }),
            Err(e) => return Err(fail(Stage::CdCheck)(e)),
        }
    }
    let cd = CdStage {
        window: *window,
        n_max: terms,
        primes_checked: primes_checked.clone(),
        skipped,
        consistent: violating.is_empty(),
        violating,
    };

    let mu = l.order();
    let s = (mu - 1) as u32;
    let small_primes = window.primes_below();
    let c = infer_c(coeffs, s, b, sh.b0, n_max, &small_primes);
    let certificate = certify(coeffs, s, b, sh.b0, &c, n_max);
    Ok(TheoremOneReport {
        mu,
        b,
        b0: sh.b0,
        c,
        s,
        n: n_max,
        cd_primes_checked: primes_checked,
        certificate,
        stages: Stages {
            exponents,
            pulled_back_order: lb.order(),
            shear_steps: sh.steps,
            frobenius_terms: fs.u.len(),
            ell: dec.ell,
            cd,
            small_primes,
        },
    })
}
