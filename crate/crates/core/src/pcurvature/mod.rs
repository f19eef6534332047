//! p-curvature of the companion system of an operator reduced modulo `p`, and
//! per-prime nilpotence verdicts.

mod fp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::matrix::{Matrix, Ring};
use crate::numkernel::primes::is_prime;
use crate::numkernel::{PrimeWindow, Rational};

pub use fp::{inv_mod, FpPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PCurvError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("bad prime {p}: {reason}")]
    BadPrime { p: u64, reason: String },
}

/// Jointly primitive integer coefficients of `L` (no power of `z` removed),
/// leading coefficient with positive top term.
pub fn integral_form(l: &DiffOp) -> Vec<Vec<BigInt>> {
    let all = || l.coeffs().iter().flat_map(|b| b.coeffs().iter());
    let den = all().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<Vec<BigInt>> = l
        .coeffs()
        .iter()
        .map(|b| {
            b.coeffs()
                .iter()
                .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect();
    let g = scaled.iter().flatten().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if scaled.last().unwrap().last().unwrap() < &BigInt::zero() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    scaled
        .into_iter()
        .map(|b| b.into_iter().map(|c| c / &g * &sign).collect())
        .collect()
}

/// `X' = G X` over `F_p(z)` with `G = numerators / d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPSystem {
    p: u64,
    numerators: Matrix<FpPoly>,
    d: FpPoly,
}

impl ModPSystem {
    pub fn new(p: u64, numerators: Matrix<FpPoly>, d: FpPoly) -> Result<Self, PCurvError> {
        if !is_prime(p) {
            return Err(PCurvError::NotPrime(p));
        }
        assert_eq!(numerators.rows(), numerators.cols(), "system matrix must be square");
        if d.is_zero() {
            return Err(PCurvError::BadPrime {
                p,
                reason: "denominator vanishes mod p".into(),
            });
        }
        Ok(Self { p, numerators, d })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn size(&self) -> usize {
        self.numerators.rows()
    }

    pub fn numerators(&self) -> &Matrix<FpPoly> {
        &self.numerators
    }

    pub fn denominator(&self) -> &FpPoly {
        &self.d
    }
}

/// Companion system for `X = (y, y', ..., y^{(mu-1)})` reduced mod `p`.
pub fn reduce_system(l: &DiffOp, p: u64) -> Result<ModPSystem, PCurvError> {
    if !is_prime(p) {
        return Err(PCurvError::NotPrime(p));
    }
    let ints = integral_form(l);
    let mu = l.order();
    let b: Vec<FpPoly> = ints.iter().map(|c| FpPoly::from_bigints(p, c)).collect();
    let d = b[mu].clone();
    if d.is_zero() {
        return Err(PCurvError::BadPrime {
            p,
            reason: "p divides the content of the leading coefficient".into(),
        });
    }
    let zero = FpPoly::zero(p);
    let m = Matrix::from_fn(mu, mu, |r, c| {
        if r + 1 < mu {
            if c == r + 1 {
                d.clone()
            } else {
                zero.clone()
            }
        } else {
            b[c].neg()
        }
    });
    ModPSystem::new(p, m, d)
}

/// `G_p = numerators / d^e`, together with the degree trace of the iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCurvature {
    pub numerators: Matrix<FpPoly>,
    pub d: FpPoly,
    pub e: usize,
    /// For `k = 1..=p`: max numerator degree of `G_k` written over `d^k`.
    pub degree_trace: Vec<usize>,
}

impl PCurvature {
    /// Coefficients of `det(X I - numerators)`, highest first.
    pub fn charpoly_numerators(&self) -> Vec<FpPoly> {
        self.numerators.charpoly()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.charpoly_numerators()[1..].iter().all(FpPoly::is_zero)
    }
}

fn max_degree(m: &Matrix<FpPoly>) -> usize {
    m.iter().filter_map(|(_, _, x)| x.degree()).max().unwrap_or(0)
}

/// `deg M_1 + (k - 1) max(deg d - 1, deg M_1)`.
pub fn degree_bound(sys: &ModPSystem, k: usize) -> usize {
    let m1 = max_degree(&sys.numerators);
    let dd = sys.d.degree().unwrap_or(0);
    m1 + (k - 1) * dd.saturating_sub(1).max(m1)
}

/// `G_1 = G`, `G_{k+1} = G_k' + G_k G`, returning `G_p`.
pub fn p_curvature(sys: &ModPSystem) -> PCurvature {
    let p = sys.p;
    let d = &sys.d;
    let dprime = d.derivative();
    let m1 = &sys.numerators;
    let dd = d.degree().unwrap();
    let mut m = m1.clone();
    let mut e = 1usize;
    let mut trace = vec![max_degree(&m) + (1 - e) * dd];
    for k in 1..p as usize {
        // (M/d^e)' + (M/d^e)(M_1/d) = (d M' - e d' M + M M_1) / d^{e+1}
        let ee = e as u64 % p;
        m = m
            .map(|x| d.mul(&x.derivative()).sub(&dprime.mul(x).scale(ee)))
            .add(&m.mul(m1));
        e += 1;
        while e > 0 {
            let divided: Option<Vec<FpPoly>> = m.iter().map(|(_, _, x)| x.div_exact(d)).collect();
            match divided {
                Some(q) => {
                    let mu = m.rows();
                    m = Matrix::from_fn(mu, mu, |i, j| q[i * mu + j].clone());
                    e -= 1;
                }
                None => break,
            }
            if m.is_zero() {
                e = 0;
            }
        }
        let k1 = k + 1;
        trace.push(if m.is_zero() { 0 } else { max_degree(&m) + (k1 - e) * dd });
    }
    PCurvature {
        numerators: m,
        d: d.clone(),
        e,
        degree_trace: trace,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PCurvatureReport {
    pub p: u64,
    pub nilpotent: bool,
    pub charpoly_nonzero_terms: usize,
}

pub fn report_for(sys: &ModPSystem) -> PCurvatureReport {
    let g = p_curvature(sys);
    let cp = g.charpoly_numerators();
    let nonzero = cp[1..].iter().filter(|c| !c.is_zero()).count();
    PCurvatureReport {
        p: sys.p,
        nilpotent: nonzero == 0,
        charpoly_nonzero_terms: nonzero,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Nilpotent,
    NonNilpotent,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    pub p: u64,
    pub status: Verdict,
    pub reason: Option<String>,
    #[serde(skip)]
    pub report: Option<PCurvatureReport>,
}

/// Verdict for every prime of the window, ordered by `p`. Bad primes are skipped.
pub fn nilpotence_report(l: &DiffOp, window: &PrimeWindow) -> Vec<PrimeVerdict> {
    window
        .primes()
        .into_par_iter()
        .map(|p| match reduce_system(l, p) {
            Err(err) => PrimeVerdict {
                p,
                status: Verdict::Skipped,
                reason: Some(err.to_string()),
                report: None,
            },
            Ok(sys) => {
                let r = report_for(&sys);
                PrimeVerdict {
                    p,
                    status: if r.nilpotent { Verdict::Nilpotent } else { Verdict::NonNilpotent },
                    reason: None,
                    report: Some(r),
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localsystem::RatFunc;
    use crate::numkernel::Poly;

    fn fp_of(p: u64, q: &Poly) -> FpPoly {
        let (c, ints) = q.primitive_part();
        let num = FpPoly::from_bigints(p, &ints);
        let cn = FpPoly::from_bigints(p, &[c.numer().clone()]);
        let cd = FpPoly::from_bigints(p, &[c.denom().clone()]);
        assert!(!cd.is_zero());
        num.mul(&cn).scale(inv_mod(cd.coeffs()[0], p))
    }

    /// `d^{p+j} mod L` over Q(z), reduced mod p afterwards: columns of the
    /// transpose of `G_p`.
    fn brute_force(l: &DiffOp, p: u64) -> Vec<Vec<RatFunc>> {
        let mu = l.order();
        let lead = l.leading().clone();
        let tail: Vec<RatFunc> = (0..mu)
            .map(|i| RatFunc::new(-l.coeff(i), lead.clone()))
            .collect();
        let step = |v: &[RatFunc]| -> Vec<RatFunc> {
            let mut out: Vec<RatFunc> = v.iter().map(RatFunc::derivative).collect();
            for i in 1..mu {
                out[i] = out[i].add(&v[i - 1]);
            }
            for i in 0..mu {
                out[i] = out[i].add(&v[mu - 1].mul(&tail[i]));
            }
            out
        };
        (0..mu)
            .map(|j| {
                let mut v = vec![RatFunc::zero(); mu];
                v[j] = RatFunc::one();
                for _ in 0..p {
                    v = step(&v);
                }
                v
            })
            .collect()
    }

    #[test]
    fn apery_reduction_mod_five() {
        let sys = reduce_system(&DiffOp::apery(), 5).unwrap();
        assert_eq!(sys.denominator(), &FpPoly::from_i64s(5, &[0, 0, 1, 1, 1]));
    }

    #[test]
    fn exponential_and_constant_systems() {
        let exp = DiffOp::from_ints(&[&[-1], &[1]]).unwrap();
        let sys = reduce_system(&exp, 7).unwrap();
        assert_eq!(sys.numerators().get(0, 0), &FpPoly::constant(7, 1));
        let g = p_curvature(&sys);
        assert_eq!(g.numerators.get(0, 0), &FpPoly::constant(7, 1));
        assert_eq!(g.e, 0);
        assert!(!g.is_nilpotent());

        let theta = DiffOp::from_ints(&[&[], &[0, 1]]).unwrap();
        let g = p_curvature(&reduce_system(&theta, 7).unwrap());
        assert!(g.numerators.is_zero());
        assert!(g.is_nilpotent());
    }

    #[test]
    fn bad_prime_is_reported() {
        // 7 z D + 1 mod 7 loses its leading coefficient
        let l = DiffOp::from_ints(&[&[1], &[0, 7]]).unwrap();
        assert!(matches!(reduce_system(&l, 7), Err(PCurvError::BadPrime { p: 7, .. })));
        let w = PrimeWindow::new(7, 7).unwrap();
        let r = nilpotence_report(&l, &w);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].status, Verdict::Skipped);
        assert!(r[0].reason.is_some());
    }

    #[test]
    fn apery_is_nilpotent_small_primes() {
        let w = PrimeWindow::new(5, 13).unwrap();
        let r = nilpotence_report(&DiffOp::apery(), &w);
        assert_eq!(r.iter().map(|v| v.p).collect::<Vec<_>>(), vec![5, 7, 11, 13]);
        assert!(r.iter().all(|v| v.status == Verdict::Nilpotent));
        let json = serde_json::to_value(&r[0]).unwrap();
        assert_eq!(json, serde_json::json!({"p": 5, "status": "nilpotent", "reason": null}));
    }

    #[test]
    fn exponential_never_nilpotent() {
        let exp = DiffOp::from_ints(&[&[-1], &[1]]).unwrap();
        let r = nilpotence_report(&exp, &PrimeWindow::new(2, 20).unwrap());
        assert_eq!(r.len(), 8);
        assert!(r.iter().all(|v| v.status == Verdict::NonNilpotent));
    }

    #[test]
    fn matches_brute_force_small() {
        let ops = [
            DiffOp::from_ints(&[&[-1], &[1, -5], &[0, 2, -2]]).unwrap(),
            DiffOp::from_ints(&[&[1, 2], &[3, 0, 1]]).unwrap(),
            DiffOp::from_ints(&[&[2], &[1, 1], &[1, 0, -1]]).unwrap(),
        ];
        for l in &ops {
            for p in [2u64, 3, 5, 7] {
                let Ok(sys) = reduce_system(l, p) else { continue };
                let g = p_curvature(&sys);
                let brute = brute_force(l, p);
                let mu = l.order();
                let de = (0..g.e).fold(FpPoly::constant(p, 1), |acc, _| acc.mul(&g.d));
                for (j, col) in brute.iter().enumerate() {
                    for (i, f) in col.iter().enumerate() {
                        let den = fp_of(p, f.den());
                        if den.is_zero() {
                            continue;
                        }
                        // G_p[j][i] = num/d^e must equal f reduced mod p
                        let lhs = g.numerators.get(j, i).mul(&den);
                        let rhs = fp_of(p, f.num()).mul(&de);
                        assert_eq!(lhs, rhs, "p = {p}, entry ({j}, {i}), mu = {mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn gauge_change_keeps_charpoly() {
        let l = DiffOp::from_ints(&[&[1, 3], &[-2, 1, 4], &[0, 1, 1]]).unwrap();
        for p in [5u64, 7, 11] {
            let sys = reduce_system(&l, p).unwrap();
            let z = FpPoly::from_i64s(p, &[0, 1]);
            let one = FpPoly::constant(p, 1);
            let zero = FpPoly::zero(p);
            // T = I + z E_{01}, T^{-1} = I - z E_{01}, T' = E_{01}
            let t = Matrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 1) => z.clone(),
                _ if i == j => one.clone(),
                _ => zero.clone(),
            });
            let t_inv = t.map(|x| if x == &z { z.neg() } else { x.clone() });
            let t_prime = Matrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { one.clone() } else { zero.clone() });
            let d = sys.denominator().clone();
            let num = t
                .mul(sys.numerators())
                .mul(&t_inv)
                .add(&t_prime.mul(&t_inv).scale(&d));
            let other = ModPSystem::new(p, num, d.clone()).unwrap();
            let (g1, g2) = (p_curvature(&sys), p_curvature(&other));
            let (c1, c2) = (g1.charpoly_numerators(), g2.charpoly_numerators());
            let pow = |e: usize| (0..e).fold(one.clone(), |acc, _| acc.mul(&d));
            for i in 0..=2 {
                assert_eq!(
                    c1[i].mul(&pow(g2.e * i)),
                    c2[i].mul(&pow(g1.e * i)),
                    "p = {p}, coefficient {i}"
                );
            }
            assert_eq!(g1.is_nilpotent(), g2.is_nilpotent());
        }
    }

    #[test]
    fn degree_trace_within_bound() {
        for p in [5u64, 7, 11, 13] {
            let sys = reduce_system(&DiffOp::apery(), p).unwrap();
            let g = p_curvature(&sys);
            assert_eq!(g.degree_trace.len(), p as usize);
            for (k, &deg) in g.degree_trace.iter().enumerate() {
                assert!(deg <= degree_bound(&sys, k + 1), "p = {p}, k = {}", k + 1);
            }
        }
    }
}
