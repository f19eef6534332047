use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{is_nilpotent, LocalError, LocalSystem, ShearingResult};
use crate::diffop::DiffOp;
use crate::matrix::{solve, Matrix, Solve};
use crate::numkernel::{factorial, Rational};

/// Truncated `U(z) = sum U_n z^n` with `U(z) z^N` a solution matrix.
#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusSeries {
    #[serde(rename = "N", serialize_with = "crate::io::ser_rational_matrix")]
    pub n: Matrix<Rational>,
    #[serde(rename = "U", serialize_with = "crate::io::ser_rational_matrices")]
    pub u: Vec<Matrix<Rational>>,
    #[serde(skip)]
    pub a_series: Vec<Matrix<Rational>>,
}

impl FrobeniusSeries {
    pub fn size(&self) -> usize {
        self.n.rows()
    }

    /// Highest index computed.
    pub fn n_max(&self) -> usize {
        self.u.len() - 1
    }

    fn rhs(&self, n: usize) -> Matrix<Rational> {
        let mu = self.size();
        (1..=n).fold(Matrix::zeros(mu, mu), |acc, k| {
            acc.add(&self.a_series[k].mul(&self.u[n - k]))
        })
    }

    /// `n U_n + U_n N - N U_n - sum_{k>=1} A_k U_{n-k}`, zero for a correct series.
    pub fn relation_defect(&self, n: usize) -> Matrix<Rational> {
        let un = &self.u[n];
        un.scale(&Rational::from_integer(BigInt::from(n)))
            .add(&un.mul(&self.n))
            .sub(&self.n.mul(un))
            .sub(&self.rhs(n))
    }
}

/// Integer matrix over a common positive denominator; the working
/// representation of the recursion, where gcd work on every entry dominates.
#[derive(Clone)]
struct ScaledMatrix {
    size: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl ScaledMatrix {
    fn from_rational(m: &Matrix<Rational>) -> Self {
        let den = m.iter().fold(BigInt::one(), |acc, (_, _, x)| acc.lcm(x.denom()));
        let num = m
            .iter()
            .map(|(_, _, x)| x.numer() * (&den / x.denom()))
            .collect();
        Self { size: m.rows(), num, den }
    }

    fn zero(size: usize) -> Self {
        Self {
            size,
            num: vec![BigInt::zero(); size * size],
            den: BigInt::one(),
        }
    }

    fn to_rational(&self) -> Matrix<Rational> {
        Matrix::from_fn(self.size, self.size, |i, j| {
            Rational::new(self.num[i * self.size + j].clone(), self.den.clone())
        })
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn mul(&self, rhs: &Self) -> Self {
        let n = self.size;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.num[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.num[k * n + j];
                    if !b.is_zero() {
                        num[i * n + j] += a * b;
                    }
                }
            }
        }
        Self {
            size: n,
            num,
            den: &self.den * &rhs.den,
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self {
                size: self.size,
                num: self.num.iter().zip(&rhs.num).map(|(a, b)| a + b).collect(),
                den: self.den.clone(),
            };
        }
        let den = self.den.lcm(&rhs.den);
        let (fa, fb) = (&den / &self.den, &den / &rhs.den);
        Self {
            size: self.size,
            num: self.num.iter().zip(&rhs.num).map(|(a, b)| a * &fa + b * &fb).collect(),
            den,
        }
    }

    fn scale(&self, r: &Rational) -> Self {
        Self {
            size: self.size,
            num: self.num.iter().map(|a| a * r.numer()).collect(),
            den: &self.den * r.denom(),
        }
    }

    fn reduce(mut self) -> Self {
        let g = self.num.iter().fold(self.den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            for x in self.num.iter_mut() {
                *x /= &g;
            }
            self.den /= &g;
        }
        self
    }
}

/// `U_0 .. U_{n_max}` for a system with nilpotent residue.
///
/// With `A = P / q` the relation `q (z U' + U N) = P U` gives
/// `n U_n + U_n N - N U_n = sum_{j>=1} P_j U_{n-j} - q_j ((n-j) U_{n-j} + U_{n-j} N)`,
/// whose right side has at most `max(deg P, deg q)` terms.
pub fn frobenius_series(s: &LocalSystem, n_max: usize) -> Result<FrobeniusSeries, LocalError> {
    let mu = s.size();
    let a_series = s.series(n_max);
    let nil = a_series[0].clone();
    if !is_nilpotent(&nil) {
        return Err(LocalError::NotNilpotent);
    }
    let (q, p) = s.over_common_denominator();
    let width = p
        .iter()
        .filter_map(|(_, _, x)| x.degree())
        .chain(q.degree())
        .max()
        .unwrap_or(0);
    let p_coeffs: Vec<ScaledMatrix> = (0..=width)
        .map(|j| ScaledMatrix::from_rational(&p.map(|x| x.coeff(j))))
        .collect();
    let n_scaled = ScaledMatrix::from_rational(&nil);
    let mut work = vec![ScaledMatrix::from_rational(&Matrix::identity(mu))];
    let mut u = vec![Matrix::identity(mu)];
    for n in 1..=n_max {
        let mut rhs = ScaledMatrix::zero(mu);
        for j in 1..=width.min(n) {
            let prev = &work[n - j];
            rhs = rhs.add(&p_coeffs[j].mul(prev));
            let qj = q.coeff(j);
            if !qj.is_zero() {
                let m = Rational::from_integer(BigInt::from(n - j));
                let inner = prev.scale(&m).add(&prev.mul(&n_scaled));
                rhs = rhs.add(&inner.scale(&-qj));
            }
        }
        // The iterates of X <- (RHS - X N + N X) / n are the partial sums of
        // sum_k T_k with T_0 = RHS / n, T_{k+1} = (N T_k - T_k N) / n.
        let inv_n = Rational::from_integer(BigInt::from(n)).recip();
        let mut term = rhs.reduce().scale(&inv_n);
        let mut x = term.clone();
        for _ in 0..2 * mu {
            let commutator = n_scaled.mul(&term).add(&term.mul(&n_scaled).scale(&-Rational::one()));
            term = commutator.scale(&inv_n);
            if term.is_zero() {
                break;
            }
            x = x.add(&term);
        }
        let x = x.reduce();
        u.push(x.to_rational());
        work.push(x);
    }
    Ok(FrobeniusSeries {
        n: nil,
        u,
        a_series,
    })
}

/// `P_k = N^k / k!`, the coefficient of `log^k z` in `z^N`.
pub fn log_power_matrices(nil: &Matrix<Rational>) -> Vec<Matrix<Rational>> {
    let mu = nil.rows();
    (0..mu.max(1))
        .map(|k| {
            let f = Rational::from_integer(BigInt::from(factorial(k as u64)));
            nil.pow(k as u32).scale(&f.recip())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    #[serde(serialize_with = "crate::io::ser_rationals")]
    pub ell: Vec<Rational>,
    #[serde(serialize_with = "crate::io::ser_rationals")]
    pub reconstruction: Vec<Rational>,
}

/// Coordinates `ell` of `g = sum a_n z^n` in the first row of
/// `H^{-1} U(z) z^N`, and the reconstruction of every supplied `a_n` from them.
pub fn decompose(
    l: &DiffOp,
    coeffs: &[Rational],
    sh: &ShearingResult,
    fs: &FrobeniusSeries,
) -> Result<Decomposition, LocalError> {
    let mu = l.order();
    assert_eq!(fs.size(), mu, "series size differs from operator order");
    let b0 = sh.b0 as i64;
    let len = coeffs.len();
    if len < 2 * mu + b0 as usize {
        return Err(LocalError::InsufficientCoefficients { rank: 0, needed: mu });
    }
    let need = len + b0 as usize;
    if fs.u.len() < need {
        return Err(LocalError::SeriesTooShort {
            need,
            have: fs.u.len(),
        });
    }
    let h_row: Vec<_> = sh.h_inv.row(0).to_vec();
    // W_m = coefficient of z^m in row 1 of H^{-1} U(z).
    let w = |m: i64| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); mu];
        for (j, hj) in h_row.iter().enumerate() {
            for (t, c) in hj.terms() {
                let idx = m - t;
                if idx < 0 {
                    continue;
                }
                let un = &fs.u[idx as usize];
                for (k, o) in out.iter_mut().enumerate() {
                    let x = un.get(j, k);
                    if !x.is_zero() {
                        *o += c * x;
                    }
                }
            }
        }
        out
    };
    let logs = log_power_matrices(&fs.n);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut ws = Vec::with_capacity(len + b0 as usize);
    for m in -b0..len as i64 {
        let wm = w(m);
        for (k, pk) in logs.iter().enumerate() {
            let row = pk.transpose_mul_vec(&wm);
            if k == 0 {
                rows.push(row);
                rhs.push(if m < 0 { Rational::zero() } else { coeffs[m as usize].clone() });
            } else if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
                rhs.push(Rational::zero());
            }
        }
        ws.push(wm);
    }
    let a = Matrix::from_fn(rows.len(), mu, |i, j| rows[i][j].clone());
    let ell = match solve(&a, &rhs) {
        Solve::Unique(x) => x,
        Solve::Inconsistent => return Err(LocalError::NotASolution),
        Solve::Underdetermined { rank } => {
            return Err(LocalError::InsufficientCoefficients { rank, needed: mu })
        }
    };
    // a_n = sum_{i,j,k} sum_t ell_i P_{k,i}(0) h_{1,j,t} u_{j,k,n-t}
    let p0 = &logs[0];
    let p0_ell = p0.mul_vec(&ell);
    let reconstruction: Vec<Rational> = (0..len)
        .map(|n| {
            let wn = &ws[n + b0 as usize];
            wn.iter().zip(&p0_ell).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect();
    if let Some(n) = (0..len).find(|&n| reconstruction[n] != coeffs[n]) {
        return Err(LocalError::ReconstructionMismatch(n));
    }
    Ok(Decomposition {
        ell,
        reconstruction,
    })
}

trait RowAction {
    fn transpose_mul_vec(&self, v: &[Rational]) -> Vec<Rational>;
}

impl RowAction for Matrix<Rational> {
    /// Row vector `v` times the matrix.
    fn transpose_mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| {
                (0..self.rows()).fold(Rational::zero(), |acc, i| {
                    let x = self.get(i, j);
                    if x.is_zero() || v[i].is_zero() {
                        acc
                    } else {
                        acc + &v[i] * x
                    }
                })
            })
            .collect()
    }
}
