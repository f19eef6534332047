//! Linear recurrences with polynomial coefficients and their correspondence
//! with differential operators.
//!
//! A [`Recurrence`] is the relation `sum_d q_d(n) v_{n+d} = 0`, required for
//! every `n >= n_start`, with the convention `v_m = 0` for `m < 0`. The
//! recurrence read off an operator holds for all `n >= 0` because it is the
//! coefficient of `z^n` in `L(sum v_m z^m)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::numkernel::{Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("recurrence has no nonzero coefficient")]
    Empty,
    #[error("singular index {index} without patch value")]
    MissingPatch { index: usize },
    #[error("insufficient initial data: missing indices {missing:?}")]
    InsufficientInitialData { missing: Vec<usize> },
    #[error("initial data inconsistent with the relation at n = {n}")]
    Inconsistent { n: i64 },
    #[error("relation only determines an order-zero operator")]
    Degenerate,
    #[error("sequence too short: need at least {required} terms, got {got}")]
    InsufficientLength { required: usize, got: usize },
    #[error("bad shift key {0:?}")]
    BadShift(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    shifts: BTreeMap<i64, Poly>,
    n_start: i64,
}

impl Recurrence {
    pub fn new(mut shifts: BTreeMap<i64, Poly>, n_start: i64) -> Result<Self, RecurrenceError> {
        shifts.retain(|_, p| !p.is_zero());
        if shifts.is_empty() {
            return Err(RecurrenceError::Empty);
        }
        Ok(Self { shifts, n_start })
    }

    /// `(n+2)^3 U_{n+2} - (34n^3+153n^2+231n+117) U_{n+1} + (n+1)^3 U_n = 0` for `n >= 0`.
    pub fn apery() -> Self {
        let cube = |a: i64| Poly::from_ints(&[a, 1]).pow(3);
        let shifts = [
            (0, cube(1)),
            (1, Poly::from_ints(&[-117, -231, -153, -34])),
            (2, cube(2)),
        ];
        Self::new(shifts.into_iter().collect(), 0).unwrap()
    }

    pub fn shifts(&self) -> &BTreeMap<i64, Poly> {
        &self.shifts
    }

    pub fn q(&self, d: i64) -> Poly {
        self.shifts.get(&d).cloned().unwrap_or_default()
    }

    pub fn n_start(&self) -> i64 {
        self.n_start
    }

    pub fn with_n_start(mut self, n_start: i64) -> Self {
        self.n_start = n_start;
        self
    }

    pub fn d_min(&self) -> i64 {
        *self.shifts.keys().next().unwrap()
    }

    pub fn d_max(&self) -> i64 {
        *self.shifts.keys().next_back().unwrap()
    }

    /// Re-indexed so the lowest shift is 0, scaled to integral primitive
    /// coefficients with positive leading coefficient of the top shift.
    pub fn canonical(&self) -> Recurrence {
        let dmin = self.d_min();
        let alpha = Rational::from_integer(BigInt::from(-dmin));
        let moved: BTreeMap<i64, Poly> = self
            .shifts
            .iter()
            .map(|(d, p)| (d - dmin, p.taylor_shift(&alpha)))
            .collect();
        let scale = joint_primitive_scale(moved.values());
        Recurrence {
            shifts: moved.iter().map(|(d, p)| (*d, p.scale(&scale))).collect(),
            n_start: self.n_start + dmin,
        }
    }

    /// Same relation up to re-indexing and a nonzero rational factor.
    pub fn equivalent(&self, other: &Recurrence) -> bool {
        self.canonical().shifts == other.canonical().shifts
    }

    /// Smallest index fixed by the relation at `n_start`; indices below it are free.
    fn first_determined(&self) -> i64 {
        self.n_start + self.d_max()
    }
}

/// Rational factor turning a family of polynomials into jointly primitive
/// integral ones, positive on the leading coefficient of the last polynomial.
fn joint_primitive_scale<'a>(polys: impl Iterator<Item = &'a Poly> + Clone) -> Rational {
    let den = polys
        .clone()
        .flat_map(|p| p.coeffs().iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let g = polys
        .clone()
        .flat_map(|p| p.coeffs().iter())
        .fold(BigInt::zero(), |acc, c| {
            acc.gcd(&(c * Rational::from_integer(den.clone())).to_integer())
        });
    let mut scale = Rational::new(den, g);
    if polys
        .last()
        .and_then(Poly::leading)
        .is_some_and(Signed::is_negative)
    {
        scale = -scale;
    }
    scale
}

/// Relation satisfied by the Taylor coefficients of any `y` with `L y = 0`:
/// `q_d(n) = sum_i b_{i,i-d} (n+d)(n+d-1)...(n+d-i+1)`, valid for `n >= 0`.
pub fn to_recurrence(l: &DiffOp) -> Recurrence {
    let mut shifts: BTreeMap<i64, Poly> = BTreeMap::new();
    for (i, b) in l.coeffs().iter().enumerate() {
        for (k, c) in b.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = i as i64 - k as i64;
            let term = Poly::falling_factorial(i, d).scale(c);
            let e = shifts.entry(d).or_default();
            *e = &*e + &term;
        }
    }
    Recurrence::new(shifts, 0).expect("nonzero operator gives a nonzero recurrence")
}

/// Operator annihilating every solution of `R`.
///
/// The relation is realized as the coefficient sequence of some `L_c y`; if the
/// relation leaves the first `e` coefficients of `L_c y` unconstrained the
/// result is `(d/dz)^e ∘ L_c`.
pub fn to_operator(r: &Recurrence) -> Result<DiffOp, RecurrenceError> {
    // p_d(m) = q_d(m - d), expanded in falling factorials of m
    let mut falling: Vec<(i64, Vec<Rational>)> = Vec::new();
    for (d, q) in &r.shifts {
        let p = q.taylor_shift(&Rational::from_integer(BigInt::from(-d)));
        falling.push((*d, p.to_falling_basis()));
    }
    let c = falling
        .iter()
        .flat_map(|(d, fs)| {
            fs.iter()
                .enumerate()
                .filter(|(_, f)| !f.is_zero())
                .map(move |(i, _)| i as i64 - d)
        })
        .min()
        .ok_or(RecurrenceError::Empty)?;
    let order = falling
        .iter()
        .map(|(_, fs)| fs.len().saturating_sub(1))
        .max()
        .unwrap_or(0);
    let mut cols: Vec<Vec<Rational>> = vec![Vec::new(); order + 1];
    for (d, fs) in &falling {
        for (i, f) in fs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let k = (i as i64 - d - c) as usize;
            let col = &mut cols[i];
            if col.len() <= k {
                col.resize(k + 1, Rational::zero());
            }
            col[k] += f;
        }
    }
    let extra = r.n_start - c;
    let coeffs: Vec<Poly> = cols.into_iter().map(Poly::from_coeffs).collect();
    if coeffs.len() < 2 {
        if extra <= 0 {
            return Err(RecurrenceError::Degenerate);
        }
        // (d/dz) ∘ B_0 = B_0' + B_0 d/dz
        let b0 = coeffs.into_iter().next().unwrap();
        let op = DiffOp::new(vec![b0.derivative(), b0]).map_err(|_| RecurrenceError::Degenerate)?;
        return Ok(if extra > 1 {
            op.left_compose_derivative(extra as usize - 2)
        } else {
            op
        });
    }
    let op = DiffOp::new(coeffs).map_err(|_| RecurrenceError::Degenerate)?;
    Ok(if extra > 0 {
        op.left_compose_derivative(extra as usize - 1)
    } else {
        op
    })
}

/// Values the unroller cannot derive on its own.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InitialData {
    pub base: BTreeMap<usize, Rational>,
    /// Values at singular indices, where the top coefficient vanishes.
    pub patches: BTreeMap<usize, Rational>,
}

impl InitialData {
    /// Base values for indices `0, 1, ..., values.len() - 1`.
    pub fn from_values(values: impl IntoIterator<Item = Rational>) -> Self {
        Self {
            base: values.into_iter().enumerate().collect(),
            patches: BTreeMap::new(),
        }
    }

    pub fn with_patch(mut self, index: usize, value: Rational) -> Self {
        self.patches.insert(index, value);
        self
    }

    fn given(&self, idx: usize) -> Option<&Rational> {
        self.base.get(&idx).or_else(|| self.patches.get(&idx))
    }
}

/// Coefficients as jointly primitive integer vectors, for cheap evaluation.
struct IntRelation {
    rows: Vec<(i64, Vec<BigInt>)>,
}

impl IntRelation {
    fn new(r: &Recurrence) -> Self {
        let scale = joint_primitive_scale(r.shifts.values());
        let rows = r
            .shifts
            .iter()
            .map(|(d, q)| {
                let ints = q
                    .scale(&scale)
                    .coeffs()
                    .iter()
                    .map(|c| c.to_integer())
                    .collect();
                (*d, ints)
            })
            .collect();
        Self { rows }
    }

    fn eval(coeffs: &[BigInt], n: i64) -> BigInt {
        let x = BigInt::from(n);
        coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &x + c)
    }
}

/// Exact values `v_0..v_N` of the solution fixed by `init`.
pub fn unroll(r: &Recurrence, init: &InitialData, n_max: usize) -> Result<Vec<Rational>, RecurrenceError> {
    let rel = IntRelation::new(r);
    let dmax = r.d_max();
    let first = r.first_determined().max(0) as usize;
    let missing: Vec<usize> = (0..first.min(n_max + 1))
        .filter(|i| init.given(*i).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(RecurrenceError::InsufficientInitialData { missing });
    }
    let mut v: Vec<Rational> = (0..first.min(n_max + 1))
        .map(|i| init.given(i).unwrap().clone())
        .collect();
    let mut n = r.n_start;
    while n + dmax <= n_max as i64 {
        let idx = n + dmax;
        if idx >= 0 {
            let idx = idx as usize;
            let mut rest = Rational::zero();
            let mut lead = BigInt::zero();
            for (d, coeffs) in &rel.rows {
                let q = IntRelation::eval(coeffs, n);
                if *d == dmax {
                    lead = q;
                    continue;
                }
                let m = n + d;
                if m >= 0 && !q.is_zero() {
                    rest += &v[m as usize] * Rational::from_integer(q);
                }
            }
            let value = if lead.is_zero() {
                if !rest.is_zero() {
                    return Err(RecurrenceError::Inconsistent { n });
                }
                init.patches
                    .get(&idx)
                    .or_else(|| init.base.get(&idx))
                    .cloned()
                    .ok_or(RecurrenceError::MissingPatch { index: idx })?
            } else {
                let value = -rest / Rational::from_integer(lead);
                if init.given(idx).is_some_and(|g| *g != value) {
                    return Err(RecurrenceError::Inconsistent { n });
                }
                value
            };
            debug_assert_eq!(v.len(), idx);
            v.push(value);
        }
        n += 1;
    }
    v.truncate(n_max + 1);
    Ok(v)
}

/// Minimum number of coefficients [`residual`] accepts for `L`.
pub fn residual_required_len(l: &DiffOp) -> usize {
    l.order() + l.max_degree() + 1
}

/// `P(z) = L(sum_n coeffs_n z^n)`, computed for every power of `z` that the
/// supplied prefix determines (`n <= len - 1 - d_max`).
pub fn residual(l: &DiffOp, coeffs: &[Rational]) -> Result<Poly, RecurrenceError> {
    let required = residual_required_len(l);
    if coeffs.len() < required {
        return Err(RecurrenceError::InsufficientLength {
            required,
            got: coeffs.len(),
        });
    }
    let r = to_recurrence(l);
    let last = coeffs.len() as i64 - 1 - r.d_max();
    let out: Vec<Rational> = (0..=last)
        .map(|n| {
            r.shifts.iter().fold(Rational::zero(), |acc, (d, q)| {
                let m = n + d;
                if m < 0 || coeffs[m as usize].is_zero() {
                    acc
                } else {
                    acc + q.eval(&Rational::from_integer(BigInt::from(n))) * &coeffs[m as usize]
                }
            })
        })
        .collect();
    Ok(Poly::from_coeffs(out))
}

/// Recurrence JSON: `{"variable": "n", "shifts": {"0": poly, ...}, "n_start": 0}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecurrenceJson {
    pub variable: String,
    pub shifts: BTreeMap<String, Poly>,
    #[serde(default)]
    pub n_start: i64,
}

impl From<&Recurrence> for RecurrenceJson {
    fn from(r: &Recurrence) -> Self {
        Self {
            variable: "n".into(),
            shifts: r.shifts.iter().map(|(d, p)| (d.to_string(), p.clone())).collect(),
            n_start: r.n_start,
        }
    }
}

impl TryFrom<RecurrenceJson> for Recurrence {
    type Error = RecurrenceError;
    fn try_from(j: RecurrenceJson) -> Result<Self, RecurrenceError> {
        let shifts = j
            .shifts
            .into_iter()
            .map(|(k, p)| {
                k.trim()
                    .parse::<i64>()
                    .map(|d| (d, p))
                    .map_err(|_| RecurrenceError::BadShift(k))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Recurrence::new(shifts, j.n_start)
    }
}
