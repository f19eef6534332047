use serde::Serialize;

use super::{gauge_transform, is_nilpotent, laurent_identity, LaurentPoly, LocalError, LocalSystem};
use crate::matrix::Matrix;
use crate::numkernel::{int, rational_roots, Poly, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct ShearingResult {
    #[serde(serialize_with = "ser_laurent_matrix")]
    pub h: Matrix<LaurentPoly>,
    #[serde(serialize_with = "ser_laurent_matrix")]
    pub h_inv: Matrix<LaurentPoly>,
    pub a_sheared: LocalSystem,
    pub b0: u64,
    pub steps: usize,
}

fn ser_laurent_matrix<S: serde::Serializer>(m: &Matrix<LaurentPoly>, s: S) -> Result<S::Ok, S::Error> {
    m.map(LaurentPoly::to_ratfunc).serialize(s)
}

fn horner_matrix(f: &Poly, a: &Matrix<Rational>) -> Matrix<Rational> {
    let n = a.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(a).add(&Matrix::identity(n).scale(c));
    }
    acc
}

fn constant_laurent(m: &Matrix<Rational>) -> Matrix<LaurentPoly> {
    m.map(|c| LaurentPoly::constant(c.clone()))
}

fn diag_laurent(exps: &[i64]) -> Matrix<LaurentPoly> {
    let n = exps.len();
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            LaurentPoly::monomial(int(1), exps[i])
        } else {
            LaurentPoly::zero()
        }
    })
}

/// Integer eigenvalues of `A(0)` with multiplicity, ascending.
fn integer_eigenvalues(a0: &Matrix<Rational>) -> Result<Vec<Rational>, LocalError> {
    let report = rational_roots(&a0.charpoly_poly()).expect("characteristic polynomial is monic");
    if let Some(r) = report.roots.iter().find(|r| !r.is_integer()) {
        return Err(LocalError::NonIntegerEigenvalue(r.to_string()));
    }
    if !report.all_rational {
        return Err(LocalError::IrrationalEigenvalues);
    }
    Ok(report.roots)
}

/// Gauge `S` to a system whose residue is nilpotent by repeatedly splitting
/// off the top generalized eigenspace and lowering its eigenvalue by one.
pub fn shear(s: &LocalSystem) -> Result<ShearingResult, LocalError> {
    let mu = s.size();
    let mut a = s.matrix().clone();
    let mut h = laurent_identity(mu);
    let mut h_inv = laurent_identity(mu);
    let mut steps = 0;
    let mut apply = |a: &mut Matrix<_>, g: Matrix<LaurentPoly>, g_inv: Matrix<LaurentPoly>| {
        *a = gauge_transform(a, &g, &g_inv);
        h = g.mul(&h);
        h_inv = h_inv.mul(&g_inv);
    };
    loop {
        let a0 = LocalSystem::new(a.clone())?.residue();
        let eig = integer_eigenvalues(&a0)?;
        let top = eig.last().unwrap().clone();
        if eig[0] == top {
            let c = top.to_integer();
            if c != 0.into() {
                let c: i64 = c.try_into().expect("eigenvalue fits in i64");
                apply(&mut a, diag_laurent(&vec![-c; mu]), diag_laurent(&vec![c; mu]));
                steps += 1;
            }
            break;
        }
        let m = eig.iter().filter(|e| **e == top).count();
        let shifted = a0.sub(&Matrix::identity(mu).scale(&top));
        let v1 = shifted.pow(mu as u32).kernel();
        let lin = Poly::from_coeffs(vec![-top.clone(), int(1)]);
        let (g, _) = a0.charpoly_poly().div_rem(&lin.pow(m as u32));
        let v2 = horner_matrix(&g, &a0).kernel();
        debug_assert_eq!(v1.len(), m);
        debug_assert_eq!(v1.len() + v2.len(), mu);
        let basis = Matrix::from_columns(&[v1, v2].concat());
        let basis_inv = basis.inverse().expect("generalized eigenspaces span Q^mu");
        apply(&mut a, constant_laurent(&basis_inv), constant_laurent(&basis));
        let mut down = vec![0i64; mu];
        down[..m].fill(-1);
        let up: Vec<i64> = down.iter().map(|e| -e).collect();
        apply(&mut a, diag_laurent(&down), diag_laurent(&up));
        steps += 1;
    }
    let a_sheared = LocalSystem::new(a)?;
    debug_assert!(is_nilpotent(&a_sheared.residue()));
    let b0 = h_inv
        .iter()
        .filter_map(|(_, _, e)| e.degree_range())
        .map(|(lo, hi)| lo.unsigned_abs().max(hi.max(0) as u64))
        .max()
        .unwrap_or(0);
    Ok(ShearingResult {
        h,
        h_inv,
        a_sheared,
        b0,
        steps,
    })
}

/// Checks the gauge identity, `H H^{-1} = I` and nilpotence of the new residue.
pub fn verify_shearing(original: &LocalSystem, r: &ShearingResult) -> bool {
    let mu = original.size();
    r.h.mul(&r.h_inv) == laurent_identity(mu)
        && gauge_transform(original.matrix(), &r.h, &r.h_inv) == *r.a_sheared.matrix()
        && is_nilpotent(&r.a_sheared.residue())
}
