//! Frobenius matrix U(z) z^N of the Apery system, the per-prime valuation
//! bound on U_n, and reconstruction of a_n from the local basis.

use holodenom::localsystem::{cd_bound_check, companion, decompose, frobenius_series, shear};
use holodenom::numkernel::int;
use holodenom::recurrence::unroll;
use holodenom::{DiffOp, InitialData, Recurrence};

fn main() {
    let l = DiffOp::apery();
    let sh = shear(&companion(&l).unwrap()).unwrap();
    let fs = frobenius_series(&sh.a_sheared, 100).unwrap();
    print!("N =\n{}", fs.n);
    print!("U_1 =\n{}", fs.u[1]);
    let exact = (1..=100).all(|n| fs.relation_defect(n).is_zero());
    println!("relation exact for n <= 100: {exact}");

    for p in [5, 7, 11] {
        let rep = cd_bound_check(&fs, p, 100).unwrap();
        println!("p = {p}: exponent {}, {} violations", rep.exponent, rep.violations.len());
    }

    let a = unroll(&Recurrence::apery(), &InitialData::from_values([int(1), int(5)]), 50).unwrap();
    let d = decompose(&l, &a, &sh, &fs).unwrap();
    println!("ell = {:?}", d.ell.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("reconstruction exact: {}", d.reconstruction == a);
}
