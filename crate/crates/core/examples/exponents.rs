//! Local exponents of the Apery operator at 0, 1 and infinity, and the
//! ramification index b for an operator with a half-integer exponent.

use holodenom::numkernel::int;
use holodenom::{DiffOp, Point};

fn main() {
    let l = DiffOp::apery();
    for point in [Point::Finite(int(0)), Point::Finite(int(1)), Point::Infinity] {
        let rep = l.exponents_at(&point);
        let exps: Vec<String> = rep.exponents.iter().map(ToString::to_string).collect();
        println!("at {point}: {{{}}} regular = {}", exps.join(", "), rep.regular);
    }

    // theta (2 theta - 1) - z (theta + 1)(2 theta + 1): exponents 0 and 1/2
    let half = DiffOp::from_ints(&[&[-1], &[1, -5], &[0, 2, -2]]).unwrap();
    let b = half.compute_b().unwrap();
    let pulled = half.pullback_power(b);
    println!("b = {b}; exponents after z = x^b: {:?}",
        pulled.exponents_at_zero().exponents.iter().map(ToString::to_string).collect::<Vec<_>>());
}
