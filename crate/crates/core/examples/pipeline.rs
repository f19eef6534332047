//! End-to-end denominator analysis: Apery numbers under L, and the second
//! Apery sequence under D o L, where the exponent 3 is sharp.

use holodenom::denomlab::certify;
use holodenom::numkernel::int;
use holodenom::pipeline::theorem_one_analyze;
use holodenom::recurrence::unroll;
use holodenom::{DiffOp, InitialData, PrimeWindow, Recurrence};
use num_bigint::BigUint;

fn main() {
    let window = PrimeWindow::new(5, 97).unwrap();
    let r = Recurrence::apery();
    let a = unroll(&r, &InitialData::from_values([int(1), int(5)]), 100).unwrap();
    let rep = theorem_one_analyze(&DiffOp::apery(), &a, 100, &window).unwrap();
    println!("a_n: mu = {}, b = {}, b0 = {}, s = {}, C = {}, certificate {:?}",
        rep.mu, rep.b, rep.b0, rep.s, rep.c, rep.certificate.status);

    let hat = unroll(&r, &InitialData::from_values([int(0), int(6)]), 200).unwrap();
    let dl = DiffOp::apery().left_compose_derivative(0);
    let rep = theorem_one_analyze(&dl, &hat, 200, &window).unwrap();
    println!("second sequence: mu = {}, b0 = {}, s = {}, C = {}, certificate {:?}",
        rep.mu, rep.b0, rep.s, rep.c, rep.certificate.status);

    let one = BigUint::from(1u32);
    println!("with b0 = 0, s = 3: {:?}", certify(&hat, 3, 1, 0, &one, 200).status);
    println!("with b0 = 0, s = 2: {:?}", certify(&hat, 2, 1, 0, &one, 200).witness);
}
