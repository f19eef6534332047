//! Operator <-> recurrence translation, and the shifted Apery recurrence at z = 1.

use holodenom::numkernel::int;
use holodenom::recurrence::{to_operator, to_recurrence};
use holodenom::DiffOp;

fn main() {
    let l = DiffOp::apery();
    let r = to_recurrence(&l).canonical();
    println!("recurrence of L (n >= {}):", r.n_start());
    for (d, q) in r.shifts() {
        println!("  v_(n+{d}) * ({})", q.to_string_in("n"));
    }

    let back = to_operator(&r).unwrap();
    println!("round trip recovers L up to a scalar: {}", back.equivalent(&l));

    let shifted = to_recurrence(&l.shift(&int(1))).canonical();
    println!("recurrence of L(z + 1):");
    for (d, q) in shifted.shifts() {
        println!("  v_(n+{d}) * ({})", q.to_string_in("n"));
    }
}
