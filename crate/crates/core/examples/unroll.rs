//! Exact unrolling of the Apery recurrence and the residual L(sum v_n z^n)
//! for two different pairs of initial values.

use holodenom::denomlab::delta_sequence;
use holodenom::numkernel::int;
use holodenom::recurrence::{residual, unroll};
use holodenom::{DiffOp, InitialData, Recurrence};

fn main() {
    let r = Recurrence::apery();
    let a = unroll(&r, &InitialData::from_values([int(1), int(5)]), 30).unwrap();
    let hat = unroll(&r, &InitialData::from_values([int(0), int(6)]), 30).unwrap();
    for n in 0..6 {
        println!("{n:>2}  {:>12}  {}", a[n], hat[n]);
    }
    println!("delta_30 for a_n: {}", delta_sequence(&a)[30]);
    println!("delta_30 for the second sequence: {}", delta_sequence(&hat)[30]);

    let l = DiffOp::apery();
    println!("L(sum a_n z^n) = {}", residual(&l, &a).unwrap().to_string_in("z"));
    println!("L(sum v_n z^n) = {}", residual(&l, &hat).unwrap().to_string_in("z"));
}
