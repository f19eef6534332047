//! Companion system of L(z + 1) and the shearing gauge that makes its residue nilpotent.

use holodenom::localsystem::{companion, shear, verify_shearing};
use holodenom::numkernel::int;
use holodenom::DiffOp;

fn main() {
    let l = DiffOp::apery().shift(&int(1));
    let sys = companion(&l).unwrap();
    print!("residue before:\n{}", sys.residue());
    let sh = shear(&sys).unwrap();
    println!("steps = {}, b0 = {}", sh.steps, sh.b0);
    print!("residue after:\n{}", sh.a_sheared.residue());
    println!("gauge identity holds: {}", verify_shearing(&sys, &sh));
}
