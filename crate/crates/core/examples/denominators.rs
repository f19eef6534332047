//! Denominator certificates and inference on polylogarithm coefficients.

use holodenom::denomlab::{certify, infer_c, infer_s, valuation_profile};
use holodenom::numkernel::{ratio, Rational};
use holodenom::PrimeWindow;
use num_bigint::BigUint;

fn main() {
    let window = PrimeWindow::new(5, 97).unwrap();
    for k in 1..=3u32 {
        // Li_k(z)/z has a_n = 1/(n+1)^k
        let a: Vec<Rational> = (0..=300).map(|n| ratio(1, (n + 1i64).pow(k))).collect();
        let s = infer_s(&a, 1, 1, 300, &window, 8);
        println!("1/(n+1)^{k}: s = {s:?}");
        let cert = certify(&a, k - 1, 1, 1, &BigUint::from(1u32), 300);
        println!("  s = {} fails with {:?}", k - 1, cert.witness);
    }

    // 1/2^(n+1) needs C = 2 and no D_n at all
    let a: Vec<Rational> = (0..=50).map(|n| Rational::new(1.into(), num_bigint::BigInt::from(2).pow(n + 1))).collect();
    println!("C for 1/2^(n+1): {}", infer_c(&a, 0, 1, 0, 50, &[2, 3]));

    let li2: Vec<Rational> = (0..=30).map(|n| ratio(1, (n + 1i64).pow(2))).collect();
    let prof = valuation_profile(&li2, 5, 30);
    println!("v_5 of 1/(n+1)^2: {:?}", prof.values.iter().flatten().collect::<Vec<_>>());
}
