use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::NumError;

/// Sieve of Eratosthenes, all primes `<= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime_after(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// `floor(log_p n)` for `n >= 1`, and `0` for `n == 0`. Equals `v_p(D_n)`.
pub fn floor_log(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut pk = p;
    while pk <= n {
        e += 1;
        match pk.checked_mul(p) {
            Some(next) => pk = next,
            None => break,
        }
    }
    e
}

/// `D_n = lcm(1, 2, ..., n)`, with `D_0 = D_1 = 1`.
pub fn dn(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for p in primes_up_to(n) {
        acc *= BigUint::from(p).pow(floor_log(n, p));
    }
    acc
}

/// An inclusive range of primes `[p_min, p_max]` used wherever a check has to be
/// restricted to "sufficiently large" primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeWindow {
    p_min: u64,
    p_max: u64,
}

impl PrimeWindow {
    pub fn new(p_min: u64, p_max: u64) -> Result<Self, NumError> {
        if p_min < 2 || p_max < p_min {
            return Err(NumError::BadWindow { p_min, p_max });
        }
        Ok(Self { p_min, p_max })
    }

    pub fn p_min(&self) -> u64 {
        self.p_min
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    pub fn primes(&self) -> Vec<u64> {
        primes_up_to(self.p_max)
            .into_iter()
            .filter(|&p| p >= self.p_min)
            .collect()
    }

    /// Primes strictly below the window.
    pub fn primes_below(&self) -> Vec<u64> {
        primes_up_to(self.p_min.saturating_sub(1))
    }
}

const TRIAL_LIMIT: u64 = 1 << 20;

/// Partial factorization by trial division up to 2^20.
///
/// Returns the prime factors found and the unfactored cofactor (1 when the
/// factorization is complete). A cofactor below 2^40 is necessarily prime and
/// is moved into the factor list.
// TODO: Pollard rho for cofactors above 2^40; they are currently treated as a single factor.
pub fn factor(n: &BigUint) -> (Vec<(BigUint, u32)>, BigUint) {
    let mut factors = Vec::new();
    if n.is_zero() {
        return (factors, BigUint::zero());
    }
    let mut m = n.clone();
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let bd = BigUint::from(d);
        if &bd * &bd > m {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&bd);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            factors.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return (factors, m);
    }
    let limit_sq = BigUint::from(TRIAL_LIMIT) * BigUint::from(TRIAL_LIMIT);
    let d_reached = BigUint::from(d);
    if m < limit_sq || &d_reached * &d_reached > m {
        factors.push((m, 1));
        return (factors, BigUint::one());
    }
    (factors, m)
}

/// All positive divisors, using [`factor`]; an unfactored cofactor is treated as prime.
pub fn divisors(n: &BigUint) -> Vec<BigUint> {
    let (mut fs, cof) = factor(n);
    if !cof.is_one() && !cof.is_zero() {
        fs.push((cof, 1));
    }
    let mut divs = vec![BigUint::one()];
    for (p, e) in fs {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigUint::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Smallest prime factor that trial division can find; falls back to `n` itself.
pub fn smallest_factor(n: &BigUint) -> BigUint {
    let (fs, cof) = factor(n);
    fs.into_iter().map(|(p, _)| p).min().unwrap_or(cof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn lcm_brute(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
    }

    #[test]
    fn dn_small_values() {
        assert_eq!(dn(0), BigUint::one());
        assert_eq!(dn(1), BigUint::one());
        assert_eq!(dn(6), BigUint::from(60u32));
        assert_eq!(dn(10), BigUint::from(2520u32));
    }

    #[test]
    fn dn_matches_iterated_lcm() {
        for n in 0..=120 {
            assert_eq!(dn(n), lcm_brute(n), "n = {n}");
        }
    }

    #[test]
    fn floor_log_is_valuation_of_dn() {
        assert_eq!(floor_log(30, 5), 2);
        assert_eq!(floor_log(0, 5), 0);
        assert_eq!(floor_log(4, 5), 0);
        assert_eq!(floor_log(125, 5), 3);
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn window_validation() {
        assert!(PrimeWindow::new(1, 5).is_err());
        assert!(PrimeWindow::new(7, 5).is_err());
        let w = PrimeWindow::new(5, 13).unwrap();
        assert_eq!(w.primes(), vec![5, 7, 11, 13]);
        assert_eq!(w.primes_below(), vec![2, 3]);
    }

    #[test]
    fn factor_and_divisors() {
        let (fs, cof) = factor(&BigUint::from(360u32));
        assert!(cof.is_one());
        assert_eq!(
            fs,
            vec![
                (BigUint::from(2u32), 3),
                (BigUint::from(3u32), 2),
                (BigUint::from(5u32), 1)
            ]
        );
        assert_eq!(divisors(&BigUint::from(12u32)).len(), 6);
        assert_eq!(smallest_factor(&BigUint::from(1_000_003u64 * 7)), BigUint::from(7u32));
        assert_eq!(smallest_factor(&BigUint::from(1_000_003u64)), BigUint::from(1_000_003u64));
    }
}
