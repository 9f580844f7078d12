//! Small integer helpers shared across the crate.

use num_rational::Ratio;

/// Exact rationals used in every report.
pub type Rational = Ratio<i128>;

pub fn ipow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer power overflow")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation as (prime, multiplicity), primes ascending.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factor(q).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// `ℓ`-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, prime: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n % prime == 0 {
        n /= prime;
        v += 1;
    }
    v
}

/// `ℓ`-adic valuation of `x mod ℓ^exp`; returns `exp` for zero.
pub fn valuation_mod(x: u64, prime: u64, exp: u32) -> u32 {
    if x == 0 {
        exp
    } else {
        valuation(x, prime).min(exp)
    }
}

pub fn is_power_of(mut n: u64, prime: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n % prime == 0 {
        n /= prime;
    }
    n == 1
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

pub fn rational(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_prime_power() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(2, 9), Some(5));
        assert_eq!(mod_inverse(3, 9), None);
        assert_eq!(mod_pow(2, 10, 1000), 24);
    }
}
