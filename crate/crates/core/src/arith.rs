//! Integer and rational helpers shared by every module: factorization,
//! totients, binomials, and the `Rat` alias used for all exact scalars.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Always reduced with positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `num/den` even for integers, the serialization form used in
/// JSON exports.
pub fn rat_string(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num/den` or a bare integer.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// n! as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= k;
    }
    acc
}

/// Binomial coefficient with the conventions used throughout: zero whenever
/// n < 0, k < 0 or k > n, and C(0,0) = 1.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

pub fn binom_rat(n: i64, k: i64) -> Rat {
    Rat::from_integer(binom(n, k))
}

/// (-1)^e for a possibly negative exponent.
pub fn sign_pow(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Number of divisors of n.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| k as u64 + 1).product()
}

/// All divisors of n in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, k) in factorize(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..k {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// gcd of a residue with the level. Residue 0 reduces to the level itself,
/// which is the convention every gcd condition in this crate relies on.
pub fn residue_gcd(a: u64, n: u64) -> u64 {
    num_integer::gcd(a % n, n)
}

/// Divisor pairs (d, n/d) of n, d ascending.
pub fn divisor_pairs(n: u64) -> Vec<(u64, u64)> {
    divisors(n).into_iter().map(|d| (d, n / d)).collect()
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}
