//! Exact integer machinery behind the vanishing Ramanujan sums: the parameter
//! family `q = 3^(2^a)`, multiplicative orders, and the congruences that let
//! `F` near `theta_0 = 1/q` be rewritten in terms of `S`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rigor::{e_ratio, Ball, RationalAngle};

/// Largest `a` accepted by [`make_params`]; `n_0` is about `2.9e7` at `a = 4`.
pub const DEFAULT_A_CAP: u32 = 4;

/// The tuple `(a, k = 2^a, q = 3^k, n_0 = phi(q), theta_0 = 1/q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamanujanParams {
    pub a: u32,
    pub k: u64,
    pub q: BigUint,
    pub n0: u64,
    pub theta0: RationalAngle,
}

impl RamanujanParams {
    /// `q` as a machine integer, when it fits.
    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }
}

pub fn make_params(a: u32) -> Result<RamanujanParams> {
    make_params_with_cap(a, DEFAULT_A_CAP)
}

/// Builds the parameters and verifies both invariants exactly. A failed
/// invariant is reported as [`Error::Invariant`].
pub fn make_params_with_cap(a: u32, cap: u32) -> Result<RamanujanParams> {
    if a == 0 {
        return Err(Error::InvalidArgument("a must be at least 1".into()));
    }
    if a > cap {
        return Err(Error::InvalidArgument(format!("a = {a} exceeds the cap {cap}")));
    }
    if a > 5 {
        return Err(Error::Unsupported(format!("a = {a}: n0 = 2*3^(2^a - 1) overflows u64")));
    }
    let k: u64 = 1 << a;
    let q = BigUint::from(3u32).pow(k as u32);
    let n0 = 2 * 3u64.pow((k - 1) as u32);

    let modulus = BigUint::one() << (a as usize + 2);
    if &q % &modulus != BigUint::one() {
        return Err(Error::Invariant(format!("q = 3^{k} is not 1 mod 2^{}", a + 2)));
    }
    let two = BigUint::from(2u32);
    if two.modpow(&BigUint::from(n0), &q) != BigUint::one() {
        return Err(Error::Invariant(format!("2^n0 is not 1 mod {q}")));
    }
    for p in [2u64, 3] {
        if two.modpow(&BigUint::from(n0 / p), &q) == BigUint::one() {
            return Err(Error::Invariant(format!("2 has order dividing n0/{p} mod {q}")));
        }
    }
    let theta0 = RationalAngle::unit_fraction(&q)?;
    Ok(RamanujanParams { a, k, q, n0, theta0 })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient by trial division.
pub fn totient(n: u64) -> u64 {
    prime_factors(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Multiplicative order of `g` modulo `q`.
pub fn order_mod(g: u64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("modulus {q} must be at least 2")));
    }
    if g.gcd(&q) != 1 {
        return Err(Error::NotCoprime(g.to_string(), q.to_string()));
    }
    let phi = totient(q);
    let mut ord = phi;
    for (p, _) in prime_factors(phi) {
        while ord % p == 0 && pow_mod(g, ord / p, q) == 1 {
            ord /= p;
        }
    }
    Ok(ord)
}

/// Enclosure of `sum_{m=0}^{phi(q)-1} e(2^m s / q)`, phases exact.
pub fn ramanujan_sum(q: u64, s: i64) -> Result<Ball> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if (s.unsigned_abs()).gcd(&q) != 1 {
        return Err(Error::NotCoprime(s.to_string(), q.to_string()));
    }
    if q >= 1 << 61 {
        return Err(Error::Unsupported(format!("modulus {q} too large")));
    }
    let phi = totient(q);
    let mut p = s.rem_euclid(q as i64) as u64;
    let mut sum = Ball::ZERO;
    for _ in 0..phi {
        sum = sum + e_ratio(p, q);
        p = ((p as u128 * 2) % q as u128) as u64;
    }
    Ok(sum)
}

/// `2^n * theta mod 1`, exactly.
pub fn phase_pow2(n: u64, theta: &RationalAngle) -> RationalAngle {
    theta.mul_pow2(&BigUint::from(n))
}

/// Checks `2^(n_0 - l) theta_0 == theta_0/2^l - 1/2^l` in `Q/Z`.
#[allow(non_snake_case)]
pub fn check_modZ(params: &RamanujanParams, l: u32) -> Result<bool> {
    if l > params.a {
        return Err(Error::InvalidArgument(format!("l = {l} outside [0, {}]", params.a)));
    }
    let lhs = phase_pow2(params.n0 - l as u64, &params.theta0);
    let shift = RationalAngle::new(BigInt::one(), BigInt::one() << l as usize)?;
    let rhs = params.theta0.div_pow2(l).sub(&shift);
    Ok(lhs == rhs)
}
