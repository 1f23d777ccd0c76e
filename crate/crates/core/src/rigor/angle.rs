//! Exact angles in `Q/Z`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::ball::{Ball, EPS};
use crate::error::{Error, Result};

/// A rational number modulo 1, kept reduced with `0 <= num < den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    num: BigUint,
    den: BigUint,
}

impl RationalAngle {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.sign() != Sign::Plus {
            return Err(Error::InvalidArgument(format!("angle denominator {den} must be positive")));
        }
        Ok(Self::normalize(num, den))
    }

    pub fn zero() -> Self {
        RationalAngle {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// `1/q`.
    pub fn unit_fraction(q: &BigUint) -> Result<Self> {
        RationalAngle::new(BigInt::one(), BigInt::from(q.clone()))
    }

    fn normalize(num: BigInt, den: BigInt) -> Self {
        let r = num.mod_floor(&den);
        let g = r.gcd(&den);
        let (n, d) = if r.is_zero() {
            (BigInt::zero(), BigInt::one())
        } else {
            (r / &g, den / &g)
        };
        RationalAngle {
            num: n.to_biguint().expect("non-negative"),
            den: d.to_biguint().expect("positive"),
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RationalAngle) -> RationalAngle {
        let n = BigInt::from(&self.num * &other.den + &other.num * &self.den);
        let d = BigInt::from(&self.den * &other.den);
        Self::normalize(n, d)
    }

    pub fn neg(&self) -> RationalAngle {
        Self::normalize(-BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }

    pub fn sub(&self, other: &RationalAngle) -> RationalAngle {
        self.add(&other.neg())
    }

    pub fn mul_int(&self, k: &BigInt) -> RationalAngle {
        Self::normalize(BigInt::from(self.num.clone()) * k, BigInt::from(self.den.clone()))
    }

    /// `theta / 2^l`, taking the representative in `[0, 1)` first.
    pub fn div_pow2(&self, l: u32) -> RationalAngle {
        let d = BigInt::from(&self.den << l as usize);
        Self::normalize(BigInt::from(self.num.clone()), d)
    }

    /// `2^n * theta mod 1` by modular exponentiation.
    pub fn mul_pow2(&self, n: &BigUint) -> RationalAngle {
        let p = BigUint::from(2u32).modpow(n, &self.den);
        Self::normalize(BigInt::from(&self.num * p), BigInt::from(self.den.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        match (self.num.to_u64(), self.den.to_u64()) {
            (Some(n), Some(d)) => n as f64 / d as f64,
            _ => ratio_f64(&self.num, &self.den),
        }
    }

    /// `(num, den)` when both fit in `u64`.
    pub fn as_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.num.to_u64()?, self.den.to_u64()?))
    }

    /// Enclosure of `e(theta)`.
    pub fn e(&self) -> Ball {
        if let Some((n, d)) = self.as_u64_pair() {
            if d < (1 << 61) {
                return e_ratio(n, d);
            }
        }
        let four_num = &self.num << 2usize;
        let (quadrant, rem) = four_num.div_rem(&self.den);
        let y = ratio_f64(&rem, &(&self.den << 2usize));
        rotate_quadrant(quarter_arc(y, rem.is_zero()), quadrant.to_u64().unwrap_or(0))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `a / b` for big integers, to within a couple of ulps.
fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(60);
    let a = a >> shift as usize;
    let b = b >> shift as usize;
    a.to_f64().unwrap_or(f64::NAN) / b.to_f64().unwrap_or(f64::NAN)
}

/// Enclosure of `e(num/den)` for `den < 2^61`. Quarter turns are exact.
pub fn e_ratio(num: u64, den: u64) -> Ball {
    debug_assert!(den > 0 && den < (1 << 61));
    let n = (num % den) as u128;
    let four = 4 * n;
    let quadrant = (four / den as u128) as u64;
    let rem = (four % den as u128) as u64;
    let y = rem as f64 / (4 * den) as f64;
    rotate_quadrant(quarter_arc(y, rem == 0), quadrant)
}

/// `e(y)` for `y` in `[0, 1/4)`; `y` carries at most two ulps of relative error.
fn quarter_arc(y: f64, exact_zero: bool) -> Ball {
    if exact_zero {
        return Ball::ONE;
    }
    let phi = std::f64::consts::TAU * y;
    let c = Complex64::new(phi.cos(), phi.sin());
    // angle error <= 4 eps * phi, libm error <= 2 eps per component
    let r = 5.0 * EPS * phi + 4.0 * EPS;
    Ball::with_radius(c, r)
}

fn rotate_quadrant(b: Ball, quadrant: u64) -> Ball {
    match quadrant % 4 {
        0 => b,
        1 => b.mul_i(),
        2 => -b,
        _ => -(b.mul_i()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn angle(n: i64, d: i64) -> RationalAngle {
        RationalAngle::new(n, d).unwrap()
    }

    #[test]
    fn normalization() {
        let a = angle(-4, 9);
        assert_eq!(a, angle(5, 9));
        assert_eq!(angle(6, 4), angle(1, 2));
        assert_eq!(angle(9, 9), RationalAngle::zero());
        assert!(RationalAngle::new(1, 0).is_err());
        assert!(RationalAngle::new(1, -3).is_err());
    }

    #[test]
    fn quarter_turns_are_exact() {
        let i = angle(1, 4).e();
        assert_eq!(i.center(), Complex64::new(0.0, 1.0));
        assert_eq!(i.radius(), 0.0);
        assert_eq!(angle(1, 2).e().center(), Complex64::new(-1.0, 0.0));
        assert_eq!(angle(3, 4).e().center(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn third_and_ninth_turns() {
        let t = angle(1, 3).e();
        assert!(t.contains(Complex64::new(-0.5, 3f64.sqrt() / 2.0)));
        assert!(t.radius() < 1e-14);
        // cos(10 pi/9), sin(10 pi/9)
        let v = angle(5, 9).e();
        assert!(v.contains(Complex64::new(-0.9396926207859084, -0.3420201433256687)));
    }

    #[test]
    fn doubling_and_halving() {
        let t = angle(1, 9);
        assert_eq!(t.mul_pow2(&BigUint::from(5u32)), angle(5, 9));
        assert_eq!(t.mul_pow2(&BigUint::from(6u32)), t);
        assert_eq!(angle(1, 9).div_pow2(1), angle(1, 18));
        assert_eq!(angle(1, 2).sub(&angle(1, 3)), angle(1, 6));
    }

    #[test]
    fn big_denominator_path_agrees_with_fast_path() {
        let q = BigUint::from(3u32).pow(40);
        let big = RationalAngle::new(BigInt::from(12345u32), BigInt::from(q.clone())).unwrap();
        let v = big.e();
        let x = 12345.0 / q.to_f64().unwrap();
        let exact = Complex64::new((std::f64::consts::TAU * x).cos(), (std::f64::consts::TAU * x).sin());
        assert!(v.contains(exact) || (v.center() - exact).norm() < 1e-15);
        assert!(v.radius() < 1e-14);
    }
}
