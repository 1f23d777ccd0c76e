//! Complex ball arithmetic over `f64`.
//!
//! A [`Ball`] is a closed disk `{z : |z - center| <= radius}`. Every operation
//! returns a ball containing the exact image of its operands, so the true
//! mathematical value is never lost. The center is computed in ordinary
//! floating point; the radius absorbs operand radii, a bound on the center's
//! rounding error, and is itself rounded upward.
//!
//! Elementary functions (`exp`, `sin`, `cos`, `hypot`) come from the platform
//! libm and are assumed accurate to two ulp; the slack constants below allow
//! for four.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Machine epsilon, `2^-52`.
pub const EPS: f64 = f64::EPSILON;

/// Absorbs underflow in radius products.
const TINY: f64 = 4.0 * f64::MIN_POSITIVE;

/// `2*pi` rounded to nearest; the true value exceeds it by about `2.45e-16`.
const TWO_PI_BALL: Ball = Ball {
    center: Complex64::new(std::f64::consts::TAU, 0.0),
    radius: 2.5e-16,
};

/// Rounds a non-negative radius computation upward.
#[inline]
pub(crate) fn up(x: f64) -> f64 {
    x * (1.0 + 4.0 * EPS) + TINY
}

#[inline]
fn abs_up(z: Complex64) -> f64 {
    z.norm() * (1.0 + 2.0 * EPS)
}

#[inline]
fn abs_down(z: Complex64) -> f64 {
    (z.norm() * (1.0 - 2.0 * EPS)).max(0.0)
}

/// Closed complex disk enclosing an unknown exact value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Complex64,
    radius: f64,
}

impl Ball {
    pub const ZERO: Ball = Ball {
        center: Complex64::new(0.0, 0.0),
        radius: 0.0,
    };
    pub const ONE: Ball = Ball {
        center: Complex64::new(1.0, 0.0),
        radius: 0.0,
    };
    pub const I: Ball = Ball {
        center: Complex64::new(0.0, 1.0),
        radius: 0.0,
    };

    pub fn new(center: Complex64, radius: f64) -> Result<Ball> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite ball center {center}")));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid ball radius {radius}")));
        }
        Ok(Ball { center, radius })
    }

    /// Exactly representable point.
    pub fn exact(center: Complex64) -> Ball {
        Ball { center, radius: 0.0 }
    }

    pub fn point(re: f64, im: f64) -> Ball {
        Ball::exact(Complex64::new(re, im))
    }

    pub fn real(x: f64) -> Ball {
        Ball::point(x, 0.0)
    }

    /// Ball around `center`; panics on a negative or non-finite radius.
    pub fn with_radius(center: Complex64, radius: f64) -> Ball {
        Ball::new(center, radius).expect("valid ball")
    }

    /// The whole plane, produced when a computation overflows.
    pub(crate) fn unbounded() -> Ball {
        Ball {
            center: Complex64::new(0.0, 0.0),
            radius: f64::INFINITY,
        }
    }

    fn make(center: Complex64, radius: f64) -> Ball {
        if center.re.is_finite() && center.im.is_finite() && radius.is_finite() {
            Ball { center, radius }
        } else {
            Ball::unbounded()
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }

    /// Widens the radius by `extra >= 0`.
    pub fn inflate(self, extra: f64) -> Ball {
        debug_assert!(extra >= 0.0);
        Ball::make(self.center, up(self.radius + extra))
    }

    /// `(max(0, |c| - r), |c| + r)`; a positive lower end certifies the
    /// enclosed value is nonzero.
    pub fn abs_bounds(&self) -> (f64, f64) {
        let lo = (abs_down(self.center) - self.radius) * (1.0 - 2.0 * EPS);
        (lo.max(0.0), up(abs_up(self.center) + self.radius))
    }

    pub fn abs_upper(&self) -> f64 {
        self.abs_bounds().1
    }

    pub fn abs_lower(&self) -> f64 {
        self.abs_bounds().0
    }

    pub fn re_bounds(&self) -> (f64, f64) {
        let slack = self.radius * (1.0 + 2.0 * EPS);
        (
            self.center.re - slack - EPS * self.center.re.abs(),
            self.center.re + slack + EPS * self.center.re.abs(),
        )
    }

    pub fn im_bounds(&self) -> (f64, f64) {
        let slack = self.radius * (1.0 + 2.0 * EPS);
        (
            self.center.im - slack - EPS * self.center.im.abs(),
            self.center.im + slack + EPS * self.center.im.abs(),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() * (1.0 - 2.0 * EPS) <= self.radius
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0.0
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        (self.center - other.center).norm() * (1.0 - 2.0 * EPS) <= up(self.radius + other.radius)
    }

    /// True when every point of `self` lies in `other`.
    pub fn within(&self, other: &Ball) -> bool {
        up(abs_up(self.center - other.center) + self.radius) <= other.radius
    }

    pub fn conj(self) -> Ball {
        Ball::make(self.center.conj(), self.radius)
    }

    /// Multiplication by `i`, exact.
    pub fn mul_i(self) -> Ball {
        Ball::make(Complex64::new(-self.center.im, self.center.re), self.radius)
    }

    /// Multiplication by `2^k`. Exact unless the scaled center leaves the
    /// normal range.
    pub fn ldexp(self, k: i32) -> Ball {
        let s = pow2(k);
        let c = self.center * s;
        let mut r = self.radius * s;
        if k < 0 {
            // possible loss to subnormals/zero
            r += 2.0 * f64::MIN_POSITIVE;
            if s == 0.0 {
                r = up(abs_up(self.center) + self.radius) * f64::MIN_POSITIVE;
            }
        }
        Ball::make(c, up(r))
    }

    /// Multiplication by an exactly representable real.
    pub fn scale(self, x: f64) -> Ball {
        self * Ball::real(x)
    }

    pub fn sqr(self) -> Ball {
        self * self
    }

    pub fn powu(self, mut n: u32) -> Ball {
        let mut base = self;
        let mut acc = Ball::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// Real ball enclosing `|z|^2`.
    pub fn abs_sq(self) -> Ball {
        let p = self * self.conj();
        let (lo, hi) = p.re_bounds();
        let mid = 0.5 * (lo + hi);
        Ball::make(Complex64::new(mid, 0.0), up((hi - lo) * 0.5 + EPS * mid.abs()))
    }

    pub fn recip(self) -> Result<Ball> {
        let m = abs_down(self.center);
        if !(m > self.radius) {
            return Err(Error::DivisionByZero);
        }
        let c = self.center.inv();
        let gap = (m - self.radius) * (1.0 - 2.0 * EPS);
        let r = self.radius / (m * gap) * (1.0 + 4.0 * EPS) + 4.0 * EPS * abs_up(c);
        Ok(Ball::make(c, up(r)))
    }

    pub fn checked_div(self, rhs: Ball) -> Result<Ball> {
        Ok(self * rhs.recip()?)
    }

    /// `exp(z)` over the whole ball.
    pub fn exp(self) -> Ball {
        let a = self.center.re;
        let b = self.center.im;
        let ea = a.exp();
        if !ea.is_finite() {
            return Ball::unbounded();
        }
        let c = Complex64::new(ea * b.cos(), ea * b.sin());
        let propagated = ea * (1.0 + 4.0 * EPS) * self.radius.exp_m1() * (1.0 + 4.0 * EPS);
        Ball::make(c, up(propagated + 8.0 * EPS * ea))
    }

    /// `e(z) = exp(2*pi*i*z)`.
    pub fn e(self) -> Ball {
        (TWO_PI_BALL * self).mul_i().exp()
    }

    /// `e(z) - 1`, accurate for small `z`.
    pub fn e_minus_one(self) -> Ball {
        let w = (TWO_PI_BALL * self).mul_i();
        let a = w.center.re;
        let b = w.center.im;
        let ea = a.exp();
        if !ea.is_finite() {
            return Ball::unbounded();
        }
        let em1 = a.exp_m1();
        let sh = (0.5 * b).sin();
        let sb = b.sin();
        let re = em1 * b.cos() - 2.0 * sh * sh;
        let im = ea * sb;
        let c = Complex64::new(re, im);
        let scale = em1.abs() + 2.0 * sh * sh + ea * sb.abs() + abs_up(c);
        let rounding = 8.0 * EPS * scale;
        let propagated = ea * (1.0 + 4.0 * EPS) * w.radius.exp_m1() * (1.0 + 4.0 * EPS);
        Ball::make(c, up(propagated + rounding))
    }

    /// Square root of a real ball whose lower end is positive.
    pub fn sqrt_real(self) -> Result<Ball> {
        let (ilo, ihi) = self.im_bounds();
        if self.center.im != 0.0 || ilo > 0.0 || ihi < 0.0 {
            return Err(Error::InvalidArgument("sqrt_real of a non-real ball".into()));
        }
        let (lo, hi) = self.re_bounds();
        if self.center.re == 0.0 && self.radius <= TINY {
            // an exact zero up to underflow slack
            return Ok(Ball::make(Complex64::new(0.0, 0.0), up(hi.max(0.0).sqrt())));
        }
        if !(lo > 0.0) {
            return Err(Error::Domain(format!("sqrt of ball reaching {lo}")));
        }
        let c = self.center.re.sqrt();
        let r = self.radius / (c + lo.sqrt()) * (1.0 + 4.0 * EPS) + 2.0 * EPS * c;
        Ok(Ball::make(Complex64::new(c, 0.0), up(r)))
    }

    /// Midpoint-radius hull of two balls.
    pub fn union(&self, other: &Ball) -> Ball {
        let c = (self.center + other.center) * 0.5;
        let r = (abs_up(self.center - c) + self.radius).max(abs_up(other.center - c) + other.radius);
        Ball::make(c, up(r))
    }
}

/// `2^k` as `f64`; zero below the subnormal range, infinite above the max.
pub(crate) fn pow2(k: i32) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, rhs: Ball) -> Ball {
        let c = self.center + rhs.center;
        Ball::make(c, up(self.radius + rhs.radius + EPS * abs_up(c)))
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, rhs: Ball) -> Ball {
        self + (-rhs)
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::make(-self.center, self.radius)
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, rhs: Ball) -> Ball {
        let c = self.center * rhs.center;
        let m1 = abs_up(self.center);
        let m2 = abs_up(rhs.center);
        let prop = m1 * rhs.radius + m2 * self.radius + self.radius * rhs.radius;
        Ball::make(c, up(prop + 2.0 * EPS * m1 * m2))
    }
}

impl Add<Complex64> for Ball {
    type Output = Ball;
    fn add(self, rhs: Complex64) -> Ball {
        self + Ball::exact(rhs)
    }
}

impl Sub<Complex64> for Ball {
    type Output = Ball;
    fn sub(self, rhs: Complex64) -> Ball {
        self - Ball::exact(rhs)
    }
}

impl From<Complex64> for Ball {
    fn from(c: Complex64) -> Ball {
        Ball::exact(c)
    }
}

impl From<f64> for Ball {
    fn from(x: f64) -> Ball {
        Ball::real(x)
    }
}

impl std::iter::Sum for Ball {
    fn sum<I: Iterator<Item = Ball>>(iter: I) -> Ball {
        iter.fold(Ball::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i) ± {:e}", self.center.re, self.center.im, self.radius)
    }
}
