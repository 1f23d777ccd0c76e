//! The constants `k_l = e(1/2^l) - 1`, `mu_l = |k_l|^2`,
//! `c_m = sum_l (e(m/2^l) - 1)`, `c(m) = sum_l k_l^m`, `sigma_m = c_m + c_{-m}`
//! and `sigma(m) = sum_l (k_l + conj k_l)^m = (-1)^m sum_l mu_l^m`.
//!
//! Relations checked here:
//!
//! * `c(m) = sum_{j=1}^m (-1)^(m-j) C(m,j) c_j` and `c_m = sum_{h=1}^m C(m,h) c(h)`,
//!   both from `e(m/2^l) = (1 + k_l)^m`;
//! * `(1 - 2^m) c(m) = sum_{h=1}^m 2^(m-h) C(m,h) c(m+h)`, from
//!   `k_l = k_{l+1}(k_{l+1} + 2)`;
//! * `(2 cos t - 2)^m = sum_j a_{m,j} (2 cos jt - 2)` with integer `a_{m,j}`,
//!   hence `sigma(m) = sum_j a_{m,j} sigma_j`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigor::{pow2, up, Ball, RationalAngle, EPS};
use crate::series::gh_tail;

/// Truncation length for every constant series.
pub const DEFAULT_L: usize = 64;

const TAU: f64 = std::f64::consts::TAU;

/// `e(num/2^l) - 1`, accurate also when the angle is tiny.
fn dyadic_e_minus_one(num: i64, l: usize) -> Ball {
    let angle = RationalAngle::new(BigInt::from(num), BigInt::one() << l).expect("positive denominator");
    if angle.is_zero() {
        return Ball::ZERO;
    }
    let n = angle.numerator().to_f64().unwrap_or(f64::NAN);
    let d = angle.denominator().to_f64().unwrap_or(f64::NAN);
    // quarter turns: e(1/4) - 1 = i - 1 and friends, exactly
    if d <= 4.0 {
        let e = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];
        return Ball::exact(e[(4.0 * n / d) as usize] - Complex64::new(1.0, 0.0));
    }
    // both are exact: the denominator is a power of two and n < d <= 2^l
    let exact = angle.denominator().bits() <= 1024 && angle.numerator().bits() <= 53;
    let x = if 8.0 * n < d {
        n / d
    } else if 8.0 * n > 7.0 * d {
        -(d - n) / d
    } else {
        return angle.e() - Complex64::new(1.0, 0.0);
    };
    let slack = if exact { 0.0 } else { 2.0 * EPS * x.abs() };
    Ball::with_radius(Complex64::new(x, 0.0), slack).e_minus_one()
}

/// `k_l = e(1/2^l) - 1`; `k_0 = 0`, `k_1 = -2`, `k_2 = i - 1` come out exact.
pub fn k_l(l: u32) -> Ball {
    if l > 1000 {
        // |k_l| <= 2 pi 2^-l underflows to zero long before this
        return Ball::with_radius(Complex64::new(0.0, 0.0), f64::MIN_POSITIVE);
    }
    dyadic_e_minus_one(1, l as usize)
}

/// `mu_l = |k_l|^2 = 4 sin^2(pi/2^l)`, a real ball.
pub fn mu_l(l: u32) -> Ball {
    match l {
        0 => Ball::ZERO,
        1 => Ball::real(4.0),
        2 => Ball::real(2.0),
        _ => k_l(l).abs_sq(),
    }
}

/// `c_m = sum_{l=1}^{L} (e(m/2^l) - 1)` plus the tail of `H` at `|m|`.
pub fn c_m(m: i64, l_terms: usize) -> Ball {
    if m == 0 {
        return Ball::ZERO;
    }
    let sum: Ball = (1..=l_terms).map(|l| dyadic_e_minus_one(m, l)).sum();
    sum.inflate(gh_tail(m.unsigned_abs() as f64, l_terms))
}

/// `c(m) = sum_{l>=1} k_l^m`; for `l > L`, `|k_l| <= 2 pi 2^-l` gives the
/// tail `(2 pi)^m 2^(-Lm) / (2^m - 1)`.
pub fn c_paren(m: u32, l_terms: usize) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("c(m) needs m >= 1".into()));
    }
    let sum: Ball = (1..=l_terms as u32).map(|l| k_l(l).powu(m)).sum();
    let tail = TAU.powi(m as i32) * pow2(-((l_terms as u32 * m).min(1100) as i32)) / (pow2(m as i32) - 1.0);
    Ok(sum.inflate(up(tail * (1.0 + 4.0 * EPS * m as f64))))
}

pub fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Integer coefficients `b_j` (index `j = 1..=m`) with `c(m) = sum b_j c_j`.
pub fn paren_from_plain_coefficients(m: u32) -> Vec<i128> {
    (1..=m)
        .map(|j| {
            let sign = if (m - j) % 2 == 0 { 1 } else { -1 };
            sign * binomial(m, j)
        })
        .collect()
}

/// `c(m)` assembled from `c_1, ..., c_m`.
pub fn c_paren_from_plain(m: u32, l_terms: usize) -> Ball {
    paren_from_plain_coefficients(m)
        .iter()
        .enumerate()
        .map(|(i, &b)| c_m(i as i64 + 1, l_terms).scale(b as f64))
        .sum()
}

/// `c_m` assembled from `c(1), ..., c(m)`.
pub fn c_plain_from_paren(m: u32, l_terms: usize) -> Result<Ball> {
    let mut acc = Ball::ZERO;
    for h in 1..=m {
        acc = acc + c_paren(h, l_terms)?.scale(binomial(m, h) as f64);
    }
    Ok(acc)
}

/// Residual of `(1 - 2^m) c(m) - sum_{h=1}^m 2^(m-h) C(m,h) c(m+h)`.
pub fn verify_c_recurrence(m: u32) -> Result<Ball> {
    if !(1..=8).contains(&m) {
        return Err(Error::InvalidArgument(format!("m = {m} outside [1, 8]")));
    }
    let l = DEFAULT_L;
    let mut residual = c_paren(m, l)?.scale(1.0 - pow2(m as i32));
    for h in 1..=m {
        let coef = pow2((m - h) as i32) * binomial(m, h) as f64;
        residual = residual - c_paren(m + h, l)?.scale(coef);
    }
    Ok(residual)
}

/// `sigma_m = c_m + c_{-m}`, with the imaginary part kept as computed.
pub fn sigma(m: i64) -> Ball {
    c_m(m, DEFAULT_L) + c_m(-m, DEFAULT_L)
}

/// `sigma(m) = (-1)^m sum_l mu_l^m`; tail `(2 pi)^(2m) 4^(-Lm) / (4^m - 1)`.
pub fn sigma_paren(m: u32) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("sigma(m) needs m >= 1".into()));
    }
    let l = DEFAULT_L as u32;
    let sum: Ball = (1..=l).map(|j| mu_l(j).powu(m)).sum();
    let tail = TAU.powi(2 * m as i32) * pow2(-((2 * l * m).min(1100) as i32)) / (pow2(2 * m as i32) - 1.0);
    let s = sum.inflate(up(tail * (1.0 + 8.0 * EPS * m as f64)));
    Ok(if m % 2 == 0 { s } else { -s })
}

/// Second route to `sigma(m)`: `sum_l (k_l + conj k_l)^m` in complex balls.
pub fn sigma_paren_via_k(m: u32) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("sigma(m) needs m >= 1".into()));
    }
    let l = DEFAULT_L as u32;
    let sum: Ball = (1..=l)
        .map(|j| {
            let k = k_l(j);
            (k + k.conj()).powu(m)
        })
        .sum();
    let tail = TAU.powi(2 * m as i32) * pow2(-((2 * l * m).min(1100) as i32)) / (pow2(2 * m as i32) - 1.0);
    Ok(sum.inflate(up(tail * (1.0 + 8.0 * EPS * m as f64))))
}

/// `a_{m,1..=m}` with `(2 cos t - 2)^m = sum_j a_{m,j} (2 cos jt - 2)`,
/// by repeated multiplication with `2 cos t - 2` in the basis `{1, 2 cos jt}`.
pub fn chebyshev_expansion(m: u32) -> Result<Vec<i64>> {
    if !(1..=12).contains(&m) {
        return Err(Error::InvalidArgument(format!("m = {m} outside [1, 12]")));
    }
    // coeffs[0] is the constant term, coeffs[j] multiplies 2 cos(jt)
    let mut coeffs = vec![1i64];
    for _ in 0..m {
        let mut next = vec![0i64; coeffs.len() + 1];
        for (j, &c) in coeffs.iter().enumerate() {
            match j {
                0 => next[1] += c,
                1 => {
                    next[2] += c;
                    next[0] += 2 * c;
                }
                _ => {
                    next[j + 1] += c;
                    next[j - 1] += c;
                }
            }
            next[j] -= 2 * c;
        }
        coeffs = next;
    }
    let a = coeffs[1..].to_vec();
    let constant: i64 = -2 * a.iter().sum::<i64>();
    if constant != coeffs[0] {
        return Err(Error::Invariant(format!("constant term {} != {}", coeffs[0], constant)));
    }
    Ok(a)
}

/// `sigma(m) - sum_j a_{m,j} sigma_j`.
pub fn chebyshev_residual(m: u32) -> Result<Ball> {
    let a = chebyshev_expansion(m)?;
    let combo: Ball = a
        .iter()
        .enumerate()
        .map(|(i, &c)| sigma(i as i64 + 1).scale(c as f64))
        .sum();
    Ok(sigma_paren(m)? - combo)
}

/// `(-1)^m sigma(m) - 4^m - 2^m - (2 - sqrt 2)^m`, computed as
/// `sum_{l>=4} mu_l^m` so that the large leading terms never cancel.
pub fn asymptotic_residual(m: u32) -> Result<Ball> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let l = DEFAULT_L as u32;
    let sum: Ball = (4..=l).map(|j| mu_l(j).powu(m)).sum();
    let tail = TAU.powi(2 * m as i32) * pow2(-((2 * l * m).min(1100) as i32)) / (pow2(2 * m as i32) - 1.0);
    Ok(sum.inflate(up(tail * (1.0 + 8.0 * EPS * m as f64))))
}

/// The same residual by direct subtraction, for small `m` cross-checks.
pub fn asymptotic_residual_direct(m: u32) -> Result<Ball> {
    let s = sigma_paren(m)?;
    let signed = if m % 2 == 0 { s } else { -s };
    let mu3 = mu_l(3);
    Ok(signed - Ball::real(pow2(2 * m as i32)) - Ball::real(pow2(m as i32)) - mu3.powu(m))
}

/// `2 (2 - sqrt(2 + sqrt 2))^m`, the bound on the asymptotic residual.
pub fn asymptotic_bound(m: u32) -> f64 {
    2.0 * mu_l(4).abs_upper().powi(m as i32) * (1.0 + 1e-12)
}

/// Best rational approximation with bounded denominator, by continued
/// fractions (convergents and semiconvergents).
pub fn best_rational(x: f64, max_den: u64) -> (i64, u64) {
    let max_den = max_den.max(1) as i128;
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    loop {
        let a = r.floor() as i128;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let err = |p: i128, q: i128| (x - p as f64 / q as f64).abs();
            let best = if err(p1, q1) <= err(ps, qs) { (p1, q1) } else { (ps, qs) };
            return (best.0 as i64, best.1 as u64);
        }
        (p0, q0, p1, q1) = (p1, q1, a * p1 + p0, q2);
        let frac = r - r.floor();
        if frac < 1e-12 || !frac.is_finite() {
            return (p1 as i64, q1 as u64);
        }
        r = 1.0 / frac;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub m: i64,
    pub value: f64,
    pub num: i64,
    pub den: u64,
    pub error: f64,
}

/// Enclosures of the constant families for `|m| <= M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantTable {
    pub m_max: u32,
    pub l_terms: usize,
    /// `(m, c_m)` for `m in [-M, M]`.
    pub c: Vec<(i64, Ball)>,
    /// `(m, c(m))` for `m in [1, M]`.
    pub c_paren: Vec<(u32, Ball)>,
    pub sigma: Vec<(i64, Ball)>,
    pub sigma_paren: Vec<(u32, Ball)>,
    /// Near-rational approximations of `sigma_m`; evidence only.
    pub sigma_rational: Vec<RationalApprox>,
}

impl ConstantTable {
    pub fn build(m_max: u32) -> Result<ConstantTable> {
        let l = DEFAULT_L;
        let mm = m_max as i64;
        let c = (-mm..=mm).map(|m| (m, c_m(m, l))).collect();
        let mut c_par = Vec::new();
        let mut s_par = Vec::new();
        for m in 1..=m_max {
            c_par.push((m, c_paren(m, l)?));
            s_par.push((m, sigma_paren(m)?));
        }
        let sig: Vec<(i64, Ball)> = (1..=mm).map(|m| (m, sigma(m))).collect();
        let sigma_rational = sig
            .iter()
            .filter(|(m, _)| *m <= 12)
            .map(|(m, b)| {
                let value = b.center().re;
                let (num, den) = best_rational(value, 1_000_000);
                RationalApprox {
                    m: *m,
                    value,
                    num,
                    den,
                    error: (value - num as f64 / den as f64).abs(),
                }
            })
            .collect();
        Ok(ConstantTable {
            m_max,
            l_terms: l,
            c,
            c_paren: c_par,
            sigma: sig,
            sigma_paren: s_par,
            sigma_rational,
        })
    }

    pub fn c(&self, m: i64) -> Option<Ball> {
        self.c.iter().find(|(k, _)| *k == m).map(|(_, b)| *b)
    }

    /// Checks the table invariants; returns the first violation.
    pub fn check(&self) -> Result<()> {
        for m in 1..=self.m_max as i64 {
            let (a, b) = (self.c(m), self.c(-m));
            if let (Some(a), Some(b)) = (a, b) {
                if !a.conj().overlaps(&b) {
                    return Err(Error::Invariant(format!("conj(c_{m}) misses c_{}", -m)));
                }
            }
            if 2 * m <= self.m_max as i64 {
                let (a, b) = (self.c(m).unwrap(), self.c(2 * m).unwrap());
                if !a.overlaps(&b) {
                    return Err(Error::Invariant(format!("c_{} misses c_{m}", 2 * m)));
                }
            }
        }
        for (m, s) in &self.sigma {
            let (lo, hi) = s.im_bounds();
            if lo > 0.0 || hi < 0.0 {
                return Err(Error::Invariant(format!("sigma_{m} is not real")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_and_mu_examples() {
        assert_eq!(k_l(0).center(), Complex64::new(0.0, 0.0));
        assert_eq!(k_l(1).center(), Complex64::new(-2.0, 0.0));
        assert_eq!(k_l(1).radius(), 0.0);
        assert_eq!(k_l(2).center(), Complex64::new(-1.0, 1.0));
        assert_eq!(k_l(2).radius(), 0.0);
        let r2 = 2f64.sqrt();
        assert!(k_l(3).contains(Complex64::new((r2 - 2.0) / 2.0, r2 / 2.0)));
        assert!(mu_l(3).contains(Complex64::new(2.0 - r2, 0.0)));
        assert!(mu_l(1).contains(Complex64::new(4.0, 0.0)));
    }

    #[test]
    fn recurrences_for_k_and_mu() {
        for l in 1..40 {
            let k = k_l(l);
            let k1 = k_l(l + 1);
            assert!(k.overlaps(&(k1 * (k1 + Complex64::new(2.0, 0.0)))), "l = {l}");
            let rhs = Ball::real(2.0) - (Ball::real(4.0) - mu_l(l)).sqrt_real().unwrap();
            assert!(mu_l(l + 1).overlaps(&rhs), "l = {l}");
        }
    }

    #[test]
    fn c_m_symmetries() {
        assert_eq!(c_m(0, DEFAULT_L), Ball::ZERO);
        for m in 1..=16 {
            assert!(c_m(2 * m, DEFAULT_L).overlaps(&c_m(m, DEFAULT_L)), "m = {m}");
            assert!(c_m(m, DEFAULT_L).conj().overlaps(&c_m(-m, DEFAULT_L)));
        }
        assert!(c_m(5, DEFAULT_L).radius() < 1e-12);
    }

    #[test]
    fn binomial_conversions() {
        assert!(c_paren(1, DEFAULT_L).unwrap().overlaps(&c_m(1, DEFAULT_L)));
        assert_eq!(paren_from_plain_coefficients(3), vec![3, -3, 1]);
        for m in 1..=8 {
            let direct = c_paren(m, DEFAULT_L).unwrap();
            assert!(direct.overlaps(&c_paren_from_plain(m, DEFAULT_L)), "m = {m}");
            assert!(c_m(m as i64, DEFAULT_L).overlaps(&c_plain_from_paren(m, DEFAULT_L).unwrap()));
        }
    }

    #[test]
    fn c_recurrence() {
        for m in 1..=6 {
            let r = verify_c_recurrence(m).unwrap();
            assert!(r.contains_zero(), "m = {m}: {r}");
        }
        assert!(verify_c_recurrence(9).is_err());
    }

    #[test]
    fn sigma_values() {
        for m in 1..=16 {
            let (lo, hi) = sigma(m).im_bounds();
            assert!(lo <= 0.0 && hi >= 0.0);
        }
        assert!(sigma(2).overlaps(&sigma(1)));
        // sigma(1) = -sum mu_l, summed directly
        let direct: f64 = (1..60).map(|l| 4.0 * (std::f64::consts::PI * pow2(-l)).sin().powi(2)).sum();
        let s1 = sigma_paren(1).unwrap();
        assert!((s1.center().re + direct).abs() < 1e-13);
        for m in 1..=8 {
            assert!(sigma_paren(m).unwrap().overlaps(&sigma_paren_via_k(m).unwrap()));
        }
    }

    /// Expansion of `(x - 2 + 1/x)^m = (sqrt x - 1/sqrt x)^(2m)`: the coefficient
    /// of `x^j` is `(-1)^(m-j) C(2m, m-j)`.
    #[test]
    fn chebyshev_against_closed_form() {
        assert_eq!(chebyshev_expansion(1).unwrap(), vec![1]);
        assert_eq!(chebyshev_expansion(2).unwrap(), vec![-4, 1]);
        for m in 1..=12u32 {
            let a = chebyshev_expansion(m).unwrap();
            for j in 1..=m {
                let sign = if (m - j) % 2 == 0 { 1 } else { -1 };
                assert_eq!(a[j as usize - 1] as i128, sign * binomial(2 * m, m - j));
            }
            for s in 0..50 {
                let t = 0.1 + 0.123 * s as f64;
                let lhs = (2.0 * t.cos() - 2.0).powi(m as i32);
                let rhs: f64 = a
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c as f64 * (2.0 * ((i + 1) as f64 * t).cos() - 2.0))
                    .sum();
                assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs().max(4f64.powi(m as i32) * 1e-3)));
            }
        }
        for m in 1..=8 {
            assert!(chebyshev_residual(m).unwrap().contains_zero(), "m = {m}");
        }
    }

    #[test]
    fn asymptotics() {
        for m in 5..=15 {
            let r = asymptotic_residual(m).unwrap();
            assert!(r.abs_upper() <= asymptotic_bound(m), "m = {m}");
        }
        for m in 1..=6 {
            assert!(asymptotic_residual(m).unwrap().overlaps(&asymptotic_residual_direct(m).unwrap()));
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(best_rational(0.5, 100), (1, 2));
        assert_eq!(best_rational(std::f64::consts::PI, 1000), (355, 113));
        assert_eq!(best_rational(-0.75, 10), (-3, 4));
    }

    #[test]
    fn table_roundtrip() {
        let t = ConstantTable::build(8).unwrap();
        t.check().unwrap();
        assert_eq!(t.c.len(), 17);
        assert_eq!(t.sigma_rational.len(), 8);
    }
}
