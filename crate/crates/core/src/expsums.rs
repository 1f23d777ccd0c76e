//! The lacunary exponential sums `s_n(theta) = sum_{j<n} e(2^j theta)`:
//! exact second and fourth moments, the measure of `{|s_n| > sqrt(n)/2}`,
//! and the doubling identity `s_{2n}(theta) = s_n(theta) + s_n(2^n theta)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigor::{Ball, RationalAngle};

const TAU: f64 = std::f64::consts::TAU;

fn e64(x: f64) -> Complex64 {
    Complex64::new(0.0, TAU * x).exp()
}

/// `s_n(theta)` with the angle doubled as a fractional part at every step.
pub fn s_n(theta: f64, n: u32) -> Complex64 {
    let mut x = theta.rem_euclid(1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        sum += e64(x);
        x = (2.0 * x).fract();
    }
    sum
}

/// Enclosure of `s_n(theta)` for exact rational `theta`.
pub fn s_n_rational(theta: &RationalAngle, n: u32) -> Ball {
    let mut x = theta.clone();
    let mut sum = Ball::ZERO;
    for _ in 0..n {
        sum = sum + x.e();
        x = x.mul_pow2(&BigUint::from(1u32));
    }
    sum
}

/// `int_0^1 |s_n|^p` for `p in {2, 4}`, counted exactly: the number of index
/// tuples with `2^a = 2^c` (`p = 2`) or `2^a + 2^b = 2^c + 2^d` (`p = 4`).
pub fn moment(n: u32, p: u32) -> Result<u64> {
    if n == 0 || n > 126 {
        return Err(Error::InvalidArgument(format!("n = {n} outside [1, 126]")));
    }
    match p {
        2 => Ok(n as u64),
        4 => {
            let mut counts: HashMap<u128, u64> = HashMap::new();
            for a in 0..n {
                for b in 0..n {
                    *counts.entry((1u128 << a) + (1u128 << b)).or_default() += 1;
                }
            }
            Ok(counts.values().map(|c| c * c).sum())
        }
        _ => Err(Error::Unsupported(format!("moment of order {p}"))),
    }
}

/// Trapezoidal rule for `int_0^1 |s_n|^p` on `nodes` equispaced points; exact
/// when every frequency of `|s_n|^p` is below `nodes`.
pub fn moment_quadrature(n: u32, p: u32, nodes: usize) -> f64 {
    let total: f64 = (0..nodes)
        .map(|k| s_n(k as f64 / nodes as f64, n).norm().powi(p as i32))
        .sum();
    total / nodes as f64
}

/// Fraction of midpoint samples with `|s_n| > sqrt(n)/2`.
pub fn measure_a(n: u32, grid: usize) -> Result<f64> {
    if grid < 1 << 12 {
        return Err(Error::InvalidArgument(format!("grid {grid} below 4096")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let threshold = (n as f64).sqrt() / 2.0;
    let hits = (0..grid)
        .filter(|&k| s_n((k as f64 + 0.5) / grid as f64, n).norm() > threshold)
        .count();
    Ok(hits as f64 / grid as f64)
}

/// The lower bound `9n / (16(2n - 1))` for the measure, from Cauchy-Schwarz
/// against the fourth moment.
pub fn measure_lower_bound(n: u32) -> f64 {
    9.0 * n as f64 / (16.0 * (2.0 * n as f64 - 1.0))
}

/// `|s_{2n}(theta) - s_n(theta) - s_n(2^n theta mod 1)|` in floating point.
pub fn doubling_identity(theta: f64, n: u32) -> f64 {
    let mut shifted = theta.rem_euclid(1.0);
    for _ in 0..n {
        shifted = (2.0 * shifted).fract();
    }
    (s_n(theta, 2 * n) - s_n(theta, n) - s_n(shifted, n)).norm()
}

/// Upper bound on the same residual with exact rational `theta`.
pub fn doubling_identity_rational(theta: &RationalAngle, n: u32) -> f64 {
    let shifted = theta.mul_pow2(&BigUint::from(n));
    (s_n_rational(theta, 2 * n) - s_n_rational(theta, n) - s_n_rational(&shifted, n)).abs_upper()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumReport {
    pub n: u32,
    #[serde(rename = "M2")]
    pub m2: u64,
    #[serde(rename = "M4")]
    pub m4: u64,
    pub measure_estimate: f64,
    pub grid: usize,
}

impl ExpSumReport {
    pub fn compute(n: u32, grid: usize) -> Result<ExpSumReport> {
        Ok(ExpSumReport {
            n,
            m2: moment(n, 2)?,
            m4: moment(n, 4)?,
            measure_estimate: measure_a(n, grid)?,
            grid,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_n_examples() {
        assert!((s_n(0.0, 5) - Complex64::new(5.0, 0.0)).norm() < 1e-15);
        assert!(s_n(0.5, 2).norm() < 1e-15);
        let third = RationalAngle::new(1, 3).unwrap();
        let exact = s_n_rational(&third, 3);
        assert!(exact.contains(e64(1.0 / 3.0) - 1.0) || (exact.center() - (e64(1.0 / 3.0) - 1.0)).norm() < 1e-15);
        assert!((s_n(1.0 / 3.0, 3) - (e64(1.0 / 3.0) - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn moments() {
        assert_eq!((moment(1, 2).unwrap(), moment(1, 4).unwrap()), (1, 1));
        assert_eq!((moment(2, 2).unwrap(), moment(2, 4).unwrap()), (2, 6));
        assert_eq!(moment(7, 4).unwrap(), 91);
        for n in 1..=64u64 {
            assert_eq!(moment(n as u32, 4).unwrap(), 2 * n * n - n);
        }
        assert!(matches!(moment(3, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn quadrature_agrees() {
        for n in [1, 2, 5, 9] {
            let q = moment_quadrature(n, 4, 1 << 12);
            let exact = moment(n, 4).unwrap() as f64;
            assert!((q - exact).abs() <= 1e-6 * exact);
        }
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure_a(1, 4096).unwrap(), 1.0);
        // |s_2|^2 = 2 + 2 cos(2 pi theta) > 1/2  <=>  cos > -3/4
        let closed = (-0.75f64).acos() / std::f64::consts::PI;
        assert!((measure_a(2, 1 << 14).unwrap() - closed).abs() < 1e-3);
        assert!(measure_a(4, 100).is_err());
    }

    #[test]
    fn doubling() {
        assert!(doubling_identity(0.0, 3) < 1e-14);
        let third = RationalAngle::new(1, 3).unwrap();
        assert!(doubling_identity_rational(&third, 2) < 1e-12);
        assert!(doubling_identity(1.0 / 3.0, 2) < 1e-12);
    }
}
