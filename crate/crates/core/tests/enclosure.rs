//! Ball operations must enclose the same operation on any members.

use fredholm_core::{Ball, RationalAngle};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex64::new(re, im))
}

/// A ball and a member of it, kept a little inside the boundary.
fn ball_and_member(range: f64) -> impl Strategy<Value = (Ball, Complex64)> {
    (complex(range), 0.0..1e-3f64, 0.0..0.99f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(c, r, t, phi)| (Ball::with_radius(c, r), c + Complex64::from_polar(r * t, phi)))
}

proptest! {
    #[test]
    fn arithmetic_encloses((a, x) in ball_and_member(10.0), (b, y) in ball_and_member(10.0)) {
        prop_assert!((a + b).contains(x + y));
        prop_assert!((a - b).contains(x - y));
        prop_assert!((a * b).contains(x * y));
        prop_assert!(a.sqr().contains(x * x));
        prop_assert!(a.conj().contains(x.conj()));
        if b.abs_lower() > 1e-2 {
            prop_assert!(a.checked_div(b).unwrap().contains(x / y));
        }
    }

    #[test]
    fn powers_enclose((a, x) in ball_and_member(1.2), n in 0u32..20) {
        prop_assert!(a.powu(n).contains(x.powu(n)));
    }

    #[test]
    fn exponentials_enclose((a, x) in ball_and_member(3.0)) {
        prop_assert!(a.exp().contains(x.exp()));
        let e = (Complex64::new(0.0, std::f64::consts::TAU) * x).exp();
        prop_assert!(a.e().contains(e));
        prop_assert!(a.e_minus_one().contains(e - 1.0));
    }

    #[test]
    fn modulus_bounds_bracket_members((a, x) in ball_and_member(5.0)) {
        let (lo, hi) = a.abs_bounds();
        prop_assert!(lo <= x.norm() && x.norm() <= hi);
        let (rlo, rhi) = a.re_bounds();
        prop_assert!(rlo <= x.re && x.re <= rhi);
    }

    #[test]
    fn dyadic_scaling_is_exact_on_centers(c in complex(100.0), k in -60i32..60) {
        let b = Ball::exact(c).ldexp(k);
        prop_assert_eq!(b.center(), c * 2f64.powi(k));
    }

    #[test]
    fn angles_reduce_mod_one(p in -10_000i64..10_000, q in 1i64..10_000, p2 in -10_000i64..10_000, q2 in 1i64..10_000) {
        let a = RationalAngle::new(p, q).unwrap();
        let b = RationalAngle::new(p2, q2).unwrap();
        let x = a.to_f64();
        prop_assert!((0.0..1.0).contains(&x));
        let sum = a.add(&b).to_f64();
        let expect = (x + b.to_f64()).fract();
        prop_assert!((sum - expect).abs() < 1e-12 || (sum - expect).abs() > 1.0 - 1e-12);
        prop_assert!(a.add(&b).sub(&b) == a);
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn doubling_matches_repeated_addition(p in 1i64..1000, q in 1i64..1000, n in 0u32..40) {
        let a = RationalAngle::new(p, q).unwrap();
        let mut twice = a.clone();
        for _ in 0..n {
            twice = twice.add(&twice);
        }
        prop_assert!(a.mul_pow2(&BigUint::from(n)) == twice.clone());
        prop_assert!(a.mul_int(&(BigInt::from(1u64) << n as usize)) == twice);
    }

    #[test]
    fn angle_phase_encloses_float_phase(p in -500i64..500, q in 1i64..500) {
        let a = RationalAngle::new(p, q).unwrap();
        // reduce first: a float phase of 2 pi p / q loses p ulps
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * p.rem_euclid(q) as f64 / q as f64);
        let e = a.e();
        prop_assert!((e.center() - z).norm() < 1e-13);
        prop_assert!(e.radius() < 1e-14);
    }
}
