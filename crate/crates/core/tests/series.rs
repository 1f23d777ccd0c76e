use fredholm_core::rigor::RationalAngle;
use fredholm_core::series::{
    eval_F, eval_S, eval_S1, eval_S1_via_shift, eval_f_ball, s_value_and_derivative, HPoint, MicroSeries, SPlan,
    TruncationPlan,
};
use fredholm_core::Ball;
use num_complex::Complex64;
use proptest::prelude::*;

fn brute_f(z: Complex64, terms: u32) -> Complex64 {
    let mut p = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..terms {
        sum += p;
        p = p * p;
    }
    sum
}

fn e(w: Complex64) -> Complex64 {
    (Complex64::new(0.0, std::f64::consts::TAU) * w).exp()
}

proptest! {
    #[test]
    fn f_enclosure_contains_long_sum(r in 0.0..0.95f64, phi in 0.0..std::f64::consts::TAU, top in 3usize..12) {
        let z = Complex64::from_polar(r, phi);
        let b = eval_f_ball(Ball::exact(z), top).unwrap();
        let exact = brute_f(z, 40);
        prop_assert!((b.center() - exact).norm() <= b.radius() + 1e-13);
    }

    #[test]
    fn upper_series_is_f_of_e(re in -1.0..1.0f64, t in 0.05..2.0f64) {
        let w = HPoint::new(Complex64::new(re, t)).unwrap();
        let v = eval_F(&w, &TruncationPlan::upper_for(t)).unwrap();
        let direct = brute_f(e(w.value()), 60);
        prop_assert!((v.center() - direct).norm() <= v.radius() + 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn s1_routes_agree(re in -2.0..2.0f64, t in 0.05..2.0f64) {
        let w = HPoint::new(Complex64::new(re, t)).unwrap();
        let plan = SPlan::for_ball(&(w.ball() + Complex64::new(1.0, 0.0))).unwrap();
        let a = eval_S1(&w, &plan).unwrap();
        let b = eval_S1_via_shift(&w, &plan).unwrap();
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn float_path_inside_enclosure(re in -2.0..2.0f64, t in 0.05..2.0f64) {
        let w = HPoint::new(Complex64::new(re, t)).unwrap();
        let b = eval_S(&w, &SPlan::for_point(&w)).unwrap();
        let (v, _) = s_value_and_derivative(w.value());
        prop_assert!((b.center() - v).norm() <= b.radius() + 1e-11 * v.norm().max(1.0));
    }

    #[test]
    fn microscope_matches_direct_for_small_scale(p in 1i64..50, q in 2i64..50, ure in -1.0..1.0f64, ut in 0.2..2.0f64) {
        let theta = RationalAngle::new(p, q).unwrap();
        let scale = 4u32;
        let u = Complex64::new(ure, ut);
        let w = Complex64::new(theta.to_f64(), 0.0) + u / 16.0;
        let terms = TruncationPlan::micro_for(scale, ut).terms;
        let micro = MicroSeries::new(theta, scale, terms).eval(Ball::exact(u)).unwrap();
        let hw = HPoint::new(w).unwrap();
        let direct = eval_F(&hw, &TruncationPlan::upper_for(w.im)).unwrap();
        // the float rounding of w itself moves F by about |F'| * 1e-16
        prop_assert!(micro.inflate(1e-10).overlaps(&direct));
    }
}
