use fredholm_core::series::{eval_f_ball, HPoint};
use fredholm_core::zeros::{
    certify_rouche, certify_rouche_f, certify_taylor_S, is_conjugate_closed, newton_refine, winding_number,
    zero_table, Contour, Frame, Fredholm, FunctionKind, PartialSum, Region, RoucheOutcome, SFunction, Shifted, Target,
    WindingMode, WindingOptions, DEFAULT_TOL,
};
use fredholm_core::{Ball, Result};
use num_complex::Complex64;
use proptest::prelude::*;

/// `prod (z - r_k)`, exactly in ball arithmetic.
struct Roots(Vec<Complex64>);

impl Target for Roots {
    fn partial(&self, z: Ball) -> Result<Ball> {
        Ok(self.0.iter().fold(Ball::ONE, |acc, &r| acc * (z - r)))
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut val = Complex64::new(1.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for &r in &self.0 {
            der = der * (z - r) + val;
            val *= z - r;
        }
        Ok((val, der))
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::Identity
    }
}

fn roots() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64).prop_map(|(a, b)| Complex64::new(a, b)), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winding_counts_enclosed_roots(rs in roots(), radius in 0.2..1.4f64) {
        // stay clear of roots sitting on the circle
        prop_assume!(rs.iter().all(|r| (r.norm() - radius).abs() > 1e-3));
        let inside = rs.iter().filter(|r| r.norm() < radius).count() as i64;
        let c = Contour::circle(Complex64::new(0.0, 0.0), radius).unwrap();
        let w = winding_number(&Roots(rs), &c, WindingMode::Full, &WindingOptions::default()).unwrap();
        prop_assert_eq!(w.winding, inside);
        prop_assert!(w.floor > 0.0);
    }

    #[test]
    fn rectangles_count_too(rs in roots()) {
        prop_assume!(rs.iter().all(|r| (r.re.abs() - 1.0).abs() > 1e-3 && (r.im.abs() - 0.5).abs() > 1e-3));
        let inside = rs.iter().filter(|r| r.re.abs() < 1.0 && r.im.abs() < 0.5).count() as i64;
        let c = Contour::rect(-1.0, -0.5, 1.0, 0.5).unwrap();
        let w = winding_number(&Roots(rs), &c, WindingMode::Full, &WindingOptions::default()).unwrap();
        prop_assert_eq!(w.winding, inside);
    }

    #[test]
    fn rouche_certificates_hold_the_root(rs in roots()) {
        let r0 = rs[0];
        let sep = rs[1..].iter().map(|r| (r - r0).norm()).fold(1.0, f64::min);
        prop_assume!(sep > 1e-3);
        match certify_rouche(&Roots(rs), r0, sep / 4.0, Complex64::new(0.0, 0.0), Frame::Disk).unwrap() {
            RoucheOutcome::Certified(c) => {
                prop_assert_eq!(c.winding, 1);
                prop_assert!(c.disk().contains(r0));
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn certified_zeroes_of_f_vanish(re in -0.9..0.9f64, im in -0.9..0.9f64) {
        let guess = Complex64::new(re, im);
        prop_assume!(guess.norm() < 0.95);
        let f = Fredholm { top: 13 };
        if let Ok(z) = newton_refine(&f, guess, 1e-13) {
            prop_assume!(z.norm() < 0.99);
            let r = 1e-9;
            if let Ok(RoucheOutcome::Certified(c)) = certify_rouche_f(z, r, Complex64::new(0.0, 0.0), 13) {
                prop_assert_eq!(c.winding, 1);
                let v = eval_f_ball(c.disk(), 13).unwrap();
                prop_assert!(v.contains_zero());
            }
        }
    }
}

#[test]
fn zero_tables_are_conjugate_closed() {
    for r in [0.5, 0.9, 0.95] {
        let table = zero_table(13, &Region::disk(Complex64::new(0.0, 0.0), r), DEFAULT_TOL).unwrap();
        assert!(table.is_complete(), "r = {r}");
        assert!(is_conjugate_closed(&table.zeros, 1e-9), "r = {r}");
        assert!(table.zeros.iter().all(|z| z.is_sound()));
    }
}

#[test]
fn zero_table_on_rectangle_matches_disk() {
    let disk = zero_table(13, &Region::disk(Complex64::new(0.0, 0.0), 0.996), DEFAULT_TOL).unwrap();
    let rect = zero_table(13, &Region::Rect { x0: 0.0, y0: 0.9, x1: 0.2, y1: 0.96 }, DEFAULT_TOL).unwrap();
    assert!(rect.is_complete());
    let expected = disk
        .zeros
        .iter()
        .filter(|z| z.re > 0.0 && z.re < 0.2 && z.im > 0.9 && z.im < 0.96)
        .count();
    assert_eq!(expected, 2);
    assert_eq!(rect.zeros.len(), expected);
}

#[test]
fn partial_sum_winding_on_small_circle() {
    // P_13 has the zeroes 0 and -0.6586... inside |z| < 0.7
    let c = Contour::circle(Complex64::new(0.0, 0.0), 0.7).unwrap();
    let w = winding_number(&PartialSum { top: 13 }, &c, WindingMode::Full, &WindingOptions::default()).unwrap();
    assert_eq!(w.winding, 2);
}

#[test]
fn taylor_certificates_for_other_values() {
    // zeroes of S - v carried by the attainment pipeline at v = 1 and v = 2 + 3i
    for (w0, v) in [
        (Complex64::new(-0.02427198, 0.09499066), Complex64::new(1.0, 0.0)),
        (Complex64::new(1.11695501, 0.31099639), Complex64::new(2.0, 3.0)),
    ] {
        let w = HPoint::new(w0).unwrap();
        let seed = newton_refine(&Shifted::new(SFunction, v), w0, 1e-14).unwrap();
        let c = certify_taylor_S(&HPoint::new(seed).unwrap(), 1e-4, v).unwrap();
        assert!(c.is_sound());
        assert!((seed - w.value()).norm() < 1e-6);
    }
}
