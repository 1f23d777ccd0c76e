//! Named suites of checkable claims. Every check records the radius of the
//! enclosure it was decided on, so a pass can be judged by how much room it had.

use fredholm_core::constants::{
    asymptotic_bound, asymptotic_residual, c_m, c_paren, c_paren_from_plain, c_plain_from_paren, chebyshev_residual,
    verify_c_recurrence, DEFAULT_L,
};
use fredholm_core::expsums::{doubling_identity, measure_a, measure_lower_bound, moment, moment_quadrature, s_n};
use fredholm_core::numtheory::{check_modZ, make_params, ramanujan_sum, totient};
use fredholm_core::series::{imaginary_axis_value, residual_functional_equation, FunctionalEquation, HPoint, SPlan};
use fredholm_core::zeros::{certify_taylor_S, newton_refine, SFunction};
use fredholm_core::Ball;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Ramanujan,
    Constants,
    Appendix,
    Expsums,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest enclosure radius the check relied on, when it used balls.
    pub radius: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Random points for the identity checks; fixed seed so reports are reproducible.
pub const IDENTITY_POINTS: usize = 1000;
const SEED: u64 = 0x5eed_f4ed;

struct Acc {
    name: String,
    passed: bool,
    radius: f64,
    count: usize,
    first_failure: Option<String>,
}

impl Acc {
    fn new(name: impl Into<String>) -> Acc {
        Acc {
            name: name.into(),
            passed: true,
            radius: 0.0,
            count: 0,
            first_failure: None,
        }
    }

    fn ball(&mut self, ok: bool, b: &Ball, at: impl FnOnce() -> String) {
        self.radius = self.radius.max(b.radius());
        self.flag(ok, at);
    }

    fn flag(&mut self, ok: bool, at: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.passed = false;
            if self.first_failure.is_none() {
                self.first_failure = Some(at());
            }
        }
    }

    fn error(&mut self, at: String) {
        self.flag(false, || at);
    }

    fn finish(self, what: &str) -> Check {
        let detail = match self.first_failure {
            None => format!("{} {what}", self.count),
            Some(f) => format!("{} {what}; first failure: {f}", self.count),
        };
        Check {
            name: self.name,
            passed: self.passed,
            radius: Some(self.radius),
            detail,
        }
    }

    /// For checks decided in exact arithmetic.
    fn finish_exact(self, what: &str) -> Check {
        Check {
            radius: None,
            ..self.finish(what)
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> HPoint {
    let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.5));
    HPoint::new(w).expect("Im w >= 0.1")
}

fn identities() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut accs = [
        Acc::new("F(w+1) = F(w)"),
        Acc::new("F(w) = e(w) + F(2w)"),
        Acc::new("S1(2w) = S1(w) - 1"),
        Acc::new("S1(w + m 2^s) = S1(w) + Delta_{m,s}(w) + c_m"),
    ];
    for _ in 0..IDENTITY_POINTS {
        let w = random_point(&mut rng);
        let m = loop {
            let m: i64 = rng.gen_range(-3..=3);
            if m != 0 {
                break m;
            }
        };
        let s: u32 = rng.gen_range(0..=3);
        let plan = SPlan::for_point(&w);
        let ids = [
            FunctionalEquation::FShift,
            FunctionalEquation::FDouble,
            FunctionalEquation::S1Double,
            FunctionalEquation::S1Translate { m, s },
        ];
        for (acc, id) in accs.iter_mut().zip(ids) {
            match residual_functional_equation(id, &w, &plan) {
                Ok(r) => acc.ball(r.contains_zero(), &r, || format!("{id:?} at {}", w.value())),
                Err(e) => acc.error(format!("{id:?} at {}: {e}", w.value())),
            }
        }
    }
    let mut checks: Vec<Check> = accs.into_iter().map(|a| a.finish("random points")).collect();
    for t in [0.1, 0.5, 1.0, 5.0] {
        let mut acc = Acc::new(format!("Im(F(it) + H(it)) = 0 at t = {t}"));
        match imaginary_axis_value(t) {
            Ok(v) => {
                let (lo, hi) = v.im_bounds();
                acc.ball(lo <= 0.0 && hi >= 0.0, &v, || format!("Im in [{lo:e}, {hi:e}]"));
            }
            Err(e) => acc.error(e.to_string()),
        }
        checks.push(acc.finish("point"));
    }
    checks
}

/// `count` residues coprime to `q`, spread evenly over `[1, q)`.
fn coprime_samples(q: u64, count: usize) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(count);
    for j in 0..count as u64 {
        let mut s = (1 + j * q / count as u64).max(out.last().map_or(1, |&x| x as u64 + 1));
        while num_integer::gcd(s, q) != 1 {
            s += 1;
        }
        out.push(s as i64);
    }
    out
}

fn ramanujan() -> Vec<Check> {
    let mut checks = Vec::new();
    for q in [9u64, 81, 729] {
        let mut acc = Acc::new(format!("sum_(m < phi({q})) e(2^m s/{q}) = 0"));
        for s in coprime_samples(q, 20) {
            match ramanujan_sum(q, s) {
                Ok(b) => acc.ball(b.contains_zero() && b.radius() < 1e-9, &b, || format!("s = {s}: {b}")),
                Err(e) => acc.error(format!("s = {s}: {e}")),
            }
        }
        checks.push(acc.finish("residues s"));
    }
    for a in 1..=4 {
        let mut acc = Acc::new(format!("2^(n0 - l) theta0 = theta0/2^l - 1/2^l mod 1, a = {a}"));
        match make_params(a) {
            Ok(p) => {
                if let Some(q) = p.q_u64() {
                    acc.flag(p.n0 == totient(q), || format!("n0 = {} != phi({q})", p.n0));
                }
                for l in 0..=a {
                    match check_modZ(&p, l) {
                        Ok(ok) => acc.flag(ok, || format!("l = {l}")),
                        Err(e) => acc.error(e.to_string()),
                    }
                }
            }
            Err(e) => acc.error(e.to_string()),
        }
        checks.push(acc.finish_exact("exact congruences"));
    }
    checks
}

fn constants() -> Vec<Check> {
    let l = DEFAULT_L;
    let mut checks = Vec::new();

    let mut acc = Acc::new("c_{2m} = c_m");
    for m in 1..=16i64 {
        let (a, b) = (c_m(m, l), c_m(2 * m, l));
        acc.radius = acc.radius.max(b.radius());
        acc.ball(a.overlaps(&b), &a, || format!("m = {m}"));
    }
    checks.push(acc.finish("values of m"));

    let mut acc = Acc::new("c(m) <-> c_m binomial conversions");
    for m in 1..=8u32 {
        match (c_paren(m, l), c_plain_from_paren(m, l)) {
            (Ok(direct), Ok(plain)) => {
                let from_plain = c_paren_from_plain(m, l);
                let cm = c_m(m as i64, l);
                acc.ball(direct.overlaps(&from_plain), &from_plain, || format!("c({m}) from c_j"));
                acc.ball(cm.overlaps(&plain), &plain, || format!("c_{m} from c(h)"));
            }
            (Err(e), _) | (_, Err(e)) => acc.error(format!("m = {m}: {e}")),
        }
    }
    checks.push(acc.finish("conversions"));

    let mut acc = Acc::new("(1 - 2^m) c(m) = sum_h 2^(m-h) C(m,h) c(m+h)");
    for m in 1..=6 {
        match verify_c_recurrence(m) {
            Ok(r) => acc.ball(r.contains_zero(), &r, || format!("m = {m}: {r}")),
            Err(e) => acc.error(format!("m = {m}: {e}")),
        }
    }
    checks.push(acc.finish("values of m"));

    let mut acc = Acc::new("sigma(m) = sum_j a_{m,j} sigma_j");
    for m in 1..=8 {
        match chebyshev_residual(m) {
            Ok(r) => acc.ball(r.contains_zero(), &r, || format!("m = {m}: {r}")),
            Err(e) => acc.error(format!("m = {m}: {e}")),
        }
    }
    checks.push(acc.finish("values of m"));

    let mut acc = Acc::new("|(-1)^m sigma(m) - 4^m - 2^m - (2 - sqrt 2)^m| <= 2 (2 - sqrt(2 + sqrt 2))^m");
    for m in 5..=15 {
        match asymptotic_residual(m) {
            Ok(r) => {
                let bound = asymptotic_bound(m);
                acc.ball(r.abs_upper() <= bound, &r, || format!("m = {m}: {} > {bound:e}", r.abs_upper()));
            }
            Err(e) => acc.error(format!("m = {m}: {e}")),
        }
    }
    checks.push(acc.finish("values of m"));
    checks
}

/// `w_0` and `rho` of the Taylor certificate for the first zero of `S`.
pub const APPENDIX_W0: (f64, f64) = (-0.177323882, 0.144626388);
pub const APPENDIX_RHO: f64 = 0.002;

fn appendix() -> Vec<Check> {
    let w0 = Complex64::new(APPENDIX_W0.0, APPENDIX_W0.1);
    let mut checks = Vec::new();
    let point = HPoint::new(w0).expect("Im w0 > 0");
    let cert = certify_taylor_S(&point, APPENDIX_RHO, Complex64::new(0.0, 0.0));
    checks.push(match &cert {
        Ok(c) => Check {
            name: "Taylor lower bound for |S| on |w - w0| = 0.002".into(),
            passed: c.is_sound(),
            radius: Some(c.radius),
            detail: format!("lower bound {:e}, remainder {:e}", c.contour_floor, c.tail_bound),
        },
        Err(e) => Check {
            name: "Taylor lower bound for |S| on |w - w0| = 0.002".into(),
            passed: false,
            radius: None,
            detail: e.to_string(),
        },
    });
    let refined = newton_refine(&SFunction, w0, 1e-14);
    checks.push(match refined {
        Ok(z) => Check {
            name: "Newton on S from w0 stays in the certified disk".into(),
            passed: (z - w0).norm() < APPENDIX_RHO,
            radius: None,
            detail: format!("zero at {z}, {:e} from w0", (z - w0).norm()),
        },
        Err(e) => Check {
            name: "Newton on S from w0 stays in the certified disk".into(),
            passed: false,
            radius: None,
            detail: e.to_string(),
        },
    });
    checks
}

fn expsums() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut acc = Acc::new("M2 = n, M4 = 2n^2 - n");
    for n in 1..=64u32 {
        match (moment(n, 2), moment(n, 4)) {
            (Ok(m2), Ok(m4)) => {
                let n = n as u64;
                acc.flag(m2 == n && m4 == 2 * n * n - n, || format!("n = {n}: M2 = {m2}, M4 = {m4}"));
            }
            (Err(e), _) | (_, Err(e)) => acc.error(format!("n = {n}: {e}")),
        }
    }
    checks.push(acc.finish_exact("values of n"));

    let mut acc = Acc::new("quadrature moments within 1e-6 relative");
    for n in 1..=16u32 {
        for (p, exact) in [(2, n as f64), (4, (2 * n * n - n) as f64)] {
            // |s_n|^4 has frequencies below 2^(n+1); the rule is exact above that
            let q = moment_quadrature(n, p, 1 << (n + 2));
            acc.flag(((q - exact) / exact).abs() <= 1e-6, || format!("n = {n}, p = {p}: {q}"));
        }
    }
    checks.push(acc.finish_exact("moments"));

    let mut acc = Acc::new("measure{|s_n| >= sqrt(n)/2} >= 9n/(16(2n-1)) - 0.01");
    for n in 2..=12u32 {
        match measure_a(n, 1 << 16) {
            Ok(m) => {
                let lb = measure_lower_bound(n) - 0.01;
                acc.flag(m >= lb, || format!("n = {n}: {m} < {lb}"));
            }
            Err(e) => acc.error(format!("n = {n}: {e}")),
        }
    }
    checks.push(acc.finish_exact("values of n"));

    let mut acc = Acc::new("s_{2n}(theta) = s_n(theta) + s_n(2^n theta), |s_n| <= n");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for _ in 0..100 {
        let theta: f64 = rng.gen_range(0.0..1.0);
        let r = doubling_identity(theta, 8);
        acc.flag(r <= 1e-9, || format!("theta = {theta}: residual {r:e}"));
        acc.flag(s_n(theta, 8).norm() <= 8.0 + 1e-12, || format!("theta = {theta}: |s_8| > 8"));
    }
    checks.push(acc.finish_exact("checks"));
    checks
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Identities => identities(),
        Suite::Ramanujan => ramanujan(),
        Suite::Constants => constants(),
        Suite::Appendix => appendix(),
        Suite::Expsums => expsums(),
    };
    Ok(SuiteReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coprime_samples_are_coprime_and_distinct() {
        for q in [9u64, 81, 729] {
            let s = coprime_samples(q, 20);
            assert_eq!(s.len(), 20);
            assert!(s.iter().all(|&x| num_integer::gcd(x as u64, q) == 1));
            let mut d = s.clone();
            d.dedup();
            assert_eq!(d.len(), 20);
        }
    }

    #[test]
    fn appendix_suite_passes() {
        let r = run_suite(Suite::Appendix).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
