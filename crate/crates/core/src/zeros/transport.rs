//! Moving values of `S` to values of `f` near `z = 1`.
//!
//! With `theta_0 = 1/q` and `n_0 = phi(q)`, the vanishing Ramanujan sums make
//! `F(theta_0 + w 2^-n_0)` close to `S(w)` on compact sets, with an error that
//! decays like `2^-a`. A zero `zeta` of `S - v` therefore sits next to a zero
//! `u` of `u -> F(theta_0 + u 2^-n_0) - v`, found by Newton (or by a homotopy
//! from `S` to `F`) and certified by Rouché in the offset coordinate; the
//! point `z = e(theta_0 + u 2^-n_0)` has `f(z) = v` and
//! `1 - |z| ~ 2 pi Im(u) 2^-n_0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::certify::{certify_rouche_micro, certify_taylor_S, RoucheOutcome, ZeroCertificate};
use super::search::newton_refine;
use super::target::{MicroF, SFunction, Shifted};
use crate::error::{Error, Result};
use crate::numtheory::{make_params, RamanujanParams};
use crate::rigor::Ball;
use crate::series::{self, HPoint, MicroSeries, SPlan, TruncationPlan};

const LN_2: f64 = std::f64::consts::LN_2;
const TAU: f64 = std::f64::consts::TAU;

/// Residual `|F(micro) - v|` that a refined point must meet before certification.
pub const TRANSPORT_RESIDUAL: f64 = 1e-9;

fn micro_series(params: &RamanujanParams, t_u: f64) -> MicroSeries {
    let plan = TruncationPlan::micro_for(params.n0 as u32, t_u);
    MicroSeries::new(params.theta0.clone(), params.n0 as u32, plan.terms)
}

/// Certified upper bound for `|F(theta_0 + w 2^-n_0) - S(w)|`.
pub fn approx_error(a: u32, w: &HPoint) -> Result<f64> {
    let params = make_params(a)?;
    let series = micro_series(&params, w.t());
    approx_error_with(&params, &series, w)
}

pub fn approx_error_with(params: &RamanujanParams, series: &MicroSeries, w: &HPoint) -> Result<f64> {
    if series.scale as u64 != params.n0 {
        return Err(Error::InvalidArgument("series scale differs from n0".into()));
    }
    let f = series.eval(w.ball())?;
    let s = series::eval_S(w, &SPlan::for_point(w))?;
    Ok((f - s).abs_upper())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsSummary {
    pub a: u32,
    pub k: u64,
    pub q: String,
    pub n0: u64,
    pub theta0: String,
}

impl From<&RamanujanParams> for ParamsSummary {
    fn from(p: &RamanujanParams) -> Self {
        ParamsSummary {
            a: p.a,
            k: p.k,
            q: p.q.to_string(),
            n0: p.n0,
            theta0: p.theta0.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Newton from a certified zero of `S - v`.
    SZero,
    /// Homotopy from `S - v` to `F - v`, started at a certified zero of `S - v`.
    Homotopy,
    /// Direct search for zeroes of `F - v` in the offset coordinate.
    DirectSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroSummary {
    pub base: String,
    pub scale: u64,
    pub offset: Ball,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub params: ParamsSummary,
    pub v_re: f64,
    pub v_im: f64,
    pub route: Route,
    /// Certificate for the zero of `S - v` the point was transported from.
    pub s_zero: Option<ZeroCertificate>,
    pub micro: MicroSummary,
    /// Rouché certificate in the offset coordinate `u`.
    pub f_certificate: ZeroCertificate,
    /// `|F - v|` at the refined offset, in floating point.
    pub residual: f64,
    /// `ln(1 - |z|)`, i.e. `ln(2 pi Im u) - n_0 ln 2` up to `O(2^-n_0)`.
    pub boundary_distance_log: f64,
    /// `|1 - z|`.
    pub distance_to_one: f64,
}

impl TransportResult {
    /// `boundary_distance_log / (-n_0 ln 2)`; close to 1.
    pub fn exponent_ratio(&self) -> f64 {
        self.boundary_distance_log / (-(self.params.n0 as f64) * LN_2)
    }

    pub fn offset(&self) -> Complex64 {
        self.micro.offset.center()
    }
}

fn boundary_log(n0: u64, u: Complex64) -> f64 {
    // 1 - |z| = -expm1(-2 pi Im(u) 2^-n0); the correction to the log is below 1e-15
    (TAU * u.im).ln() - n0 as f64 * LN_2
}

fn distance_to_one(params: &RamanujanParams, u: Complex64) -> f64 {
    let w = Complex64::new(params.theta0.to_f64(), 0.0) + u * 2f64.powi(-(params.n0.min(1000) as i32));
    let z = Complex64::new(0.0, TAU) * w;
    // |e(w) - 1| without cancellation: |exp(z) - 1| with z small
    let em1 = Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * (0.5 * z.im).sin().powi(2), z.re.exp() * z.im.sin());
    em1.norm()
}

/// Follows `H(u, s) = (1 - s)(S(u) - v) + s(F(u) - v)` from `s = 0` to `s = 1`.
fn homotopy(series: &MicroSeries, v: Complex64, start: Complex64) -> Option<Complex64> {
    let eval = |u: Complex64, s: f64| -> Option<(Complex64, Complex64)> {
        if !(u.im > 0.0) {
            return None;
        }
        let (sv, sd) = series::s_value_and_derivative(u);
        let (fv, fd) = series.value_and_derivative(u);
        Some(((sv - v) * (1.0 - s) + (fv - v) * s, sd * (1.0 - s) + fd * s))
    };
    let mut u = start;
    let mut s = 0.0f64;
    let mut ds = 0.05f64;
    while s < 1.0 {
        let target_s = (s + ds).min(1.0);
        let mut trial = u;
        let mut ok = false;
        for _ in 0..30 {
            let Some((val, der)) = eval(trial, target_s) else { break };
            if der.norm() == 0.0 {
                break;
            }
            let step = val / der;
            trial -= step;
            if step.norm() < 1e-13 * trial.norm().max(1e-3) {
                ok = trial.im > 0.0;
                break;
            }
        }
        if ok && (trial - u).norm() < 0.5 {
            u = trial;
            s = target_s;
            ds = (ds * 1.5).min(0.2);
        } else {
            ds *= 0.5;
            if ds < 1e-5 {
                return None;
            }
        }
    }
    Some(u)
}

/// Rouché certificate around `u` for `F - v`, trying a few radii.
fn certify_offset(series: &MicroSeries, u: Complex64, v: Complex64) -> Result<ZeroCertificate> {
    let mut last = Error::NotCertified { floor: 0.0, bound: 0.0 };
    for r in [1e-6, 1e-5, 1e-7, 1e-4] {
        let r = r * u.norm().max(1.0);
        if !(r < 0.5 * u.im) {
            continue;
        }
        match certify_rouche_micro(series, u, r, v) {
            Ok(RoucheOutcome::Certified(c)) if c.winding == 1 => return Ok(c),
            Ok(RoucheOutcome::Certified(c)) => {
                last = Error::Invariant(format!("disk around {u} holds {} zeroes", c.winding));
            }
            Ok(RoucheOutcome::NoZero { floor, tail }) | Ok(RoucheOutcome::NotCertified { floor, tail }) => {
                last = Error::NotCertified { floor, bound: tail };
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Series long enough for offsets with `Im u >= t_u / 2`.
fn series_for(params: &RamanujanParams, t_u: f64) -> MicroSeries {
    micro_series(params, 0.5 * t_u)
}

fn finish(
    params: &RamanujanParams,
    v: Complex64,
    u: Complex64,
    route: Route,
    s_zero: Option<ZeroCertificate>,
) -> Result<TransportResult> {
    let series = series_for(params, u.im);
    let (val, _) = series.value_and_derivative(u);
    let residual = (val - v).norm();
    if !(residual <= TRANSPORT_RESIDUAL) {
        return Err(Error::NewtonFailed {
            last: u,
            reason: format!("residual {residual:e} above {TRANSPORT_RESIDUAL:e}"),
        });
    }
    let cert = certify_offset(&series, u, v)?;
    Ok(TransportResult {
        params: params.into(),
        v_re: v.re,
        v_im: v.im,
        route,
        s_zero,
        micro: MicroSummary {
            base: params.theta0.to_string(),
            scale: params.n0,
            offset: Ball::with_radius(u, cert.radius),
        },
        f_certificate: cert,
        residual,
        boundary_distance_log: boundary_log(params.n0, u),
        distance_to_one: distance_to_one(params, u),
    })
}

/// Transports a zero of `S - v` near `seed` to a certified point with `f = v`.
pub fn transport(a: u32, v: Complex64, seed: &HPoint) -> Result<TransportResult> {
    let params = make_params(a)?;
    let s_target = Shifted::new(SFunction, v);
    let zeta = newton_refine(&s_target, seed.value(), 1e-14)?;
    let zeta_point = HPoint::new(zeta)?;
    let s_cert = certify_s_zero(&zeta_point, v)?;

    let series = series_for(&params, zeta.im / 4.0);
    let f_target = Shifted::new(MicroF { series: series.clone() }, v);
    let mut failures = Vec::new();
    match newton_refine(&f_target, zeta, 1e-14) {
        Ok(u) => match finish(&params, v, u, Route::SZero, Some(s_cert.clone())) {
            Ok(r) => return Ok(r),
            Err(e) => failures.push(format!("newton: {e}")),
        },
        Err(e) => failures.push(format!("newton: {e}")),
    }
    match homotopy(&series, v, zeta).and_then(|u| newton_refine(&f_target, u, 1e-14).ok()) {
        Some(u) => match finish(&params, v, u, Route::Homotopy, Some(s_cert)) {
            Ok(r) => return Ok(r),
            Err(e) => failures.push(format!("homotopy: {e}")),
        },
        None => failures.push("homotopy: path lost".into()),
    }
    Err(Error::NewtonFailed {
        last: zeta,
        reason: failures.join("; "),
    })
}

/// Taylor certificate for the zero of `S - v` at `zeta`, at the first radius that works.
fn certify_s_zero(zeta: &HPoint, v: Complex64) -> Result<ZeroCertificate> {
    let mut last = Error::Degenerate("no radius tried".into());
    for rho in [1e-4, 1e-5, 1e-3, 1e-6] {
        match certify_taylor_S(zeta, rho, v) {
            Ok(c) => return Ok(c),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Zeroes of `S - v` found by Newton from a grid over `[-2.5, 2.5] x [0.02, 2]`,
/// ordered by modulus.
pub fn s_preimages(v: Complex64) -> Vec<Complex64> {
    let target = Shifted::new(SFunction, v);
    let mut found: Vec<Complex64> = Vec::new();
    for i in 0..=25 {
        let re = -2.5 + 0.2 * i as f64;
        for im in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6] {
            if let Ok(z) = newton_refine(&target, Complex64::new(re, im), 1e-14) {
                let inside = z.re.abs() <= 2.5 && z.im >= 0.02 && z.im <= 2.0;
                if inside && !found.iter().any(|f| (f - z).norm() < 1e-8) {
                    found.push(z);
                }
            }
        }
    }
    found.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap().then(a.re.partial_cmp(&b.re).unwrap()));
    found
}

/// Zeroes of `F - v` in the offset coordinate, by Newton from a grid.
fn direct_search(params: &RamanujanParams, v: Complex64) -> Result<TransportResult> {
    let mut starts: Vec<Complex64> = Vec::new();
    for k in 0..=128 {
        let re = -64.0 + k as f64;
        for im in [0.003, 0.01, 0.03, 0.1] {
            starts.push(Complex64::new(re, im));
        }
    }
    starts.sort_by(|a, b| {
        (a.re.abs(), a.re, a.im)
            .partial_cmp(&(b.re.abs(), b.re, b.im))
            .unwrap()
    });
    let series = series_for(params, 1e-3);
    let target = Shifted::new(MicroF { series }, v);
    let mut last = Error::NewtonFailed {
        last: Complex64::new(0.0, 0.0),
        reason: "no start converged".into(),
    };
    for s in starts {
        if let Ok(u) = newton_refine(&target, s, 1e-14) {
            if u.im < 5e-4 {
                continue;
            }
            match finish(params, v, u, Route::DirectSearch, None) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

/// A certified point `z` with `f(z) = v` and `1 - |z| ~ 2^-n_0`.
pub fn attain(a: u32, v: Complex64) -> Result<TransportResult> {
    let params = make_params(a)?;
    let mut failures = Vec::new();
    for seed in s_preimages(v).into_iter().take(8) {
        let Ok(point) = HPoint::new(seed) else { continue };
        match transport(a, v, &point) {
            Ok(r) => return Ok(r),
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    direct_search(&params, v).map_err(|e| {
        failures.push(format!("direct search: {e}"));
        Error::NewtonFailed {
            last: Complex64::new(0.0, 0.0),
            reason: failures.join("; "),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn approx_error_decays() {
        let w = HPoint::new(c(0.0, 1.0)).unwrap();
        let e: Vec<f64> = (1..=2).map(|a| approx_error(a, &w).unwrap()).collect();
        assert!(e[1] < e[0]);
        // high-precision oracle: 0.68173 and 0.56893
        assert!((e[0] - 0.68173).abs() < 1e-3);
        assert!((e[1] - 0.56893).abs() < 1e-3);
    }

    #[test]
    fn transport_appendix_zero() {
        let seed = HPoint::new(c(-0.177323882, 0.144626388)).unwrap();
        let r = transport(2, c(0.0, 0.0), &seed).unwrap();
        assert!((r.offset() - c(-0.19509, 0.11457)).norm() < 1e-4);
        assert!(r.f_certificate.is_sound());
        assert!((r.exponent_ratio() - 1.0).abs() < 0.25);
        assert!(r.residual <= TRANSPORT_RESIDUAL);
    }

    #[test]
    fn preimages_of_zero() {
        let z = s_preimages(c(0.0, 0.0));
        assert!(z.iter().any(|w| (w - c(-0.17732388, 0.14462639)).norm() < 1e-6));
    }
}
