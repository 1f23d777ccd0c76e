//! Certified evaluators for `f`, `F`, `G`, `H`, `S`, `S_1` and the derivatives
//! of `S`, with explicit truncation-tail bounds.
//!
//! Tail bounds used:
//!
//! * `f(z) = sum_{n>=0} z^(2^n)`: for `n >= N+1` we have
//!   `2^n >= 2^(N+1) + (n - N - 1)`, so with `r = |z| < 1` the tail after the
//!   `z^(2^N)` term is at most `r^(2^(N+1)) / (1 - r)`.
//! * `F(w) = sum e(2^n w)`: the term magnitudes `m_n = exp(-2 pi 2^n t)`
//!   satisfy `m_{n+1}/m_n = m_n`, so after `N` terms the tail is at most
//!   `m_N / (1 - m_N)`.
//! * `G`, `H`: `|e(x) - 1| <= 2 pi |x| exp(2 pi |x|)`, which summed over
//!   `l > L` with `x = w/2^l` gives `2 pi |w| 2^-L exp(2 pi |w| 2^-(L+1))`;
//!   we keep an extra factor of two.
//!
//! Points very close to the real axis are handled through
//! [`MicroscopePoint`]: `w = theta + u 2^-n` with exact rational `theta`, so the
//! phase `2^k theta mod 1` is exact and only the offset `u` is rounded.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};
use crate::rigor::{e_ratio, pow2, up, Ball, RationalAngle, EPS};

const TAU: f64 = std::f64::consts::TAU;

/// Tails are pushed below this absolute size by the default plans.
pub const TAIL_TARGET: f64 = 1e-19;

/// Default number of extra terms past the scale for microscope evaluation.
pub const MICRO_GUARD_CAP: usize = 60;

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint(Complex64);

impl HPoint {
    pub fn new(w: Complex64) -> Result<HPoint> {
        if !(w.im > 0.0) || !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::Domain(format!("{w} is not in the upper half-plane")));
        }
        Ok(HPoint(w))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn t(&self) -> f64 {
        self.0.im
    }

    pub fn ball(&self) -> Ball {
        Ball::exact(self.0)
    }
}

/// `w = base + offset * 2^-scale`, with `Im(offset) > 0` over the whole ball.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroscopePoint {
    pub base: RationalAngle,
    pub scale: u32,
    pub offset: Ball,
}

impl MicroscopePoint {
    pub fn new(base: RationalAngle, scale: u32, offset: Ball) -> Result<MicroscopePoint> {
        if !(offset.im_bounds().0 > 0.0) {
            return Err(Error::Domain(format!("microscope offset {offset} reaches Im <= 0")));
        }
        Ok(MicroscopePoint { base, scale, offset })
    }

    /// Lower bound for `Im(offset)`.
    pub fn offset_floor(&self) -> f64 {
        self.offset.im_bounds().0
    }

    /// Floating-point value of `w`; meaningful only when `2^-scale` does not
    /// wash out the offset.
    pub fn approx_w(&self) -> Complex64 {
        Complex64::new(self.base.to_f64(), 0.0) + self.offset.center() * pow2(-(self.scale as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesFamily {
    /// `f(z)`: `terms = N` sums `z^(2^n)` for `n = 0..=N`.
    FSeries,
    /// `F(w)`: `terms = N` sums `e(2^n w)` for `n = 0..N`.
    FUpper,
    /// `G`, `H`, `c_m`: `terms = L` sums `l = 1..=L`.
    GH,
    /// Derivatives of `S`: `terms = N` terms of the `F`-part.
    SDerivative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub terms: usize,
    pub family: SeriesFamily,
}

impl TruncationPlan {
    pub fn new(terms: usize, family: SeriesFamily) -> TruncationPlan {
        TruncationPlan { terms, family }
    }

    /// Smallest `N` with `r^(2^(N+1))/(1-r) <= TAIL_TARGET`.
    pub fn f_for(r: f64) -> TruncationPlan {
        let mut n = 0;
        while n < 60 {
            if f_tail(r, n).map_or(false, |t| t <= TAIL_TARGET) {
                break;
            }
            n += 1;
        }
        TruncationPlan::new(n, SeriesFamily::FSeries)
    }

    /// Term count for `F` at imaginary part `t`.
    pub fn upper_for(t: f64) -> TruncationPlan {
        let mut n = 1;
        while n < 200 && upper_tail(t, n as i32) > TAIL_TARGET {
            n += 1;
        }
        TruncationPlan::new(n, SeriesFamily::FUpper)
    }

    /// Term count for `F` at a microscope point with offset floor `t_u`.
    pub fn micro_for(scale: u32, t_u: f64) -> TruncationPlan {
        let mut extra = 0usize;
        while extra < MICRO_GUARD_CAP && upper_tail(t_u, extra as i32) > TAIL_TARGET {
            extra += 1;
        }
        TruncationPlan::new(scale as usize + extra, SeriesFamily::FUpper)
    }

    /// Term count for `G`, `H`, `c_m` at modulus `wabs`.
    pub fn gh_for(wabs: f64) -> TruncationPlan {
        let mut l = 16;
        while l < 400 && gh_tail(wabs, l) > TAIL_TARGET {
            l += 1;
        }
        TruncationPlan::new(l, SeriesFamily::GH)
    }
}

/// Plans for the two halves of `S = F + G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SPlan {
    pub upper: usize,
    pub gh: usize,
}

impl SPlan {
    pub fn for_ball(w: &Ball) -> Result<SPlan> {
        let t = w.im_bounds().0;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("{w} reaches Im <= 0")));
        }
        Ok(SPlan {
            upper: TruncationPlan::upper_for(t).terms,
            gh: TruncationPlan::gh_for(w.abs_upper() + 1.0).terms,
        })
    }

    pub fn for_point(w: &HPoint) -> SPlan {
        SPlan::for_ball(&w.ball()).expect("HPoint has Im > 0")
    }
}

// ---------------------------------------------------------------------------
// f on the disk

/// `r^(2^(N+1)) / (1 - r)` rounded up; `None` when `r >= 1`.
pub fn f_tail(r: f64, top: usize) -> Option<f64> {
    if !(r < 1.0) {
        return None;
    }
    let mut p = up(r);
    for _ in 0..=top {
        p = up(p * p);
        if p == 0.0 {
            break;
        }
    }
    let gap = (1.0 - r) * (1.0 - 2.0 * EPS);
    Some(up(p / gap))
}

/// Enclosure of the partial sum `sum_{n=0}^{top} z^(2^n)` over the ball `z`.
pub fn f_partial_ball(z: Ball, top: usize) -> Ball {
    let mut p = z;
    let mut sum = z;
    for _ in 0..top {
        p = p.sqr();
        sum = sum + p;
    }
    sum
}

/// Partial sum and its derivative at a point, in plain floating point.
pub fn f_partial_point(z: Complex64, top: usize) -> (Complex64, Complex64) {
    // pm1 = z^(2^n - 1)
    let mut pm1 = Complex64::new(1.0, 0.0);
    let mut value = z;
    let mut deriv = Complex64::new(1.0, 0.0);
    let mut weight = 1.0;
    for _ in 0..top {
        pm1 = pm1 * pm1 * z;
        weight *= 2.0;
        deriv += pm1 * weight;
        value += pm1 * z;
    }
    (value, deriv)
}

/// Enclosure of `f` over the ball `z`, tail included.
pub fn eval_f_ball(z: Ball, top: usize) -> Result<Ball> {
    let r = z.abs_upper();
    let tail = f_tail(r, top).ok_or_else(|| Error::Domain(format!("|z| <= {r} reaches the unit circle")))?;
    Ok(f_partial_ball(z, top).inflate(tail))
}

pub fn eval_f(z: Complex64, plan: &TruncationPlan) -> Result<Ball> {
    eval_f_ball(Ball::exact(z), plan.terms)
}

// ---------------------------------------------------------------------------
// F on the upper half-plane

/// `m/(1-m)` with `m = exp(-2 pi 2^k t)`, rounded up.
pub fn upper_tail(t: f64, k: i32) -> f64 {
    let x = TAU * pow2(k) * t * (1.0 - 4.0 * EPS);
    let m = (-x).exp() * (1.0 + 4.0 * EPS);
    if m >= 1.0 {
        return f64::INFINITY;
    }
    up(m / ((1.0 - m) * (1.0 - 2.0 * EPS)))
}

pub fn eval_upper_ball(w: Ball, terms: usize) -> Result<Ball> {
    let t = w.im_bounds().0;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("{w} reaches Im <= 0")));
    }
    if terms == 0 {
        return Err(Error::PlanTooShort { needed: 1, got: 0 });
    }
    let mut sum = Ball::ZERO;
    for n in 0..terms {
        sum = sum + w.ldexp(n as i32).e();
    }
    Ok(sum.inflate(upper_tail(t, terms as i32)))
}

#[allow(non_snake_case)]
pub fn eval_F(w: &HPoint, plan: &TruncationPlan) -> Result<Ball> {
    eval_upper_ball(w.ball(), plan.terms)
}

/// Orbits longer than this are regenerated on every pass instead of cached.
const ORBIT_CACHE_LIMIT: usize = 1 << 22;

/// The phase orbit `e(2^n theta)`, `n = 0..len`.
#[derive(Clone, Debug)]
pub enum PhaseOrbit {
    Cached(Vec<Ball>),
    Lazy { p: u64, q: u64, len: usize },
}

impl PhaseOrbit {
    pub fn new(theta: &RationalAngle, terms: usize) -> PhaseOrbit {
        match theta.as_u64_pair() {
            Some((p, q)) if q < (1 << 61) => {
                if terms > ORBIT_CACHE_LIMIT {
                    return PhaseOrbit::Lazy { p, q, len: terms };
                }
                let mut balls = Vec::with_capacity(terms);
                let mut p = p;
                for _ in 0..terms {
                    balls.push(e_ratio(p, q));
                    p = ((p as u128 * 2) % q as u128) as u64;
                }
                PhaseOrbit::Cached(balls)
            }
            _ => {
                let mut balls = Vec::with_capacity(terms);
                let mut phase = theta.clone();
                let two = BigInt::from(2);
                for _ in 0..terms {
                    balls.push(phase.e());
                    phase = phase.mul_int(&two);
                }
                PhaseOrbit::Cached(balls)
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PhaseOrbit::Cached(b) => b.len(),
            PhaseOrbit::Lazy { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn for_each(&self, mut f: impl FnMut(usize, Ball)) {
        match self {
            PhaseOrbit::Cached(balls) => {
                for (n, b) in balls.iter().enumerate() {
                    f(n, *b);
                }
            }
            PhaseOrbit::Lazy { p, q, len } => {
                let (mut p, q) = (*p, *q);
                for n in 0..*len {
                    f(n, e_ratio(p, q));
                    p = ((p as u128 * 2) % q as u128) as u64;
                }
            }
        }
    }
}

/// `F(base + u 2^-scale)` as a function of the offset `u`.
#[derive(Clone, Debug)]
pub struct MicroSeries {
    pub base: RationalAngle,
    pub scale: u32,
    orbit: PhaseOrbit,
}

impl MicroSeries {
    pub fn new(base: RationalAngle, scale: u32, terms: usize) -> MicroSeries {
        let orbit = PhaseOrbit::new(&base, terms);
        MicroSeries { base, scale, orbit }
    }

    pub fn terms(&self) -> usize {
        self.orbit.len()
    }

    /// Enclosure of the partial sum over the offset ball `u` (no tail).
    pub fn partial_ball(&self, u: Ball) -> Ball {
        let mut sum = Ball::ZERO;
        let scale = self.scale as i32;
        self.orbit.for_each(|n, phase| {
            sum = sum + phase * u.ldexp(n as i32 - scale).e();
        });
        sum
    }

    /// Tail bound for offsets with `Im u >= t_u`; infinite when the plan is
    /// too short for the geometric bound.
    pub fn tail(&self, t_u: f64) -> f64 {
        let k = self.terms() as i32 - self.scale as i32;
        if !(t_u > 0.0) || pow2(k) * t_u < 1.0 {
            return f64::INFINITY;
        }
        upper_tail(t_u, k)
    }

    /// Smallest term count for which the tail bound is valid at `t_u`.
    pub fn needed_terms(&self, t_u: f64) -> usize {
        let mut extra = 0i32;
        while pow2(extra) * t_u < 1.0 {
            extra += 1;
        }
        self.scale as usize + extra as usize
    }

    pub fn eval(&self, u: Ball) -> Result<Ball> {
        let t_u = u.im_bounds().0;
        if !(t_u > 0.0) {
            return Err(Error::Domain(format!("offset {u} reaches Im <= 0")));
        }
        let tail = self.tail(t_u);
        if !tail.is_finite() {
            return Err(Error::PlanTooShort {
                needed: self.needed_terms(t_u),
                got: self.terms(),
            });
        }
        Ok(self.partial_ball(u).inflate(tail))
    }

    /// `dF/du` enclosure of the partial sum over the ball `u` (no tail).
    pub fn partial_derivative_ball(&self, u: Ball) -> Ball {
        let two_pi_i = Ball::with_radius(Complex64::new(0.0, TAU), 2.5e-16);
        let mut sum = Ball::ZERO;
        let scale = self.scale as i32;
        self.orbit.for_each(|n, phase| {
            let k = n as i32 - scale;
            sum = sum + (phase * u.ldexp(k).e()).ldexp(k);
        });
        two_pi_i * sum
    }

    /// Partial sum and `d/du` in floating point.
    pub fn value_and_derivative(&self, u: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let scale = self.scale as i32;
        self.orbit.for_each(|n, phase| {
            let s = pow2(n as i32 - scale);
            let x = u * s;
            let term = phase.center() * Complex64::new(0.0, TAU * x.re).exp() * (-TAU * x.im).exp();
            value += term;
            deriv += term * Complex64::new(0.0, TAU * s);
        });
        (value, deriv)
    }
}

#[allow(non_snake_case)]
pub fn eval_F_micro(m: &MicroscopePoint, plan: &TruncationPlan) -> Result<Ball> {
    MicroSeries::new(m.base.clone(), m.scale, plan.terms).eval(m.offset)
}

// ---------------------------------------------------------------------------
// G, H and S

pub fn gh_tail(wabs: f64, l: usize) -> f64 {
    let s = pow2(-(l as i32));
    up(2.0 * TAU * wabs * s * (TAU * wabs * s * 0.5).exp() * (1.0 + 8.0 * EPS))
}

/// `e(-1/2^l)` for `l = 1..=256`.
fn neg_dyadic_phase(l: usize) -> Ball {
    static TABLE: OnceLock<Vec<Ball>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=256usize)
            .map(|l| {
                RationalAngle::new(BigInt::from(-1), BigInt::one() << l)
                    .expect("positive denominator")
                    .e()
            })
            .collect()
    });
    table[l]
}

fn gh_sum(w: Ball, terms: usize, weighted: bool) -> Result<Ball> {
    if terms > 256 {
        return Err(Error::InvalidArgument(format!("{terms} terms exceed the supported 256")));
    }
    let mut sum = Ball::ZERO;
    for l in 1..=terms {
        let d = w.ldexp(-(l as i32)).e_minus_one();
        sum = sum + if weighted { neg_dyadic_phase(l) * d } else { d };
    }
    Ok(sum.inflate(gh_tail(w.abs_upper(), terms)))
}

/// `G(w) = sum_{l>=1} e(-1/2^l)(e(w/2^l) - 1)`; entire.
#[allow(non_snake_case)]
pub fn eval_G_ball(w: Ball, terms: usize) -> Result<Ball> {
    gh_sum(w, terms, true)
}

/// `H(w) = sum_{l>=1} (e(w/2^l) - 1)`; entire.
#[allow(non_snake_case)]
pub fn eval_H_ball(w: Ball, terms: usize) -> Result<Ball> {
    gh_sum(w, terms, false)
}

#[allow(non_snake_case)]
pub fn eval_G(w: Complex64, plan: &TruncationPlan) -> Result<Ball> {
    eval_G_ball(Ball::exact(w), plan.terms)
}

#[allow(non_snake_case)]
pub fn eval_H(w: Complex64, plan: &TruncationPlan) -> Result<Ball> {
    eval_H_ball(Ball::exact(w), plan.terms)
}

#[allow(non_snake_case)]
pub fn eval_S_ball(w: Ball, plan: &SPlan) -> Result<Ball> {
    Ok(eval_upper_ball(w, plan.upper)? + eval_G_ball(w, plan.gh)?)
}

#[allow(non_snake_case)]
pub fn eval_S(w: &HPoint, plan: &SPlan) -> Result<Ball> {
    eval_S_ball(w.ball(), plan)
}

/// `S_1(w) = F(w) + H(w) - c_{-1}`.
#[allow(non_snake_case)]
pub fn eval_S1_ball(w: Ball, plan: &SPlan) -> Result<Ball> {
    let c = constants::c_m(-1, constants::DEFAULT_L);
    Ok(eval_upper_ball(w, plan.upper)? + eval_H_ball(w, plan.gh)? - c)
}

#[allow(non_snake_case)]
pub fn eval_S1(w: &HPoint, plan: &SPlan) -> Result<Ball> {
    eval_S1_ball(w.ball(), plan)
}

/// `S_1(w)` computed as `S(w + 1)`.
#[allow(non_snake_case)]
pub fn eval_S1_via_shift(w: &HPoint, plan: &SPlan) -> Result<Ball> {
    eval_S_ball(w.ball() + Complex64::new(1.0, 0.0), plan)
}

/// `S` and `S'` at a point, in plain floating point (for Newton steps).
pub fn s_value_and_derivative(w: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let t = w.im;
    let mut n = 0;
    loop {
        let s = pow2(n);
        let x = w * s;
        let term = Complex64::new(0.0, TAU * x.re).exp() * (-TAU * x.im).exp();
        value += term;
        deriv += term * Complex64::new(0.0, TAU * s);
        if (TAU * s * t > 50.0 && n > 2) || n > 200 {
            break;
        }
        n += 1;
    }
    for l in 1..=80 {
        let s = pow2(-l);
        let x = w * s;
        let phase = neg_dyadic_phase(l as usize).center();
        let z = Complex64::new(0.0, TAU) * x;
        let ez = z.exp();
        value += phase * (ez - 1.0);
        deriv += phase * ez * Complex64::new(0.0, TAU * s);
    }
    (value, deriv)
}

/// Enclosure of `S^(k)(w)` from the termwise differentiated series
/// `sum_n (2^(n+1) pi i)^k e(w 2^n) + (pi i / 2^n)^k e((w-1)/2^(n+1))`.
#[allow(non_snake_case)]
pub fn eval_S_deriv_ball(w: Ball, k: u32, plan: &SPlan) -> Result<Ball> {
    if k == 0 {
        return Err(Error::InvalidArgument("k = 0: use eval_S".into()));
    }
    let t = w.im_bounds().0;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("{w} reaches Im <= 0")));
    }
    let two_pi = Ball::with_radius(Complex64::new(TAU, 0.0), 2.5e-16);
    let i_pow = Ball::I.powu(k % 4);
    let upper_factor = two_pi.powu(k) * i_pow;
    let lower_factor = two_pi.ldexp(-1).powu(k) * i_pow;
    let kk = k as i32;

    // F-part: geometric tail once the term ratio 2^k exp(-2 pi 2^n t) < 1
    let n_upper = plan.upper.max(1);
    let mut sum = Ball::ZERO;
    for n in 0..n_upper {
        let term = w.ldexp(n as i32).e().ldexp(kk * n as i32);
        sum = sum + term;
    }
    let ratio = pow2(kk) * (-(TAU * pow2(n_upper as i32) * t) * (1.0 - 4.0 * EPS)).exp() * (1.0 + 4.0 * EPS);
    if ratio >= 1.0 {
        return Err(Error::PlanTooShort {
            needed: n_upper + 1,
            got: n_upper,
        });
    }
    let first = (TAU.powi(k as i32) * pow2(kk * n_upper as i32))
        * (-(TAU * pow2(n_upper as i32) * t) * (1.0 - 4.0 * EPS)).exp()
        * (1.0 + 8.0 * EPS * (k as f64 + 1.0));
    let upper = (upper_factor * sum).inflate(up(first / (1.0 - ratio)));

    // G-part: |e((w-1)/2^(n+1))| <= 1, so the tail is pi^k 2^(-Lk) / (1 - 2^-k)
    let shifted = w - Complex64::new(1.0, 0.0);
    let l_terms = plan.gh.max(1);
    let mut gsum = Ball::ZERO;
    for n in 0..l_terms {
        let term = shifted.ldexp(-(n as i32 + 1)).e().ldexp(-kk * n as i32);
        gsum = gsum + term;
    }
    let gtail = std::f64::consts::PI.powi(k as i32) * pow2(-kk * l_terms as i32) / (1.0 - pow2(-kk));
    let lower = (lower_factor * gsum).inflate(up(gtail * (1.0 + 8.0 * EPS * (k as f64 + 1.0))));
    Ok(upper + lower)
}

/// Picks an `F`-part term count making the derivative tail negligible.
pub fn deriv_plan(w: &HPoint, k: u32) -> SPlan {
    let t = w.t();
    let mut n = 1usize;
    loop {
        let ratio = pow2(k as i32) * (-(TAU * pow2(n as i32) * t)).exp();
        let first = TAU.powi(k as i32) * pow2((k as usize * n) as i32) * (-(TAU * pow2(n as i32) * t)).exp();
        if (ratio < 0.5 && first < TAIL_TARGET) || n > 200 {
            break;
        }
        n += 1;
    }
    SPlan {
        upper: n,
        gh: 64,
    }
}

#[allow(non_snake_case)]
pub fn eval_S_deriv(w: &HPoint, k: u32, plan: &SPlan) -> Result<Ball> {
    eval_S_deriv_ball(w.ball(), k, plan)
}

// ---------------------------------------------------------------------------
// functional equations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionalEquation {
    /// `F(w+1) - F(w)`
    FShift,
    /// `F(w) - e(w) - F(2w)`
    FDouble,
    /// `S_1(2w) - S_1(w) + 1`
    S1Double,
    /// `S_1(w + m 2^s) - S_1(w) - Delta_{m,s}(w) - c_m`
    S1Translate { m: i64, s: u32 },
}

/// `Delta_{m,s}(w) = sum_{l>=1} (e(w/2^(l+s)) - 1)(e(m/2^l) - 1)`.
pub fn delta_ms(w: Ball, m: i64, s: u32, terms: usize) -> Result<Ball> {
    let mut sum = Ball::ZERO;
    for l in 1..=terms {
        let a = w.ldexp(-((l as u32 + s) as i32)).e_minus_one();
        let phase = RationalAngle::new(BigInt::from(m), BigInt::one() << l)?.e() - Complex64::new(1.0, 0.0);
        sum = sum + a * phase;
    }
    Ok(sum.inflate(gh_tail(w.abs_upper(), terms + s as usize)))
}

pub fn residual_functional_equation(id: FunctionalEquation, w: &HPoint, plan: &SPlan) -> Result<Ball> {
    let wb = w.ball();
    let one = Complex64::new(1.0, 0.0);
    match id {
        FunctionalEquation::FShift => {
            Ok(eval_upper_ball(wb + one, plan.upper)? - eval_upper_ball(wb, plan.upper)?)
        }
        FunctionalEquation::FDouble => {
            let f2 = eval_upper_ball(wb.ldexp(1), plan.upper)?;
            Ok(eval_upper_ball(wb, plan.upper)? - wb.e() - f2)
        }
        FunctionalEquation::S1Double => {
            let two_w = wb.ldexp(1);
            let p2 = SPlan::for_ball(&two_w)?;
            Ok(eval_S1_ball(two_w, &p2)? - eval_S1_ball(wb, plan)? + one)
        }
        FunctionalEquation::S1Translate { m, s } => {
            let shift = (m as f64) * pow2(s as i32);
            let moved = wb + Complex64::new(shift, 0.0);
            let pm = SPlan::for_ball(&moved)?;
            let lhs = eval_S1_ball(moved, &pm)?;
            let delta = delta_ms(wb, m, s, pm.gh)?;
            let cm = constants::c_m(m, constants::DEFAULT_L);
            Ok(lhs - eval_S1_ball(wb, plan)? - delta - cm)
        }
    }
}

/// Imaginary-part interval of `F(it) + H(it)`, which is real on the axis.
pub fn imaginary_axis_value(t: f64) -> Result<Ball> {
    let w = HPoint::new(Complex64::new(0.0, t))?;
    let plan = SPlan::for_point(&w);
    Ok(eval_upper_ball(w.ball(), plan.upper)? + eval_H_ball(w.ball(), plan.gh)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(re: f64, im: f64) -> HPoint {
        HPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn f_examples() {
        let v = eval_f(Complex64::new(0.0, 0.0), &TruncationPlan::f_for(0.0)).unwrap();
        assert!(v.contains(Complex64::new(0.0, 0.0)));
        let v = eval_f(Complex64::new(0.5, 0.0), &TruncationPlan::new(2, SeriesFamily::FSeries)).unwrap();
        assert_eq!(v.center(), Complex64::new(0.8125, 0.0));
        let tail = f_tail(0.5, 2).unwrap();
        assert!((tail - 0.0078125).abs() < 1e-15);
        assert!(v.radius() >= tail && v.radius() < tail * 1.0001);
        let z = Complex64::new(-0.65862675430016, 0.0);
        let v = eval_f(z, &TruncationPlan::f_for(0.66)).unwrap();
        assert!(v.abs_upper() < 1e-12);
        assert!(eval_f(Complex64::new(1.0, 0.0), &TruncationPlan::new(5, SeriesFamily::FSeries)).is_err());
    }

    /// Tail formula against brute-force partial sums out to many more terms.
    #[test]
    fn f_tail_dominates_brute_force() {
        for &r in &[0.3f64, 0.6, 0.9, 0.97] {
            for top in 0..6usize {
                let mut brute = 0.0;
                let mut p = r.powf(pow2(top as i32 + 1));
                for _ in 0..30 {
                    brute += p;
                    p *= p;
                }
                assert!(brute <= f_tail(r, top).unwrap());
            }
        }
    }

    #[test]
    fn upper_at_i() {
        let w = h(0.0, 1.0);
        let v = eval_F(&w, &TruncationPlan::upper_for(1.0)).unwrap();
        // sum exp(-2 pi 2^n), high-precision oracle
        assert!(v.contains(Complex64::new(0.001870930086225754519479, 0.0)));
        assert!(v.radius() < 2e-17);
        assert!(eval_F(&w, &TruncationPlan::new(0, SeriesFamily::FUpper)).is_err());
        assert!(HPoint::new(Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn microscope_matches_direct() {
        let theta = RationalAngle::new(1, 9).unwrap();
        let m = MicroscopePoint::new(theta, 6, Ball::I).unwrap();
        let plan = TruncationPlan::micro_for(6, 1.0);
        let micro = eval_F_micro(&m, &plan).unwrap();
        let w = h(1.0 / 9.0, 1.0 / 64.0);
        let direct = eval_F(&w, &TruncationPlan::upper_for(1.0 / 64.0)).unwrap();
        assert!(micro.overlaps(&direct));
        assert!(micro.radius() < 1e-13);
        let short = TruncationPlan::new(6, SeriesFamily::FUpper);
        assert!(matches!(eval_F_micro(&m, &short), Err(Error::PlanTooShort { .. })));
    }

    #[test]
    fn h_and_g_examples() {
        let zero = eval_H(Complex64::new(0.0, 0.0), &TruncationPlan::gh_for(0.0)).unwrap();
        assert!(zero.contains(Complex64::new(0.0, 0.0)));
        let g1 = eval_G(Complex64::new(1.0, 0.0), &TruncationPlan::gh_for(1.0)).unwrap();
        let cm1 = constants::c_m(-1, constants::DEFAULT_L);
        assert!(g1.overlaps(&(-cm1)));
        let h3 = eval_H(Complex64::new(3.0, 0.0), &TruncationPlan::gh_for(3.0)).unwrap();
        assert!(h3.overlaps(&constants::c_m(3, constants::DEFAULT_L)));
    }

    #[test]
    fn s1_routes_agree_and_real_axis() {
        let w = h(0.3, 0.7);
        let plan = SPlan::for_point(&w);
        let a = eval_S1(&w, &plan).unwrap();
        let b = eval_S1_via_shift(&w, &SPlan::for_ball(&(w.ball() + Complex64::new(1.0, 0.0))).unwrap()).unwrap();
        assert!(a.overlaps(&b));
        let v = imaginary_axis_value(0.5).unwrap();
        let (lo, hi) = v.im_bounds();
        assert!(lo <= 0.0 && hi >= 0.0);
        assert!(v.radius() < 1e-10);
    }

    #[test]
    fn appendix_point_is_nearly_a_zero() {
        let w0 = h(-0.177323882, 0.144626388);
        let s = eval_S(&w0, &SPlan::for_point(&w0)).unwrap();
        assert!(s.abs_upper() < 1e-2);
        // high-precision oracle: |S(w0)| = 1.804e-9
        assert!(s.abs_upper() < 2e-9 && s.abs_lower() > 1.6e-9);
    }

    #[test]
    fn derivative_examples() {
        let w = h(0.0, 1.0);
        let d2 = eval_S_deriv(&w, 2, &deriv_plan(&w, 2)).unwrap();
        let e = std::f64::consts::E;
        assert!(d2.abs_upper() < 8.0 * e * e * 2.0 + 27.0);
        assert!(eval_S_deriv(&w, 0, &deriv_plan(&w, 1)).is_err());

        let w0 = h(-0.177323882, 0.144626388);
        let d1 = eval_S_deriv(&w0, 1, &deriv_plan(&w0, 1)).unwrap();
        // high-precision central difference oracle: 4.196839632762 - 1.232529242196i
        assert!(d1.abs_lower() > 4.0);
        assert!((d1.center() - Complex64::new(4.196839632762, -1.232529242196)).norm() < 1e-9);

        // chain rule: d/dw S1(2w) = 2 S1'(2w), S1' = S'(w+1)
        let hstep = 1e-5;
        let val = |x: Complex64| {
            let p = HPoint::new(x).unwrap();
            eval_S1(&p, &SPlan::for_point(&p)).unwrap().center()
        };
        let fd = (val(Complex64::new(0.0, 2.0 + 2.0 * hstep)) - val(Complex64::new(0.0, 2.0 - 2.0 * hstep)))
            / Complex64::new(0.0, 2.0 * hstep);
        let shifted = h(1.0, 2.0);
        let exact = eval_S_deriv(&shifted, 1, &deriv_plan(&shifted, 1)).unwrap().center() * 2.0;
        assert!((fd - exact).norm() < 1e-6);
    }

    #[test]
    fn residual_examples() {
        let plan = |w: &HPoint| SPlan::for_point(w);
        let w = h(0.2, 0.9);
        assert!(residual_functional_equation(FunctionalEquation::FDouble, &w, &plan(&w))
            .unwrap()
            .contains_zero());
        let i = h(0.0, 1.0);
        assert!(residual_functional_equation(FunctionalEquation::FShift, &i, &plan(&i))
            .unwrap()
            .contains_zero());
        assert!(residual_functional_equation(FunctionalEquation::S1Double, &i, &plan(&i))
            .unwrap()
            .contains_zero());
        let r = residual_functional_equation(FunctionalEquation::S1Translate { m: 1, s: 10 }, &i, &plan(&i)).unwrap();
        assert!(r.contains_zero());
        let d = delta_ms(i.ball(), 1, 10, 64).unwrap();
        // |Delta_{1,10}(i)| <= C 2^-10 with C = 2 * 2 pi |w| e^{pi|w|/1024} sum_l 2^-l
        assert!(d.abs_upper() <= 4.0 * std::f64::consts::PI * 1.01 * pow2(-10));
    }
}
