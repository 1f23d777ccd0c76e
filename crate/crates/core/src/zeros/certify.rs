//! Zero certificates: Rouché against a partial sum with a tail bound, and the
//! Taylor lower bound for `S` on a small circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::contour::{winding_number, Contour, WindingMode, WindingOptions};
use super::target::{Fredholm, FunctionKind, MicroF, Target};
use crate::error::{Error, Result};
use crate::rigor::{up, Ball, EPS};
use crate::series::{self, HPoint, MicroSeries, SPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rouche-partial-sum")]
    RouchePartialSum,
    #[serde(rename = "taylor-appendix")]
    TaylorAppendix,
    #[serde(rename = "argument-principle")]
    ArgumentPrinciple,
}

/// Coordinates of the certificate's center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `z` in the unit disk.
    Disk,
    /// `w` in the upper half-plane.
    HalfPlane,
    /// Offset `u` of a microscope point.
    Microscope,
}

/// A disk holding exactly `winding` zeroes of `function - target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
    pub winding: i64,
    pub contour_floor: f64,
    pub tail_bound: f64,
    pub method: Method,
    pub function: FunctionKind,
    pub target_re: f64,
    pub target_im: f64,
    pub n_terms: usize,
    pub frame: Frame,
}

impl ZeroCertificate {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn target(&self) -> Complex64 {
        Complex64::new(self.target_re, self.target_im)
    }

    /// Ball of points the certified zero may occupy.
    pub fn disk(&self) -> Ball {
        Ball::with_radius(self.center(), self.radius)
    }

    /// Structural soundness: positive winding, strict floor/tail gap.
    pub fn is_sound(&self) -> bool {
        self.winding >= 1 && self.radius > 0.0 && self.contour_floor > self.tail_bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RoucheOutcome {
    Certified(ZeroCertificate),
    /// The partial sum dominates the tail but winds zero times.
    NoZero { floor: f64, tail: f64 },
    NotCertified { floor: f64, tail: f64 },
}

impl RoucheOutcome {
    pub fn certificate(self) -> Result<ZeroCertificate> {
        match self {
            RoucheOutcome::Certified(c) => Ok(c),
            RoucheOutcome::NoZero { floor, tail } => Err(Error::NotCertified { floor, bound: tail }),
            RoucheOutcome::NotCertified { floor, tail } => Err(Error::NotCertified { floor, bound: tail }),
        }
    }
}

/// Rouché on the circle `|z - center| = radius`: if `|partial - v| > tail`
/// everywhere on it, `target - v` has as many zeroes inside as `partial - v`.
pub fn certify_rouche<T: Target + ?Sized>(
    target: &T,
    center: Complex64,
    radius: f64,
    v: Complex64,
    frame: Frame,
) -> Result<RoucheOutcome> {
    let contour = Contour::circle(center, radius)?;
    let tail = target.tail(&contour.hull())?;
    let shifted = ShiftedRef { inner: target, v };
    let opts = WindingOptions::default();
    let report = match winding_number(&shifted, &contour, WindingMode::Rouche { bound: tail }, &opts) {
        Ok(r) => r,
        Err(Error::ContourTooClose { near, length }) => {
            // distinguish "tail too large" from "zero on the contour"
            return match winding_number(&shifted, &contour, WindingMode::Rouche { bound: 0.0 }, &opts) {
                Ok(r) => Ok(RoucheOutcome::NotCertified { floor: r.floor, tail }),
                Err(_) => Err(Error::ContourTooClose { near, length }),
            };
        }
        Err(e) => return Err(e),
    };
    if report.winding == 0 {
        return Ok(RoucheOutcome::NoZero {
            floor: report.floor,
            tail,
        });
    }
    let kind = if v == Complex64::new(0.0, 0.0) {
        target.kind()
    } else {
        target.kind().minus_value()
    };
    Ok(RoucheOutcome::Certified(ZeroCertificate {
        re: center.re,
        im: center.im,
        radius,
        winding: report.winding,
        contour_floor: report.floor,
        tail_bound: tail,
        method: Method::RouchePartialSum,
        function: kind,
        target_re: v.re,
        target_im: v.im,
        n_terms: target.terms(),
        frame,
    }))
}

/// Rouché for `f - v` on a disk inside the unit disk, with the partial sum up
/// to `z^(2^top)`.
pub fn certify_rouche_f(center: Complex64, radius: f64, v: Complex64, top: usize) -> Result<RoucheOutcome> {
    if !(center.norm() + radius < 1.0) {
        return Err(Error::Domain(format!("disk at {center} of radius {radius} leaves the unit disk")));
    }
    certify_rouche(&Fredholm { top }, center, radius, v, Frame::Disk)
}

/// Rouché for `F - v` in microscope coordinates around the offset `u`.
pub fn certify_rouche_micro(series: &MicroSeries, u: Complex64, radius: f64, v: Complex64) -> Result<RoucheOutcome> {
    if !(u.im - radius > 0.0) {
        return Err(Error::Domain(format!("offset disk at {u} of radius {radius} leaves Im u > 0")));
    }
    let target = MicroF { series: series.clone() };
    certify_rouche(&target, u, radius, v, Frame::Microscope)
}

/// Lower bound of `|S(w) - v|` on `|w - w0| = rho`:
/// `|S'(w0)| rho - |S(w0) - v| - 4 e^2 rho^2 / (t0 (t0 - 2 e rho)) - 3 (e^(3 rho) - 1 - 3 rho)`.
/// The last two terms bound the second-order Taylor remainder of the two halves
/// of `S`; they are valid for `t0 > 2 e rho`.
#[allow(non_snake_case)]
pub fn certify_taylor_S(w0: &HPoint, rho: f64, v: Complex64) -> Result<ZeroCertificate> {
    if !(rho > 0.0) {
        return Err(Error::Degenerate(format!("radius {rho}")));
    }
    let t0 = w0.t();
    let e = std::f64::consts::E;
    let limit = 2.0 * e * rho;
    if !(t0 > limit) {
        return Err(Error::BoundInvalid { t0, limit });
    }
    let plan = SPlan::for_point(w0);
    let s = series::eval_S(w0, &plan)? - v;
    let ds = series::eval_S_deriv(w0, 1, &series::deriv_plan(w0, 1))?;
    let linear = ds.abs_lower() * rho * (1.0 - 2.0 * EPS);
    let denom = t0 * (t0 - limit) * (1.0 - 8.0 * EPS);
    let quad = up(4.0 * e * e * rho * rho / denom * (1.0 + 8.0 * EPS));
    let x = 3.0 * rho;
    // e^x - 1 - x through exp_m1 to avoid cancellation
    let cubic = up(3.0 * (x.exp_m1() - x) * (1.0 + 8.0 * EPS) + 4.0 * EPS * x * x);
    let remainder = up(s.abs_upper() + quad + cubic);
    if !(linear > remainder) {
        return Err(Error::NotCertified {
            floor: linear,
            bound: remainder,
        });
    }
    let function = if v == Complex64::new(0.0, 0.0) {
        FunctionKind::S
    } else {
        FunctionKind::SMinusV
    };
    Ok(ZeroCertificate {
        re: w0.value().re,
        im: w0.value().im,
        radius: rho,
        winding: 1,
        contour_floor: linear,
        tail_bound: remainder,
        method: Method::TaylorAppendix,
        function,
        target_re: v.re,
        target_im: v.im,
        n_terms: plan.upper,
        frame: Frame::HalfPlane,
    })
}

/// `inner - v` without taking ownership.
struct ShiftedRef<'a, T: ?Sized> {
    inner: &'a T,
    v: Complex64,
}

impl<T: Target + ?Sized> Target for ShiftedRef<'_, T> {
    fn partial(&self, z: Ball) -> Result<Ball> {
        Ok(self.inner.partial(z)? - self.v)
    }

    fn tail(&self, z: &Ball) -> Result<f64> {
        self.inner.tail(z)
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (a, b) = self.inner.point(z)?;
        Ok((a - self.v, b))
    }

    fn admits(&self, z: Complex64) -> bool {
        self.inner.admits(z)
    }

    fn step_cap(&self, z: Complex64) -> f64 {
        self.inner.step_cap(z)
    }

    fn kind(&self) -> FunctionKind {
        self.inner.kind()
    }

    fn terms(&self) -> usize {
        self.inner.terms()
    }
}
