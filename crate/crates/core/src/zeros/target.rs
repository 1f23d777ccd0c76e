//! Functions whose zeroes we hunt: a rigorous enclosure over balls (split into
//! a partial sum and a tail bound, for Rouché) plus a cheap floating-point
//! value/derivative for Newton.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigor::Ball;
use crate::series::{self, MicroSeries, SPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionKind {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "S")]
    S,
    #[serde(rename = "f-v")]
    FMinusV,
    #[serde(rename = "S-v")]
    SMinusV,
}

impl FunctionKind {
    pub(crate) fn minus_value(self) -> FunctionKind {
        match self {
            FunctionKind::F => FunctionKind::FMinusV,
            FunctionKind::S => FunctionKind::SMinusV,
            other => other,
        }
    }
}

pub trait Target: Sync {
    /// Enclosure of the computable part over the ball `z`.
    fn partial(&self, z: Ball) -> Result<Ball>;

    /// Bound on `|target - partial|` over the ball `z`.
    fn tail(&self, _z: &Ball) -> Result<f64> {
        Ok(0.0)
    }

    fn enclose(&self, z: Ball) -> Result<Ball> {
        let tail = self.tail(&z)?;
        Ok(self.partial(z)?.inflate(tail))
    }

    /// Value and derivative in floating point; not rigorous.
    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)>;

    /// Whether `z` lies in the domain of the target.
    fn admits(&self, _z: Complex64) -> bool {
        true
    }

    /// Longest Newton step that keeps well inside the domain.
    fn step_cap(&self, _z: Complex64) -> f64 {
        f64::INFINITY
    }

    fn kind(&self) -> FunctionKind;

    /// Truncation length used by the partial part (0 when exact).
    fn terms(&self) -> usize {
        0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Identity;

impl Target for Identity {
    fn partial(&self, z: Ball) -> Result<Ball> {
        Ok(z)
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((z, Complex64::new(1.0, 0.0)))
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::Identity
    }
}

/// The polynomial `sum_{n=0}^{top} z^(2^n)`, exactly.
#[derive(Clone, Copy, Debug)]
pub struct PartialSum {
    pub top: usize,
}

impl Target for PartialSum {
    fn partial(&self, z: Ball) -> Result<Ball> {
        Ok(series::f_partial_ball(z, self.top))
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok(series::f_partial_point(z, self.top))
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::F
    }

    fn terms(&self) -> usize {
        self.top
    }
}

/// `f` on the open disk: the partial sum up to `z^(2^top)` plus its tail.
#[derive(Clone, Copy, Debug)]
pub struct Fredholm {
    pub top: usize,
}

impl Target for Fredholm {
    fn partial(&self, z: Ball) -> Result<Ball> {
        if !(z.abs_upper() < 1.0) {
            return Err(Error::Domain(format!("{z} reaches the unit circle")));
        }
        Ok(series::f_partial_ball(z, self.top))
    }

    fn tail(&self, z: &Ball) -> Result<f64> {
        let r = z.abs_upper();
        series::f_tail(r, self.top).ok_or_else(|| Error::Domain(format!("|z| <= {r} reaches the unit circle")))
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok(series::f_partial_point(z, self.top))
    }

    fn admits(&self, z: Complex64) -> bool {
        z.norm() < 1.0
    }

    fn step_cap(&self, z: Complex64) -> f64 {
        0.5 * (1.0 - z.norm())
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::F
    }

    fn terms(&self) -> usize {
        self.top
    }
}

/// `S = F + G` on the upper half-plane, tails folded into the enclosure.
#[derive(Clone, Copy, Debug)]
pub struct SFunction;

impl Target for SFunction {
    fn partial(&self, w: Ball) -> Result<Ball> {
        let plan = SPlan::for_ball(&w)?;
        series::eval_S_ball(w, &plan)
    }

    fn point(&self, w: Complex64) -> Result<(Complex64, Complex64)> {
        if !(w.im > 0.0) {
            return Err(Error::Domain(format!("{w} is not in the upper half-plane")));
        }
        Ok(series::s_value_and_derivative(w))
    }

    fn admits(&self, w: Complex64) -> bool {
        w.im > 0.0
    }

    fn step_cap(&self, w: Complex64) -> f64 {
        0.5 * w.im
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::S
    }
}

/// `F(theta + u 2^-scale)` in the offset coordinate `u`.
#[derive(Clone, Debug)]
pub struct MicroF {
    pub series: MicroSeries,
}

impl Target for MicroF {
    fn partial(&self, u: Ball) -> Result<Ball> {
        if !(u.im_bounds().0 > 0.0) {
            return Err(Error::Domain(format!("offset {u} reaches Im <= 0")));
        }
        Ok(self.series.partial_ball(u))
    }

    fn tail(&self, u: &Ball) -> Result<f64> {
        let t = u.im_bounds().0;
        let tail = self.series.tail(t);
        if tail.is_finite() {
            Ok(tail)
        } else if t > 0.0 {
            Err(Error::PlanTooShort {
                needed: self.series.needed_terms(t),
                got: self.series.terms(),
            })
        } else {
            Err(Error::Domain(format!("offset {u} reaches Im <= 0")))
        }
    }

    fn point(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        Ok(self.series.value_and_derivative(u))
    }

    fn admits(&self, u: Complex64) -> bool {
        u.im > 0.0
    }

    fn step_cap(&self, u: Complex64) -> f64 {
        0.5 * u.im
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::F
    }

    fn terms(&self) -> usize {
        self.series.terms()
    }
}

/// `inner - v`.
#[derive(Clone, Debug)]
pub struct Shifted<T> {
    pub inner: T,
    pub v: Complex64,
}

impl<T: Target> Shifted<T> {
    pub fn new(inner: T, v: Complex64) -> Self {
        Shifted { inner, v }
    }
}

impl<T: Target> Target for Shifted<T> {
    fn partial(&self, z: Ball) -> Result<Ball> {
        Ok(self.inner.partial(z)? - self.v)
    }

    fn tail(&self, z: &Ball) -> Result<f64> {
        self.inner.tail(z)
    }

    fn point(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (val, der) = self.inner.point(z)?;
        Ok((val - self.v, der))
    }

    fn admits(&self, z: Complex64) -> bool {
        self.inner.admits(z)
    }

    fn step_cap(&self, z: Complex64) -> f64 {
        self.inner.step_cap(z)
    }

    fn kind(&self) -> FunctionKind {
        if self.v == Complex64::new(0.0, 0.0) {
            self.inner.kind()
        } else {
            self.inner.kind().minus_value()
        }
    }

    fn terms(&self) -> usize {
        self.inner.terms()
    }
}
