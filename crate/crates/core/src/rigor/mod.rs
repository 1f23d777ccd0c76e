//! Self-validated complex arithmetic: balls and exact rational angles.

mod angle;
mod ball;

pub use angle::{e_ratio, RationalAngle};
pub use ball::{Ball, EPS};

pub(crate) use ball::{pow2, up};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies one of the four arithmetic operations; only division can fail.
pub fn ball_arith(op: BallOp, a: Ball, b: Ball) -> Result<Ball> {
    Ok(match op {
        BallOp::Add => a + b,
        BallOp::Sub => a - b,
        BallOp::Mul => a * b,
        BallOp::Div => a.checked_div(b)?,
    })
}

/// Enclosure of `e(z) = exp(2 pi i z)` over the ball `z`.
pub fn ball_e(z: Ball) -> Ball {
    z.e()
}

pub fn ball_e_rational(theta: &RationalAngle) -> Ball {
    theta.e()
}

pub fn ball_abs_bounds(b: &Ball) -> (f64, f64) {
    b.abs_bounds()
}
