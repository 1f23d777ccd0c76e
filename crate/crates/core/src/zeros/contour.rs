//! Closed contours and certified winding numbers.
//!
//! The contour is split into pieces; each piece is covered by a ball, and the
//! image of that ball under the target must miss 0 and lie in a cone of
//! half-angle at most `pi/4`. The argument then changes by less than `pi/2`
//! along the piece and its increment is read off the endpoint values.
//! Neighbouring pieces share endpoint values, so the increments telescope to
//! an exact multiple of `2 pi` up to rounding.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::target::Target;
use crate::error::{Error, Result};
use crate::rigor::{up, Ball, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    /// Axis-parallel rectangle, traversed counter-clockwise from `(x0, y0)`.
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Result<Contour> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("circle radius {radius}")));
        }
        Ok(Contour::Circle { center, radius })
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Contour> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::InvalidArgument(format!("degenerate rectangle [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Contour::Rect { x0, y0, x1, y1 })
    }

    /// Point at parameter `s` in `[0, 1]`.
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Contour::Circle { center, radius } => {
                let phi = TAU * s;
                center + Complex64::new(radius * phi.cos(), radius * phi.sin())
            }
            Contour::Rect { x0, y0, x1, y1 } => {
                let corners = [
                    Complex64::new(x0, y0),
                    Complex64::new(x1, y0),
                    Complex64::new(x1, y1),
                    Complex64::new(x0, y1),
                    Complex64::new(x0, y0),
                ];
                let t = 4.0 * s;
                let edge = (t.floor() as usize).min(3);
                let frac = t - edge as f64;
                corners[edge] + (corners[edge + 1] - corners[edge]) * frac
            }
        }
    }

    /// A ball covering the contour between `s0` and `s1` and the chord
    /// between the two computed endpoints.
    pub fn piece(&self, s0: f64, s1: f64) -> Ball {
        let p0 = self.point(s0);
        let p1 = self.point(s1);
        let (center, reach) = match *self {
            Contour::Circle { radius, .. } => {
                let delta = TAU * (s1 - s0);
                (self.point(0.5 * (s0 + s1)), 2.0 * radius * (0.25 * delta).sin())
            }
            Contour::Rect { .. } => ((p0 + p1) * 0.5, 0.5 * (p1 - p0).norm()),
        };
        // slack for the rounding in the computed points
        let scale = center.norm() + (p1 - p0).norm() + self.size();
        let r = reach.max((p0 - center).norm()).max((p1 - center).norm());
        Ball::with_radius(center, up(r * (1.0 + 1e-12) + 16.0 * EPS * scale))
    }

    fn size(&self) -> f64 {
        match *self {
            Contour::Circle { radius, .. } => radius,
            Contour::Rect { x0, y0, x1, y1 } => (x1 - x0).max(y1 - y0),
        }
    }

    /// Smallest ball containing the whole contour and its interior.
    pub fn hull(&self) -> Ball {
        match *self {
            Contour::Circle { center, radius } => {
                Ball::with_radius(center, up(radius * (1.0 + 4.0 * EPS) + 4.0 * EPS * center.norm()))
            }
            Contour::Rect { x0, y0, x1, y1 } => {
                let c = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
                let r = 0.5 * (x1 - x0).hypot(y1 - y0);
                Ball::with_radius(c, up(r * (1.0 + 4.0 * EPS) + 4.0 * EPS * c.norm()))
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Contour::Circle { center, radius } => (z - center).norm() < radius,
            Contour::Rect { x0, y0, x1, y1 } => z.re > x0 && z.re < x1 && z.im > y0 && z.im < y1,
        }
    }
}

/// How pieces are accepted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindingMode {
    /// Use the full enclosure (partial sum plus tail).
    Full,
    /// Use the partial sum only, and demand `|partial| > bound` on every piece.
    Rouche { bound: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingOptions {
    /// Initial number of pieces; rounded up to a multiple of 4.
    pub initial: usize,
    pub max_depth: u32,
    pub max_pieces: usize,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            initial: 64,
            max_depth: 48,
            max_pieces: 4_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub winding: i64,
    /// Certified lower bound of `|target|` (or of the partial sum) on the contour.
    pub floor: f64,
    pub pieces: usize,
}

/// Certified winding number of `target` along `contour`.
pub fn winding_number<T: Target + ?Sized>(
    target: &T,
    contour: &Contour,
    mode: WindingMode,
    opts: &WindingOptions,
) -> Result<WindingReport> {
    let eval = |b: Ball| -> Result<Ball> {
        match mode {
            WindingMode::Full => target.enclose(b),
            WindingMode::Rouche { .. } => target.partial(b),
        }
    };
    let bound = match mode {
        WindingMode::Full => 0.0,
        WindingMode::Rouche { bound } => bound,
    };
    let n0 = opts.initial.max(4).div_ceil(4) * 4;
    let value_at = |s: f64| -> Result<Ball> {
        let b = eval(Ball::exact(contour.point(s)))?;
        if b.is_bounded() {
            Ok(b)
        } else {
            Err(Error::ContourTooClose {
                near: contour.point(s),
                length: 0.0,
            })
        }
    };

    let mut total = 0.0;
    let mut floor = f64::INFINITY;
    let mut pieces = 0usize;
    let mut work = 0usize;
    for k in 0..n0 {
        let (s0, s1) = (k as f64 / n0 as f64, (k + 1) as f64 / n0 as f64);
        let v_start = value_at(s0)?;
        let v_end = if k + 1 == n0 { value_at(0.0)? } else { value_at(s1)? };
        // depth-first, left to right; each entry carries its endpoint values
        let mut stack = vec![(s0, s1, v_start, v_end, 0u32)];
        while let Some((a, b, va, vb, depth)) = stack.pop() {
            work += 1;
            if work > opts.max_pieces {
                return Err(Error::ContourTooClose {
                    near: contour.point(a),
                    length: 0.0,
                });
            }
            let piece = contour.piece(a, b);
            let accepted = match eval(piece) {
                Ok(img) => {
                    // the increment is taken between endpoint centers, which must lie in the sector
                    let hull = if img.contains(va.center()) && img.contains(vb.center()) {
                        img
                    } else {
                        img.union(&va).union(&vb)
                    };
                    let lo = hull.abs_lower();
                    let ok = hull.is_bounded()
                        && lo > bound
                        && lo > 0.0
                        && hull.radius() <= FRAC_1_SQRT_2 * hull.center().norm();
                    ok.then_some(lo)
                }
                Err(Error::Domain(_)) => None,
                Err(Error::PlanTooShort { .. }) => None,
                Err(e) => return Err(e),
            };
            match accepted {
                Some(lo) => {
                    floor = floor.min(lo);
                    total += (vb.center() * va.center().conj()).arg();
                    pieces += 1;
                }
                None => {
                    if depth >= opts.max_depth {
                        let near = contour.point(0.5 * (a + b));
                        let length = (contour.point(b) - contour.point(a)).norm();
                        return Err(Error::ContourTooClose { near, length });
                    }
                    let m = 0.5 * (a + b);
                    let vm = value_at(m)?;
                    stack.push((m, b, vm, vb, depth + 1));
                    stack.push((a, m, va, vm, depth + 1));
                }
            }
        }
    }
    let turns = total / TAU;
    let winding = turns.round();
    if (turns - winding).abs() > 0.25 {
        return Err(Error::Invariant(format!("argument increments sum to {turns} turns")));
    }
    Ok(WindingReport {
        winding: winding as i64,
        floor,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::target::{Fredholm, Identity, PartialSum, Shifted};

    #[test]
    fn identity_on_unit_circle() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let w = winding_number(&Identity, &c, WindingMode::Full, &WindingOptions::default()).unwrap();
        assert_eq!(w.winding, 1);
        // 64 chords of the unit circle: floor 1 - 2 sin(pi/128) up to slack
        assert!(w.floor > 0.95 && w.floor < 1.0);
        let off = Contour::circle(Complex64::new(3.0, 0.0), 1.0).unwrap();
        let w = winding_number(&Identity, &off, WindingMode::Full, &WindingOptions::default()).unwrap();
        assert_eq!(w.winding, 0);
    }

    #[test]
    fn rectangle_and_polynomial() {
        let r = Contour::rect(-1.0, -1.0, 1.0, 1.0).unwrap();
        let w = winding_number(&PartialSum { top: 2 }, &r, WindingMode::Full, &WindingOptions::default());
        // z + z^2 + z^4 = z(1 + z + z^3): roots 0, -0.6823, 0.3412 +- 1.1615i
        assert_eq!(w.unwrap().winding, 2);
    }

    #[test]
    fn f_small_circles() {
        let f = Fredholm { top: 8 };
        let c = Contour::circle(Complex64::new(0.0, 0.0), 0.5).unwrap();
        assert_eq!(winding_number(&f, &c, WindingMode::Full, &WindingOptions::default()).unwrap().winding, 1);
        let c = Contour::circle(Complex64::new(-0.6586, 0.0), 0.01).unwrap();
        assert_eq!(winding_number(&f, &c, WindingMode::Full, &WindingOptions::default()).unwrap().winding, 1);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let c = Contour::circle(Complex64::new(0.5, 0.0), 0.5).unwrap();
        let opts = WindingOptions {
            max_depth: 12,
            ..WindingOptions::default()
        };
        let err = winding_number(&Shifted::new(Identity, Complex64::new(0.0, 0.0)), &c, WindingMode::Full, &opts);
        assert!(matches!(err, Err(Error::ContourTooClose { .. })));
    }
}
