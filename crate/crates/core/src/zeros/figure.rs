//! Zeroes of the partial sums `P_N(z) = sum_{n=0}^{N} z^(2^n)` inside the unit
//! disk.
//!
//! The count comes from the certified winding of `P_N` on the unit circle. The
//! locations come from Aberth-Ehrlich iteration on all `2^N` roots, each
//! in-disk root then gets its own small Rouché disk; when the disjoint disks
//! add up to the winding count, the list is complete.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::certify::{certify_rouche, Frame, RoucheOutcome, ZeroCertificate};
use super::contour::{winding_number, Contour, WindingMode, WindingOptions};
use super::search::{newton_refine, sort_key};
use super::target::PartialSum;
use crate::error::{Error, Result};

const ABERTH_MAX_SWEEPS: usize = 400;
const MAX_TOP: usize = 16;

/// `P_N / P_N'` at `z`; for `|z| > 1` the reversed polynomial avoids overflow.
fn newton_ratio(z: Complex64, top: usize) -> Complex64 {
    if z.norm() <= 1.0 {
        let mut pm1 = Complex64::new(1.0, 0.0);
        let mut val = z;
        let mut der = Complex64::new(1.0, 0.0);
        let mut weight = 1.0;
        for _ in 0..top {
            pm1 = pm1 * pm1 * z;
            weight *= 2.0;
            der += pm1 * weight;
            val += pm1 * z;
        }
        return val / der;
    }
    // P(z) = z^d Q(y), P'(z) = z^(d-1) R(y) with y = 1/z, d = 2^top and
    // y^(d - 2^n) = prod_{j=n}^{top-1} y^(2^j)
    let y = z.inv();
    let mut pows = Vec::with_capacity(top + 1);
    let mut p = y;
    for _ in 0..top {
        pows.push(p);
        p = p * p;
    }
    let mut q = Complex64::new(0.0, 0.0);
    let mut r = Complex64::new(0.0, 0.0);
    let mut suffix = Complex64::new(1.0, 0.0);
    for n in (0..=top).rev() {
        // suffix = y^(d - 2^n)
        q += suffix;
        r += suffix * 2f64.powi(n as i32);
        if n > 0 {
            suffix *= pows[n - 1];
        }
    }
    z * q / r
}

fn check_top(top: usize) -> Result<()> {
    if top > MAX_TOP {
        return Err(Error::Unsupported(format!("degree 2^{top} is beyond the root scan")));
    }
    Ok(())
}

/// All `2^top` roots of `P_top`, to working precision.
pub fn partial_sum_roots(top: usize) -> Result<Vec<Complex64>> {
    check_top(top)?;
    let d = 1usize << top;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(1.0 + 0.05 / d as f64, std::f64::consts::TAU * (k as f64 + 0.25) / d as f64))
        .collect();
    let mut done = vec![false; d];
    for _ in 0..ABERTH_MAX_SWEEPS {
        let mut active = 0;
        for k in 0..d {
            if done[k] {
                continue;
            }
            active += 1;
            let zk = z[k];
            let w = newton_ratio(zk, top);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    s += (zk - zj).inv();
                }
            }
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] = zk - step;
            }
            if step.norm() <= 1e-14 * z[k].norm().max(1e-3) {
                done[k] = true;
            }
        }
        if active == 0 {
            return Ok(z);
        }
    }
    if done.iter().all(|&x| x) {
        Ok(z)
    } else {
        Err(Error::Invariant(format!(
            "root iteration left {} of {d} roots unconverged",
            done.iter().filter(|&&x| !x).count()
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureScan {
    pub top: usize,
    /// Certified winding of `P_top` on the unit circle.
    pub winding_count: i64,
    /// One certificate per in-disk zero, disks pairwise disjoint.
    pub zeros: Vec<ZeroCertificate>,
    /// Approximate in-disk roots that could not be certified.
    pub unresolved: Vec<Complex64>,
}

impl FigureScan {
    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty() && self.zeros.iter().map(|z| z.winding).sum::<i64>() == self.winding_count
    }
}

/// Count and certified locations of the zeroes of `P_top` in `|z| < 1`.
pub fn figure_scan(top: usize) -> Result<FigureScan> {
    check_top(top)?;
    let p = PartialSum { top };
    let circle = Contour::circle(Complex64::new(0.0, 0.0), 1.0)?;
    let opts = WindingOptions {
        initial: 4096,
        ..WindingOptions::default()
    };
    let winding_count = winding_number(&p, &circle, WindingMode::Full, &opts)?.winding;

    let roots: Vec<Complex64> = partial_sum_roots(top)?
        .into_iter()
        .map(|r| newton_refine(&p, r, 1e-15).unwrap_or(r))
        .filter(|r| r.norm() < 1.0)
        .collect();

    // disks of a quarter of the nearest-neighbour distance are pairwise disjoint
    let n = roots.len();
    let mut sep = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = (roots[i] - roots[j]).norm();
            sep[i] = sep[i].min(d);
            sep[j] = sep[j].min(d);
        }
    }

    let mut zeros = Vec::with_capacity(n);
    let mut unresolved = Vec::new();
    for (i, &r) in roots.iter().enumerate() {
        let room = (1.0 - r.norm()).min(sep[i]) / 4.0;
        let radius = room.min(1e-9);
        let outcome = if radius > 0.0 {
            certify_rouche(&p, r, radius, Complex64::new(0.0, 0.0), Frame::Disk)
        } else {
            Err(Error::Degenerate("root on the unit circle".into()))
        };
        match outcome {
            Ok(RoucheOutcome::Certified(c)) if c.winding == 1 => zeros.push(c),
            _ => unresolved.push(r),
        }
    }
    zeros.sort_by(|a, b| sort_key(a.center()).partial_cmp(&sort_key(b.center())).unwrap());
    Ok(FigureScan {
        top,
        winding_count,
        zeros,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degree_roots() {
        // z + z^2 + z^4 = z (1 + z + z^3)
        let roots = partial_sum_roots(2).unwrap();
        assert_eq!(roots.len(), 4);
        let real = roots.iter().filter(|r| r.im.abs() < 1e-12).count();
        assert_eq!(real, 2);
        assert!(roots.iter().any(|r| (r - Complex64::new(-0.6823278038280193, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn ratio_branches_agree() {
        let z = Complex64::from_polar(1.0, 0.3);
        let top = 6;
        let inner = newton_ratio(z * (1.0 - 1e-12), top);
        let outer = newton_ratio(z * (1.0 + 1e-12), top);
        assert!((inner - outer).norm() < 1e-9);
    }

    #[test]
    fn scan_degree_64() {
        let scan = figure_scan(6).unwrap();
        assert!(scan.is_complete());
        assert_eq!(scan.zeros.len() as i64, scan.winding_count);
    }
}
