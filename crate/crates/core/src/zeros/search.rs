//! Zero search by subdivision: cells whose enclosure misses 0 are discarded,
//! the survivors are clustered, and each cluster gets a Newton point and a
//! certified winding number on a circle around it.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certify::{certify_rouche_f, RoucheOutcome, ZeroCertificate};
use super::contour::{winding_number, Contour, WindingMode, WindingOptions};
use super::target::{Fredholm, Target};
use crate::error::{Error, Result};
use crate::rigor::{up, Ball, EPS};

pub const DEFAULT_MIN_CELL: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEDUP_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 50;
/// Suspect cells beyond this count are reported unresolved instead of refined.
const SUSPECT_BUDGET: usize = 400_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Disk { cx: f64, cy: f64, r: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Region {
    pub fn disk(center: Complex64, r: f64) -> Region {
        Region::Disk {
            cx: center.re,
            cy: center.im,
            r,
        }
    }

    pub fn is_empty(&self) -> bool {
        match *self {
            Region::Disk { r, .. } => !(r > 0.0),
            Region::Rect { x0, y0, x1, y1 } => !(x1 > x0 && y1 > y0),
        }
    }

    pub fn bbox(&self) -> Cell {
        match *self {
            Region::Disk { cx, cy, r } => Cell {
                x0: cx - r,
                y0: cy - r,
                x1: cx + r,
                y1: cy + r,
            },
            Region::Rect { x0, y0, x1, y1 } => Cell { x0, y0, x1, y1 },
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Disk { cx, cy, r } => (z - Complex64::new(cx, cy)).norm() <= r,
            Region::Rect { x0, y0, x1, y1 } => z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1,
        }
    }

    pub fn meets(&self, cell: &Cell) -> bool {
        match *self {
            Region::Disk { cx, cy, r } => {
                let nearest = Complex64::new(cx.clamp(cell.x0, cell.x1), cy.clamp(cell.y0, cell.y1));
                (nearest - Complex64::new(cx, cy)).norm() <= r
            }
            Region::Rect { x0, y0, x1, y1 } => cell.x0 <= x1 && cell.x1 >= x0 && cell.y0 <= y1 && cell.y1 >= y0,
        }
    }

    pub fn boundary(&self) -> Result<Contour> {
        match *self {
            Region::Disk { cx, cy, r } => Contour::circle(Complex64::new(cx, cy), r),
            Region::Rect { x0, y0, x1, y1 } => Contour::rect(x0, y0, x1, y1),
        }
    }

    /// Closed under complex conjugation.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            Region::Disk { cy, .. } => cy == 0.0,
            Region::Rect { y0, y1, .. } => y0 == -y1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Circumscribed ball.
    pub fn ball(&self) -> Ball {
        let c = self.center();
        let r = 0.5 * self.width().hypot(self.height());
        Ball::with_radius(c, up(r * (1.0 + 4.0 * EPS) + 4.0 * EPS * c.norm()))
    }

    /// Halves along the longer side.
    pub fn split(&self) -> [Cell; 2] {
        if self.width() >= self.height() {
            let m = 0.5 * (self.x0 + self.x1);
            [Cell { x1: m, ..*self }, Cell { x0: m, ..*self }]
        } else {
            let m = 0.5 * (self.y0 + self.y1);
            [Cell { y1: m, ..*self }, Cell { y0: m, ..*self }]
        }
    }

    fn touches(&self, other: &Cell, slack: f64) -> bool {
        self.x0 <= other.x1 + slack && other.x0 <= self.x1 + slack && self.y0 <= other.y1 + slack && other.y0 <= self.y1 + slack
    }
}

/// A disk with a certified winding number of the target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub center: Complex64,
    pub radius: f64,
    pub winding: i64,
    /// Newton point inside the disk, when Newton converged there.
    pub newton: Option<Complex64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub candidates: Vec<Candidate>,
    pub unresolved: Vec<Cell>,
}

/// Newton iteration from `guess`, steps capped by the target's domain; stops
/// when `|step| < tol` or after 50 steps.
pub fn newton_refine<T: Target + ?Sized>(target: &T, guess: Complex64, tol: f64) -> Result<Complex64> {
    let mut z = guess;
    for _ in 0..NEWTON_MAX_ITER {
        if !target.admits(z) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NewtonFailed {
                last: z,
                reason: "left the domain".into(),
            });
        }
        let (val, der) = target.point(z)?;
        if der.norm() == 0.0 || !der.re.is_finite() || !der.im.is_finite() {
            return Err(Error::NewtonFailed {
                last: z,
                reason: "derivative vanished".into(),
            });
        }
        let mut step = val / der;
        let cap = target.step_cap(z);
        let capped = step.norm() > cap;
        if capped {
            step *= cap / step.norm();
        }
        z -= step;
        if !capped && step.norm() < tol.max(4.0 * EPS * z.norm()) {
            return if target.admits(z) {
                Ok(z)
            } else {
                Err(Error::NewtonFailed {
                    last: z,
                    reason: "converged outside the domain".into(),
                })
            };
        }
    }
    Err(Error::NewtonFailed {
        last: z,
        reason: format!("no convergence in {NEWTON_MAX_ITER} steps"),
    })
}

fn excluded<T: Target + ?Sized>(target: &T, region: &Region, cell: &Cell) -> bool {
    if !region.meets(cell) {
        return true;
    }
    match target.enclose(cell.ball()) {
        Ok(b) => b.is_bounded() && !b.contains_zero(),
        Err(_) => false,
    }
}

/// Groups cells that touch, by bucketing on a grid of the largest cell size.
fn clusters(cells: &[Cell]) -> Vec<Vec<usize>> {
    let h = cells.iter().map(|c| c.width().max(c.height())).fold(0.0, f64::max);
    if cells.is_empty() || !(h > 0.0) {
        return Vec::new();
    }
    let key = |x: f64, y: f64| ((x / h).floor() as i64, (y / h).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let z = c.center();
        buckets.entry(key(z.re, z.im)).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let slack = h * 1e-9;
    for (i, c) in cells.iter().enumerate() {
        let z = c.center();
        let (kx, ky) = key(z.re, z.im);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        if j > i && c.touches(&cells[j], slack) {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for i in 0..cells.len() {
        let r = find(&mut parent, i);
        let g = *index.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn bounding(cells: &[Cell], members: &[usize]) -> Cell {
    let mut b = cells[members[0]];
    for &i in members {
        let c = &cells[i];
        b.x0 = b.x0.min(c.x0);
        b.y0 = b.y0.min(c.y0);
        b.x1 = b.x1.max(c.x1);
        b.y1 = b.y1.max(c.y1);
    }
    b
}

/// Certified winding on a circle around `bbox`, growing the circle when
/// it passes too close to a zero.
fn enclose_cluster<T: Target + ?Sized>(target: &T, bbox: &Cell, min_cell: f64) -> Option<Candidate> {
    let mid = bbox.center();
    let newton = newton_refine(target, mid, DEFAULT_TOL).ok().filter(|z| {
        let slack = bbox.width().max(bbox.height());
        z.re >= bbox.x0 - slack && z.re <= bbox.x1 + slack && z.im >= bbox.y0 - slack && z.im <= bbox.y1 + slack
    });
    let center = newton.unwrap_or(mid);
    let corners = [
        Complex64::new(bbox.x0, bbox.y0),
        Complex64::new(bbox.x1, bbox.y0),
        Complex64::new(bbox.x0, bbox.y1),
        Complex64::new(bbox.x1, bbox.y1),
    ];
    let mut radius = corners.iter().map(|c| (c - center).norm()).fold(0.0, f64::max) + 0.5 * min_cell;
    let opts = WindingOptions::default();
    for _ in 0..5 {
        let contour = Contour::circle(center, radius).ok()?;
        match winding_number(target, &contour, WindingMode::Full, &opts) {
            Ok(rep) => {
                return Some(Candidate {
                    center,
                    radius,
                    winding: rep.winding,
                    newton: newton.filter(|z| (z - center).norm() < radius),
                })
            }
            Err(_) => radius *= 1.5,
        }
    }
    None
}

/// Candidate disks covering every zero of `target` in `region`.
pub fn subdivide_search<T: Target + ?Sized>(target: &T, region: &Region, min_cell: f64) -> Result<SearchResult> {
    search_inner(target, region, min_cell, 0)
}

fn search_inner<T: Target + ?Sized>(target: &T, region: &Region, min_cell: f64, depth: u32) -> Result<SearchResult> {
    if !(min_cell > 0.0) {
        return Err(Error::InvalidArgument(format!("min_cell {min_cell}")));
    }
    if region.is_empty() {
        return Ok(SearchResult::default());
    }
    let mut level = vec![region.bbox()];
    let mut suspects = Vec::new();
    let mut unresolved = Vec::new();
    while !level.is_empty() {
        let keep: Vec<bool> = level.par_iter().map(|c| !excluded(target, region, c)).collect();
        let mut next = Vec::new();
        for (cell, keep) in level.iter().zip(keep) {
            if !keep {
                continue;
            }
            if cell.width().max(cell.height()) <= min_cell {
                suspects.push(*cell);
            } else {
                next.extend(cell.split());
            }
        }
        if suspects.len() + next.len() > SUSPECT_BUDGET {
            unresolved.extend(next);
            break;
        }
        level = next;
    }

    let groups = clusters(&suspects);
    let mut candidates: Vec<Candidate> = Vec::new();
    for members in &groups {
        let bbox = bounding(&suspects, members);
        match enclose_cluster(target, &bbox, min_cell) {
            Some(c) if c.winding == 0 => {}
            Some(c) if c.winding >= 2 && depth < 2 => {
                let sub = Region::disk(c.center, c.radius);
                let inner = search_inner(target, &sub, min_cell / 16.0, depth + 1)?;
                let total: i64 = inner.candidates.iter().map(|k| k.winding).sum();
                if total == c.winding && inner.unresolved.is_empty() {
                    candidates.extend(inner.candidates);
                } else {
                    candidates.push(c);
                }
            }
            Some(c) => candidates.push(c),
            None => unresolved.push(bbox),
        }
    }
    let candidates = merge_overlapping(target, candidates, &mut unresolved);
    Ok(SearchResult {
        candidates,
        unresolved,
    })
}

/// Replaces overlapping disks by one enclosing disk with a fresh winding.
fn merge_overlapping<T: Target + ?Sized>(target: &T, mut cands: Vec<Candidate>, unresolved: &mut Vec<Cell>) -> Vec<Candidate> {
    loop {
        let mut pair = None;
        'outer: for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                if (cands[i].center - cands[j].center).norm() < cands[i].radius + cands[j].radius {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else { break };
        let (a, b) = (cands[i], cands[j]);
        cands.swap_remove(j);
        cands.swap_remove(i);
        let d = (b.center - a.center).norm();
        let (center, radius) = if d + b.radius <= a.radius {
            (a.center, a.radius)
        } else if d + a.radius <= b.radius {
            (b.center, b.radius)
        } else {
            let r = 0.5 * (d + a.radius + b.radius);
            let dir = (b.center - a.center) / d;
            (a.center + dir * (r - a.radius), r)
        };
        let bbox = Cell {
            x0: center.re - radius,
            y0: center.im - radius,
            x1: center.re + radius,
            y1: center.im + radius,
        };
        match enclose_cluster(target, &bbox, 0.0) {
            Some(c) if c.winding > 0 => cands.push(c),
            Some(_) => {}
            None => unresolved.push(bbox),
        }
    }
    cands.sort_by(|x, y| sort_key(x.center).partial_cmp(&sort_key(y.center)).unwrap());
    cands
}

/// `(round(Re * 1e9), Im)`: real parts equal to 1e-9 sort by imaginary part,
/// so conjugate pairs end up adjacent.
pub fn sort_key(z: Complex64) -> (f64, f64) {
    ((z.re * 1e9).round(), z.im)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTable {
    pub n_terms: usize,
    pub region: Region,
    pub zeros: Vec<ZeroCertificate>,
    pub unresolved: Vec<Cell>,
    /// Winding of `f` along the region boundary, when it could be certified.
    pub boundary_winding: Option<i64>,
}

impl ZeroTable {
    /// Every zero in the region is accounted for by a certificate.
    pub fn is_complete(&self) -> bool {
        let counted: i64 = self.zeros.iter().map(|z| z.winding).sum();
        self.unresolved.is_empty() && self.boundary_winding == Some(counted)
    }
}

/// Certified zeroes of `f` in `region`, with the partial sum up to `z^(2^n_terms)`.
pub fn zero_table(n_terms: usize, region: &Region, tol: f64) -> Result<ZeroTable> {
    if region.is_empty() {
        return Ok(ZeroTable {
            n_terms,
            region: *region,
            zeros: Vec::new(),
            unresolved: Vec::new(),
            boundary_winding: Some(0),
        });
    }
    let reach = region_reach(region);
    if !(reach < 1.0) {
        return Err(Error::Domain(format!("region {region:?} reaches |z| = {reach}, outside the unit disk")));
    }
    let f = Fredholm { top: n_terms };
    let search = subdivide_search(&f, region, DEFAULT_MIN_CELL)?;
    let mut zeros: Vec<ZeroCertificate> = Vec::new();
    let mut unresolved = search.unresolved.clone();
    for cand in &search.candidates {
        match certify_candidate(cand, n_terms, tol) {
            Some(cert) => {
                if region.contains(cert.center()) {
                    zeros.push(cert);
                }
            }
            None => unresolved.push(Cell {
                x0: cand.center.re - cand.radius,
                y0: cand.center.im - cand.radius,
                x1: cand.center.re + cand.radius,
                y1: cand.center.im + cand.radius,
            }),
        }
    }
    zeros.sort_by(|a, b| sort_key(a.center()).partial_cmp(&sort_key(b.center())).unwrap());
    zeros.dedup_by(|a, b| (a.center() - b.center()).norm() < DEDUP_TOL);
    let boundary_winding = region
        .boundary()
        .and_then(|c| winding_number(&f, &c, WindingMode::Full, &WindingOptions::default()))
        .ok()
        .map(|r| r.winding);
    Ok(ZeroTable {
        n_terms,
        region: *region,
        zeros,
        unresolved,
        boundary_winding,
    })
}

fn region_reach(region: &Region) -> f64 {
    match *region {
        Region::Disk { cx, cy, r } => Complex64::new(cx, cy).norm() + r,
        Region::Rect { x0, y0, x1, y1 } => [x0, x1]
            .iter()
            .flat_map(|&x| [y0, y1].map(|y| Complex64::new(x, y).norm()))
            .fold(0.0, f64::max),
    }
}

/// Shrinks a candidate disk to a tiny Rouché disk around its Newton point.
fn certify_candidate(cand: &Candidate, n_terms: usize, tol: f64) -> Option<ZeroCertificate> {
    let zero = Complex64::new(0.0, 0.0);
    if cand.winding == 1 {
        let f = Fredholm { top: n_terms };
        let start = cand.newton.unwrap_or(cand.center);
        if let Ok(z) = newton_refine(&f, start, tol) {
            if (z - cand.center).norm() < cand.radius {
                let r = (1e3 * tol).max(DEDUP_TOL).min(0.5 * (cand.radius - (z - cand.center).norm()));
                if r > 0.0 {
                    if let Ok(RoucheOutcome::Certified(c)) = certify_rouche_f(z, r, zero, n_terms) {
                        if c.winding == 1 {
                            return Some(c);
                        }
                    }
                }
            }
        }
    }
    match certify_rouche_f(cand.center, cand.radius, zero, n_terms) {
        Ok(RoucheOutcome::Certified(c)) => Some(c),
        _ => None,
    }
}

/// Every zero has its conjugate in the list, within `tol`.
pub fn is_conjugate_closed(zeros: &[ZeroCertificate], tol: f64) -> bool {
    zeros
        .iter()
        .all(|z| zeros.iter().any(|w| (w.center() - z.center().conj()).norm() <= tol))
}
