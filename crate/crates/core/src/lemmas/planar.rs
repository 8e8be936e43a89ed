//! Planar disks: from two distinct transversals with the same order to one
//! that crosses the interior of every disk.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::golden_section;
use crate::sec::Vec2;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk2 {
    pub center: Vec2,
    pub radius: f64,
}

impl Disk2 {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(center.x.is_finite() && center.y.is_finite() && radius.is_finite()) {
            return Err(Error::NonFinite);
        }
        if radius <= 0.0 {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Disk2 { center, radius })
    }
}

/// An oriented planar line `{p : n · p = offset}` with unit direction `dir`
/// and normal `n = (-dir.y, dir.x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line2 {
    pub dir: Vec2,
    pub offset: f64,
}

impl Line2 {
    pub fn new(point: Vec2, dir: Vec2) -> Result<Self> {
        let n = dir.norm();
        if !(n.is_finite() && point.x.is_finite() && point.y.is_finite()) {
            return Err(Error::NonFinite);
        }
        if n < 1e-300 {
            return Err(Error::ZeroDirection);
        }
        let dir = dir / n;
        Ok(Line2 { dir, offset: normal(&dir).dot(&point) })
    }

    fn from_angle(theta: f64, offset: f64) -> Self {
        Line2 { dir: Vec2::new(theta.cos(), theta.sin()), offset }
    }

    pub fn normal(&self) -> Vec2 {
        normal(&self.dir)
    }

    pub fn distance_to(&self, p: &Vec2) -> f64 {
        (self.normal().dot(p) - self.offset).abs()
    }

    /// `min_i (r_i - dist(c_i, line))`; positive iff the line crosses every
    /// disk interior.
    pub fn clearance(&self, disks: &[Disk2]) -> f64 {
        disks.iter().map(|d| d.radius - self.distance_to(&d.center)).fold(f64::INFINITY, f64::min)
    }

    /// Disk indices in the order the line meets them.
    pub fn order(&self, disks: &[Disk2]) -> Result<Vec<usize>> {
        if let Some(i) = disks.iter().position(|d| self.distance_to(&d.center) > d.radius + tol::GEOM) {
            return Err(Error::NotATransversal(i.to_string()));
        }
        sorted_along(disks, &self.dir).ok_or_else(|| Error::InputInvalid("order undefined".into()))
    }

    fn same_as(&self, other: &Line2) -> bool {
        let cross = self.dir.x * other.dir.y - self.dir.y * other.dir.x;
        let s = self.dir.dot(&other.dir).signum();
        cross.abs() <= tol::UNIT && (self.offset - s * other.offset).abs() <= tol::UNIT
    }
}

fn normal(dir: &Vec2) -> Vec2 {
    Vec2::new(-dir.y, dir.x)
}

fn sorted_along(disks: &[Disk2], dir: &Vec2) -> Option<Vec<usize>> {
    let proj: Vec<f64> = disks.iter().map(|d| d.center.dot(dir)).collect();
    let mut idx: Vec<usize> = (0..disks.len()).collect();
    idx.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]));
    idx.windows(2).all(|w| proj[w[1]] - proj[w[0]] >= tol::GEOM).then_some(idx)
}

/// Half width of the band of offsets at angle `theta` that meet all disks,
/// with the band midpoint; `-inf` if the order at `theta` differs.
fn best_at(disks: &[Disk2], target: &[usize], theta: f64) -> (f64, f64) {
    let dir = Vec2::new(theta.cos(), theta.sin());
    if sorted_along(disks, &dir).as_deref() != Some(target) {
        return (f64::NEG_INFINITY, 0.0);
    }
    let n = normal(&dir);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for d in disks {
        let p = n.dot(&d.center);
        lo = lo.max(p - d.radius);
        hi = hi.min(p + d.radius);
    }
    ((hi - lo) / 2.0, (hi + lo) / 2.0)
}

fn angle(dir: &Vec2) -> f64 {
    dir.y.atan2(dir.x)
}

/// A transversal with the common order of `l1` and `l2` and positive
/// clearance to every disk.
pub fn interior_transversal_2d(disks: &[Disk2], l1: &Line2, l2: &Line2) -> Result<Line2> {
    if disks.is_empty() {
        return Err(Error::InputInvalid("no disks".into()));
    }
    if l1.same_as(l2) {
        return Err(Error::InputInvalid("the two transversals coincide".into()));
    }
    let target = l1.order(disks)?;
    let mut l2 = *l2;
    let mut o2 = l2.order(disks)?;
    if o2 != target {
        l2 = Line2 { dir: -l2.dir, offset: -l2.offset };
        o2.reverse();
    }
    if o2 != target {
        return Err(Error::InputInvalid("the transversals realize different orders".into()));
    }
    let t1 = angle(&l1.dir);
    let mut t2 = angle(&l2.dir);
    while t2 - t1 > PI {
        t2 -= 2.0 * PI;
    }
    while t1 - t2 > PI {
        t2 += 2.0 * PI;
    }
    let wide = 1440;
    let between = 1000;
    let mut cands: Vec<f64> = (0..=wide).map(|k| t1 - PI / 2.0 + PI * k as f64 / wide as f64).collect();
    cands.extend((0..=between).map(|k| t1 + (t2 - t1) * k as f64 / between as f64));
    let (mut theta, mut best) = (t1, f64::NEG_INFINITY);
    for &t in &cands {
        let c = best_at(disks, &target, t).0;
        if c > best {
            (theta, best) = (t, c);
        }
    }
    let h = (PI / wide as f64).max((t2 - t1).abs() / between as f64);
    let (t, c) = golden_section(|t| -best_at(disks, &target, t).0, theta - h, theta + h, 1e-13);
    if -c > best {
        (theta, best) = (t, -c);
    }
    if !(best > 0.0) {
        return Err(Error::InputInvalid("no transversal with positive clearance found".into()));
    }
    Ok(Line2::from_angle(theta, best_at(disks, &target, theta).1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(x: f64, y: f64) -> Disk2 {
        Disk2::new(Vec2::new(x, y), 1.0).unwrap()
    }

    fn line(px: f64, py: f64, dx: f64, dy: f64) -> Line2 {
        Line2::new(Vec2::new(px, py), Vec2::new(dx, dy)).unwrap()
    }

    fn check(disks: &[Disk2], l1: &Line2, l2: &Line2) -> Line2 {
        let l = interior_transversal_2d(disks, l1, l2).unwrap();
        assert!(l.clearance(disks) > 0.0);
        assert_eq!(l.order(disks).unwrap(), l1.order(disks).unwrap());
        l
    }

    #[test]
    fn parallel_pair() {
        let disks = [disk(0.0, 0.5), disk(3.0, -0.5)];
        let (l1, l2) = (line(0.0, -0.5, 1.0, 0.0), line(0.0, 0.5, 1.0, 0.0));
        assert!(l1.clearance(&disks).abs() < 1e-12 && l2.clearance(&disks).abs() < 1e-12);
        check(&disks, &l1, &l2);
    }

    #[test]
    fn identical_lines_rejected() {
        let disks = [disk(0.0, 0.0), disk(3.0, 0.0)];
        let l = line(0.0, 0.0, 1.0, 0.0);
        assert!(matches!(interior_transversal_2d(&disks, &l, &l), Err(Error::InputInvalid(_))));
        let rev = Line2 { dir: -l.dir, offset: -l.offset };
        assert!(matches!(interior_transversal_2d(&disks, &l, &rev), Err(Error::InputInvalid(_))));
    }

    #[test]
    fn two_tangent_lines_rotate_into_interior() {
        let disks = [disk(0.0, 1.0), disk(3.0, 0.0), disk(6.0, -1.0)];
        let l1 = line(3.0, 0.0, 1.0, 0.0);
        let l2 = line(3.0, 0.0, 0.8, -0.6);
        assert!(l1.clearance(&disks).abs() < 1e-12);
        assert!(l2.clearance(&disks).abs() < 1e-12);
        let l = check(&disks, &l1, &l2);
        assert!(l.clearance(&disks) > 0.05);
    }

    #[test]
    fn different_orders_rejected() {
        let disks = [disk(0.0, 0.0), disk(1.0, 2.0)];
        let l1 = line(0.0, 0.0, 1.0, 2.0);
        let l2 = line(0.0, 0.0, 1.0, 0.0);
        assert!(interior_transversal_2d(&disks, &l1, &l2).is_err());
    }
}
