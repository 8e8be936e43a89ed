//! Maximin point packings in a unit cylinder and in the intersection of two
//! unit cylinders.
//!
//! These are refuters, not proofs: the reported distance is the best found
//! by a seeded multistart hill climb.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::sampling::stream_rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingReport {
    pub points: Vec<Point3>,
    pub min_pairwise_distance: f64,
    pub target_count: usize,
    /// True when the step size of the best start collapsed before the
    /// budget ran out.
    pub converged: bool,
    pub proposals: usize,
}

trait Region: Sync {
    fn contains(&self, p: &Point3) -> bool;
    /// Axis-aligned box enclosing the region, as `(lo, hi)`.
    fn bounds(&self) -> (Point3, Point3);
    /// Moves a proposal into the region when cheap to do so.
    fn project(&self, p: Point3) -> Point3 {
        p
    }
}

struct Cylinder {
    length: f64,
}

impl Region for Cylinder {
    fn contains(&self, p: &Point3) -> bool {
        p.x >= 0.0 && p.x <= self.length && p.y * p.y + p.z * p.z <= 1.0
    }

    fn bounds(&self) -> (Point3, Point3) {
        (Point3::new(0.0, -1.0, -1.0), Point3::new(self.length, 1.0, 1.0))
    }

    fn project(&self, p: Point3) -> Point3 {
        let rho = (p.y * p.y + p.z * p.z).sqrt();
        let s = if rho > 1.0 { 1.0 / rho } else { 1.0 };
        Point3::new(p.x.clamp(0.0, self.length), p.y * s, p.z * s)
    }
}

/// The x-axis cylinder meets the cylinder around
/// `{(t cos θ, t sin θ, offset)}`.
struct TwoCylinders {
    dir: Vec3,
    offset: f64,
    reach: f64,
}

impl Region for TwoCylinders {
    fn contains(&self, p: &Point3) -> bool {
        if p.y * p.y + p.z * p.z > 1.0 {
            return false;
        }
        let rel = p - Point3::new(0.0, 0.0, self.offset);
        (rel - self.dir * rel.dot(&self.dir)).norm_squared() <= 1.0
    }

    fn bounds(&self) -> (Point3, Point3) {
        (Point3::new(-self.reach, -1.0, -1.0), Point3::new(self.reach, 1.0, 1.0))
    }
}

fn min_distance(pts: &[Point3]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

fn nearest(pts: &[Point3], i: usize, p: &Point3) -> f64 {
    pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| (q - p).norm()).fold(f64::INFINITY, f64::min)
}

fn sample_inside<R: Rng>(region: &dyn Region, rng: &mut R) -> Point3 {
    let (lo, hi) = region.bounds();
    loop {
        let p = Point3::new(
            lo.x + (hi.x - lo.x) * rng.gen::<f64>(),
            lo.y + (hi.y - lo.y) * rng.gen::<f64>(),
            lo.z + (hi.z - lo.z) * rng.gen::<f64>(),
        );
        if region.contains(&p) {
            return p;
        }
    }
}

struct Climb {
    points: Vec<Point3>,
    min: f64,
    converged: bool,
}

fn climb<R: Rng>(region: &dyn Region, count: usize, proposals: usize, rng: &mut R) -> Climb {
    let mut pts: Vec<Point3> = (0..count).map(|_| sample_inside(region, rng)).collect();
    if count < 2 {
        return Climb { points: pts, min: f64::INFINITY, converged: true };
    }
    let (mut m, mut a, mut b) = min_distance(&pts);
    let mut sigma = 0.5;
    let mut misses = 0;
    for _ in 0..proposals {
        if sigma < 1e-9 {
            return Climb { points: pts, min: m, converged: true };
        }
        let i = if rng.gen_bool(0.8) {
            if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        } else {
            rng.gen_range(0..count)
        };
        let step = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let cand = region.project(pts[i] + step * sigma);
        let mut accepted = false;
        if region.contains(&cand) && nearest(&pts, i, &cand) > nearest(&pts, i, &pts[i]) {
            let old = pts[i];
            pts[i] = cand;
            let (m2, a2, b2) = min_distance(&pts);
            if m2 >= m {
                (m, a, b) = (m2, a2, b2);
                accepted = true;
            } else {
                pts[i] = old;
            }
        }
        if accepted {
            misses = 0;
            sigma = (sigma * 1.2).min(1.0);
        } else {
            misses += 1;
            if misses >= 40 {
                sigma *= 0.5;
                misses = 0;
            }
        }
    }
    Climb { points: pts, min: m, converged: false }
}

const STARTS: usize = 16;

fn multistart(region: &dyn Region, count: usize, budget: usize, seed: u64) -> PackingReport {
    let starts = STARTS.min(budget.max(1));
    let per = budget.max(1) / starts;
    let best = (0..starts)
        .into_par_iter()
        .map(|s| climb(region, count, per, &mut stream_rng(seed, s as u64)))
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|x, y| if y.min > x.min { y } else { x })
        .expect("at least one start");
    PackingReport {
        min_pairwise_distance: best.min,
        points: best.points,
        target_count: count,
        converged: best.converged,
        proposals: per * starts,
    }
}

/// Best found packing of `count` points in `{0 <= x <= length, y² + z² <= 1}`.
pub fn pack_cylinder(length: f64, count: usize, budget: usize, seed: u64) -> Result<PackingReport> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::InputInvalid(format!("cylinder length {length}")));
    }
    Ok(multistart(&Cylinder { length }, count, budget, seed))
}

/// Best found packing of `count` points in the intersection of the unit
/// cylinder around the x-axis with the unit cylinder around the line
/// `{(t cos θ, t sin θ, offset)}`.
pub fn pack_two_cylinders(theta: f64, offset: f64, count: usize, budget: usize, seed: u64) -> Result<PackingReport> {
    if !(theta > FRAC_PI_4 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::BadAngle(theta));
    }
    if !(offset.is_finite() && offset.abs() < 2.0) {
        return Err(Error::InputInvalid(format!("cylinders with offset {offset} are disjoint")));
    }
    let dir = Vec3::new(theta.cos(), theta.sin(), 0.0);
    let reach = (1.0 + theta.cos()) / theta.sin();
    Ok(multistart(&TwoCylinders { dir, offset, reach }, count, budget, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, SQRT_2};

    #[test]
    fn disk_holds_two_antipodal_points() {
        let r = pack_cylinder(0.0, 2, 40_000, 1).unwrap();
        assert!(r.min_pairwise_distance > 2.0 - 1e-3, "{}", r.min_pairwise_distance);
        assert!(r.min_pairwise_distance <= 2.0 + 1e-12);
    }

    /// Two points near-antipodal on one end disk and one on the other:
    /// `4 sin²α = L² + 2 − 2 cos α`.
    fn three_point_optimum(length: f64) -> f64 {
        let c = (2.0 - (4.0 - 16.0 * (length * length - 2.0)).sqrt()) / 8.0;
        2.0 * (1.0 - c * c).sqrt()
    }

    #[test]
    fn short_cylinders_stay_below_two() {
        let r = pack_cylinder(1.4, 3, 100_000, 2).unwrap();
        assert!(r.min_pairwise_distance < 2.0);
        assert!((r.min_pairwise_distance - three_point_optimum(1.4)).abs() < 1e-4, "{r:?}");
        assert!(pack_cylinder(2.8, 5, 100_000, 3).unwrap().min_pairwise_distance < 2.0);
    }

    #[test]
    fn tight_side_reaches_two() {
        assert!(pack_cylinder(SQRT_2 - 1e-3, 2, 40_000, 4).unwrap().min_pairwise_distance >= 2.0 - 1e-3);
        let r = pack_cylinder(2.0 * SQRT_2 - 1e-3, 4, 200_000, 5).unwrap();
        assert!(r.min_pairwise_distance >= 2.0 - 1e-3, "{}", r.min_pairwise_distance);
    }

    #[test]
    fn points_stay_in_region() {
        let r = pack_two_cylinders(FRAC_PI_3, 0.5, 7, 50_000, 6).unwrap();
        let region = TwoCylinders { dir: Vec3::new(FRAC_PI_3.cos(), FRAC_PI_3.sin(), 0.0), offset: 0.5, reach: 3.0 };
        assert!(r.points.iter().all(|p| region.contains(p)));
        assert_eq!(r.points.len(), 7);
    }

    #[test]
    fn two_cylinders_refute_seven() {
        for (theta, offset) in [(FRAC_PI_2, 0.0), (FRAC_PI_3, 0.5)] {
            let r = pack_two_cylinders(theta, offset, 7, 100_000, 7).unwrap();
            assert!(r.min_pairwise_distance < 2.0 - 1e-3);
        }
    }

    #[test]
    fn bad_angle() {
        assert_eq!(
            pack_two_cylinders(std::f64::consts::PI / 5.0, 0.0, 7, 10, 0),
            Err(Error::BadAngle(std::f64::consts::PI / 5.0))
        );
    }

    #[test]
    fn deterministic() {
        assert_eq!(pack_cylinder(1.4, 3, 5000, 9).unwrap(), pack_cylinder(1.4, 3, 5000, 9).unwrap());
    }
}
